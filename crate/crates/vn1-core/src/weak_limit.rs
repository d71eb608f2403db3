//! Small-coupling expansions of the exact results, their validity
//! diagnostics, and convergence measurement against the exact engine.
//!
//! Three levels are provided, all in terms of the first two moments of the
//! coupling variable and readout cross-moments ([`WeakMoments`]):
//!
//! * second order:
//!   `P_f ≈ ω{1 − 2λ⟦Q⟧A″ + λ²⟦Q²⟧(B − C′)}`,
//!   `⟨O⟩ ≈ (ω/P_f){λ(⟦i[O,Q]⟧A′ − ⟦{O,Q}⟧A″) + ½λ²(−⟦{O,Q²}⟧C′ − ⟦i[O,Q²]⟧C″ + 2⟦QOQ⟧B)}`
//! * interpolation (the C_w group dropped):
//!   `P_f ≈ ω{1 − 2λ⟦Q⟧A″ + λ²⟦Q²⟧B}`,
//!   `⟨O⟩ ≈ (ω/P_f){λ(⟦i[O,Q]⟧A′ − ⟦{O,Q}⟧A″) + λ²⟦QOQ⟧B}`
//! * linear: `⟨O⟩ ≈ λ(⟦i[O,Q]⟧A′ − ⟦{O,Q−⟦Q⟧}⟧A″)`, with `P_f` reported as ω.
//!
//! A measurement is weak when `2λσ_Q = λ/δP ≪ 1` (δP the coherence scale of
//! the readout basis); a sharper sufficient condition bounds every moment:
//! `(2λ)ⁿ max|S|ⁿ ⟦|Q|ⁿ⟧ ≤ δⁿ` for a small δ. Both are reported by
//! [`validity_check`], with Q̄ gauged out by recentering the moments.

use crate::detector::{DetectorModel, WeakMoments};
use crate::engine::{self, MeasurementSetup};
use crate::error::{Error, Result};
use crate::linalg;
use crate::weak_values::WeakValues;

/// Which expansion produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionVariant {
    SecondOrder,
    Interpolation,
    Linear,
}

/// Approximate postselection probability and centered readout average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakExpansionResult {
    pub variant: ExpansionVariant,
    pub p_f: f64,
    /// Centered average; add the detector's readout offset for the physical
    /// value.
    pub avg: f64,
}

fn linear_terms(wv: &WeakValues, m: &WeakMoments, lambda: f64) -> f64 {
    lambda * (m.comm_q * wv.a_w.re - m.anti_q * wv.a_w.im)
}

/// Expansion to second order in λ.
pub fn expand_second_order(wv: &WeakValues, m: &WeakMoments, lambda: f64) -> WeakExpansionResult {
    let p_f = wv.omega
        * (1.0 - 2.0 * lambda * m.q * wv.a_w.im
            + lambda * lambda * m.q_sq * (wv.b_w - wv.c_w.re));
    let braces = linear_terms(wv, m, lambda)
        + 0.5
            * lambda
            * lambda
            * (-m.anti_q_sq * wv.c_w.re - m.comm_q_sq * wv.c_w.im + 2.0 * m.q_o_q * wv.b_w);
    WeakExpansionResult {
        variant: ExpansionVariant::SecondOrder,
        p_f,
        avg: wv.omega / p_f * braces,
    }
}

/// Second order with the C_w group dropped. The dropped terms cancel between
/// numerator and probability for amplified setups, which makes this form a
/// robust interpolation even where the full second order overreaches.
pub fn expand_interpolation(wv: &WeakValues, m: &WeakMoments, lambda: f64) -> WeakExpansionResult {
    let p_f =
        wv.omega * (1.0 - 2.0 * lambda * m.q * wv.a_w.im + lambda * lambda * m.q_sq * wv.b_w);
    let braces = linear_terms(wv, m, lambda) + lambda * lambda * m.q_o_q * wv.b_w;
    WeakExpansionResult {
        variant: ExpansionVariant::Interpolation,
        p_f,
        avg: wv.omega / p_f * braces,
    }
}

/// Expansion margin guarding the linear formula: the Taylor expansion of
/// ω/P_f needs λ(|A_w| + √B_w)·√⟦Q²⟧ well below one; 0.5 is the concrete
/// cutoff adopted here.
pub fn linear_margin(wv: &WeakValues, m: &WeakMoments, lambda: f64) -> f64 {
    lambda.abs() * (wv.a_w.norm() + wv.b_w.max(0.0).sqrt()) * m.q_sq.max(0.0).sqrt()
}

/// First-order conditioned average (readout centered, so the ⟦Q⟧ recentering
/// term of the anticommutator vanishes identically).
pub fn expand_linear(
    wv: &WeakValues,
    m: &WeakMoments,
    lambda: f64,
) -> Result<WeakExpansionResult> {
    let margin = linear_margin(wv, m, lambda);
    if !(margin < 0.5) {
        return Err(Error::LinearRegimeInvalid { margin });
    }
    Ok(WeakExpansionResult {
        variant: ExpansionVariant::Linear,
        p_f: wv.omega,
        avg: linear_terms(wv, m, lambda),
    })
}

/// Weak-measurement validity diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    /// 2λσ_Q = λ/δP.
    pub wcond_value: f64,
    pub wcond_pass: bool,
    /// δⁿ − (2λ)ⁿ·⟦|Q − Q̄|ⁿ⟧ for n = 1..=n_max (max|S| = 1 for spin
    /// operators); all must be positive for the expansion to be trusted.
    pub moment_margins: Vec<f64>,
    pub delta: f64,
    /// The mean ⟦Q⟧ gauged out before taking absolute moments.
    pub gauge_offset_applied: f64,
}

/// Thresholds for [`validity_check`]; the coupling is called weak when
/// 2λσ_Q < `wcond_threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityOptions {
    pub wcond_threshold: f64,
    pub delta: f64,
    pub n_max: u32,
}

impl Default for ValidityOptions {
    fn default() -> Self {
        Self {
            wcond_threshold: 0.1,
            delta: 0.2,
            n_max: 6,
        }
    }
}

/// Central absolute moment ⟦|Q − Q̄|ⁿ⟧ of the coupling variable.
pub fn central_abs_moment_q(det: &DetectorModel, n: u32) -> f64 {
    match det {
        DetectorModel::Gaussian(g) => g.abs_central_moment_q(n),
        DetectorModel::Discrete(d) => {
            let (_, q_op) = d.conjugate_pair();
            spectral_abs_moment(d.state(), &q_op, n)
        }
        DetectorModel::Matrix(m) => spectral_abs_moment(m.state(), m.coupling_op(), n),
    }
}

fn spectral_abs_moment(rho: &crate::linalg::CMatrix, q_op: &crate::linalg::CMatrix, n: u32) -> f64 {
    let (w, v) = linalg::hermitian_eigen(q_op);
    let weights: Vec<f64> = (0..w.len())
        .map(|k| {
            let col = v.column(k);
            (col.adjoint() * rho * col)[(0, 0)].re
        })
        .collect();
    let mean: f64 = (0..w.len()).map(|k| weights[k] * w[k]).sum();
    (0..w.len())
        .map(|k| weights[k] * (w[k] - mean).abs().powi(n as i32))
        .sum()
}

/// Standard deviation of the coupling variable.
pub fn sigma_q(det: &DetectorModel) -> f64 {
    match det {
        DetectorModel::Gaussian(g) => g.sigma_q,
        _ => central_abs_moment_q(det, 2).sqrt(),
    }
}

/// Mean of the coupling variable (the offset gauged out of the moment
/// bounds).
pub fn mean_q(det: &DetectorModel) -> f64 {
    match det {
        DetectorModel::Gaussian(g) => g.mean_q,
        DetectorModel::Discrete(d) => {
            let (_, q_op) = d.conjugate_pair();
            linalg::trace_product(&q_op, d.state()).re
        }
        DetectorModel::Matrix(m) => linalg::trace_product(m.coupling_op(), m.state()).re,
    }
}

pub fn validity_check(det: &DetectorModel, lambda: f64, opts: ValidityOptions) -> ValidityReport {
    let sigma = sigma_q(det);
    let wcond_value = 2.0 * lambda.abs() * sigma;
    let moment_margins = (1..=opts.n_max)
        .map(|n| {
            opts.delta.powi(n as i32)
                - (2.0 * lambda.abs()).powi(n as i32) * central_abs_moment_q(det, n)
        })
        .collect();
    ValidityReport {
        wcond_value,
        wcond_pass: wcond_value < opts.wcond_threshold,
        moment_margins,
        delta: opts.delta,
        gauge_offset_applied: mean_q(det),
    }
}

/// The weak moments matching a setup's detector and readout.
pub fn weak_moments_for_setup(setup: &MeasurementSetup) -> WeakMoments {
    match &setup.detector {
        DetectorModel::Gaussian(g) => g.weak_moments_p(),
        DetectorModel::Discrete(d) => d.weak_moments(),
        DetectorModel::Matrix(m) => m.weak_moments(),
    }
}

/// One sweep point of the convergence scan. Averages are physical (offset
/// restored); errors compare each variant's average against the exact one.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub lambda: f64,
    pub exact_p_f: f64,
    pub exact_avg: f64,
    pub second_order: WeakExpansionResult,
    pub interpolation: WeakExpansionResult,
    pub linear: Option<WeakExpansionResult>,
    pub err_second_order: f64,
    pub err_interpolation: f64,
    pub err_linear: Option<f64>,
}

/// Least-squares slope of log|error| against log λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: Option<f64>,
    pub points_used: usize,
    /// Too few usable points (errors at the noise floor or outside the fit
    /// window) to call the fit meaningful.
    pub degenerate: bool,
}

/// Errors below this are treated as numerical noise and excluded from fits.
pub const NOISE_FLOOR: f64 = 1e2 * f64::EPSILON;

fn fit_slope(points: &[(f64, f64)]) -> SlopeFit {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, e)| *e > NOISE_FLOOR)
        .map(|&(l, e)| (l.ln(), e.ln()))
        .collect();
    if usable.len() < 3 {
        return SlopeFit {
            slope: None,
            points_used: usable.len(),
            degenerate: true,
        };
    }
    let n = usable.len() as f64;
    let sx: f64 = usable.iter().map(|(x, _)| x).sum();
    let sy: f64 = usable.iter().map(|(_, y)| y).sum();
    let sxx: f64 = usable.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = usable.iter().map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return SlopeFit {
            slope: None,
            points_used: usable.len(),
            degenerate: true,
        };
    }
    SlopeFit {
        slope: Some((n * sxy - sx * sy) / denom),
        points_used: usable.len(),
        degenerate: false,
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceScan {
    pub rows: Vec<ScanRow>,
    pub slope_second_order: SlopeFit,
    pub slope_interpolation: SlopeFit,
    pub slope_linear: SlopeFit,
    pub readout_offset: f64,
}

/// Run the exact engine and all three expansions across a coupling grid and
/// fit the error orders inside `fit_window`.
pub fn convergence_scan(
    setup: &MeasurementSetup,
    lambdas: &[f64],
    fit_window: (f64, f64),
) -> Result<ConvergenceScan> {
    if lambdas.is_empty() {
        return Err(Error::EmptySweep {
            reason: "no coupling values supplied".into(),
        });
    }
    let wv = setup.weak_values()?;
    let wm = weak_moments_for_setup(setup);
    let mut rows = Vec::with_capacity(lambdas.len());
    let mut offset = 0.0;
    for &lambda in lambdas {
        if lambda <= 0.0 {
            return Err(Error::EmptySweep {
                reason: format!("non-positive coupling {lambda} in the scan grid"),
            });
        }
        let mut point = setup.clone();
        point.lambda = lambda;
        let exact = engine::run(&point)?;
        offset = exact.readout_offset;
        let second = expand_second_order(&wv, &wm, lambda);
        let interp = expand_interpolation(&wv, &wm, lambda);
        let linear = expand_linear(&wv, &wm, lambda).ok();
        rows.push(ScanRow {
            lambda,
            exact_p_f: exact.p_f,
            exact_avg: exact.avg_output,
            err_second_order: (second.avg + offset - exact.avg_output).abs(),
            err_interpolation: (interp.avg + offset - exact.avg_output).abs(),
            err_linear: linear
                .as_ref()
                .map(|l| (l.avg + offset - exact.avg_output).abs()),
            second_order: second,
            interpolation: interp,
            linear,
        });
    }

    let in_window = |l: f64| l >= fit_window.0 && l <= fit_window.1;
    let pts = |get: &dyn Fn(&ScanRow) -> Option<f64>| -> Vec<(f64, f64)> {
        rows.iter()
            .filter(|r| in_window(r.lambda))
            .filter_map(|r| get(r).map(|e| (r.lambda, e)))
            .collect()
    };
    Ok(ConvergenceScan {
        slope_second_order: fit_slope(&pts(&|r| Some(r.err_second_order))),
        slope_interpolation: fit_slope(&pts(&|r| Some(r.err_interpolation))),
        slope_linear: fit_slope(&pts(&|r| r.err_linear)),
        rows,
        readout_offset: offset,
    })
}

/// Logarithmically spaced grid, inclusive of both ends.
pub fn log_grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 || from <= 0.0 || to <= from {
        return Err(Error::EmptySweep {
            reason: format!("log grid needs 0 < from < to and ≥ 2 steps (got {from}, {to}, {steps})"),
        });
    }
    let ratio = (to / from).ln();
    Ok((0..steps)
        .map(|k| from * (ratio * k as f64 / (steps - 1) as f64).exp())
        .collect())
}
