//! Brute-force ground truth: build the joint system ⊗ detector state, apply
//! the exact coupling unitary, postselect, and read the detector average.
//!
//! The unitary is assembled as `U = 1⊗1 + i S⊗sin(λQ) − S²⊗(1−cos(λQ))`,
//! which is `exp(iλ Q S)` evaluated per Q-eigenvalue; a dense
//! scaling-and-squaring exponential cross-checks that construction on small
//! dimensions. Nothing in this module touches weak values or the closed-form
//! engine, so agreement with [`crate::engine`] is a genuine two-route check.
//!
//! Continuous (Gaussian) detectors are handled by discretizing the coupling
//! variable on a uniform grid over ±8σ_Q and refining through three grid
//! levels; the spread between the two finest levels serves as the quadrature
//! error bar.

use crate::detector::GaussianDetector;
use crate::engine::MeasurementResult;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::spin::{exp_phi_matrix, SpinOperator};
use crate::tolerances;

/// Densest joint dimension the oracle will materialize.
pub const JOINT_DIM_CAP: usize = 3 * 512;

/// The evolved joint state ρ⁺ = U (ρ_i ⊗ ρ_D) U†, system factor major.
#[derive(Debug, Clone)]
pub struct JointState {
    rho: CMatrix,
    n_sys: usize,
    n_det: usize,
}

impl JointState {
    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n_sys, self.n_det)
    }

    /// Hermiticity and unit trace within 1e-10 (positivity is implied by the
    /// unitary construction and spot-checked in tests).
    pub fn validate(&self) -> Result<()> {
        linalg::check_hermitian(&self.rho, 1e-10)?;
        let tr = linalg::trace(&self.rho);
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidState {
                reason: format!("joint state trace {tr} differs from 1"),
            });
        }
        Ok(())
    }
}

/// Detector state after postselection, with the success probability.
#[derive(Debug, Clone)]
pub struct ConditionedDetectorState {
    pub rho: CMatrix,
    pub p_f: f64,
}

/// Evolve the uncorrelated joint state through `exp(iλ Q S)`.
pub fn evolve_joint(
    rho_sys: &CMatrix,
    rho_det: &CMatrix,
    s: &SpinOperator,
    q_op: &CMatrix,
    lambda: f64,
) -> Result<JointState> {
    let n_sys = s.dim();
    let n_det = q_op.nrows();
    if rho_sys.nrows() != n_sys {
        return Err(Error::DimensionMismatch {
            left: rho_sys.nrows(),
            right: n_sys,
        });
    }
    if rho_det.nrows() != n_det || q_op.ncols() != n_det {
        return Err(Error::DimensionMismatch {
            left: rho_det.nrows(),
            right: n_det,
        });
    }
    let joint_dim = n_sys * n_det;
    if joint_dim > JOINT_DIM_CAP {
        return Err(Error::JointDimensionCap {
            dim: joint_dim,
            cap: JOINT_DIM_CAP,
        });
    }
    linalg::check_hermitian(q_op, tolerances::HERMITIAN)?;

    let off_diag = {
        let mut worst = 0.0f64;
        for i in 0..n_det {
            for j in 0..n_det {
                if i != j {
                    worst = worst.max(q_op[(i, j)].norm());
                }
            }
        }
        worst
    };

    let rho = if off_diag == 0.0 {
        evolve_diagonal(rho_sys, rho_det, s, &q_op.diagonal(), lambda)
    } else {
        evolve_dense(rho_sys, rho_det, s, q_op, lambda)
    };
    let joint = JointState {
        rho,
        n_sys,
        n_det,
    };
    joint.validate()?;
    Ok(joint)
}

fn evolve_dense(
    rho_sys: &CMatrix,
    rho_det: &CMatrix,
    s: &SpinOperator,
    q_op: &CMatrix,
    lambda: f64,
) -> CMatrix {
    let n_sys = s.dim();
    let n_det = q_op.nrows();
    let sin_q = linalg::spectral_map(q_op, |x| C64::new((lambda * x).sin(), 0.0));
    let vers_q = linalg::spectral_map(q_op, |x| C64::new(1.0 - (lambda * x).cos(), 0.0));
    let u = linalg::identity(n_sys * n_det)
        + linalg::kron(s.matrix(), &sin_q).map(|z| z * linalg::I)
        - linalg::kron(&s.squared(), &vers_q);
    let initial = linalg::kron(rho_sys, rho_det);
    &u * initial * u.adjoint()
}

/// Fast path for a diagonal coupling operator: the unitary is block diagonal
/// over detector indices with 3×3 (or 4×4) system blocks `exp(iλ q_i S)`.
fn evolve_diagonal(
    rho_sys: &CMatrix,
    rho_det: &CMatrix,
    s: &SpinOperator,
    q_diag: &CVector,
    lambda: f64,
) -> CMatrix {
    let n_sys = s.dim();
    let n_det = q_diag.len();
    let s2 = s.squared();
    // K_i = exp(iλ q_i S), M_i = K_i ρ_sys
    let blocks: Vec<CMatrix> = (0..n_det)
        .map(|i| exp_phi_matrix(s.matrix(), &s2, lambda * q_diag[i].re))
        .collect();
    let halves: Vec<CMatrix> = blocks.iter().map(|k| k * rho_sys).collect();

    let mut rho = CMatrix::zeros(n_sys * n_det, n_sys * n_det);
    for i in 0..n_det {
        for j in 0..n_det {
            let w = rho_det[(i, j)];
            if w.norm() == 0.0 {
                continue;
            }
            let block = &halves[i] * blocks[j].adjoint();
            for a in 0..n_sys {
                for b in 0..n_sys {
                    rho[(a * n_det + i, b * n_det + j)] = w * block[(a, b)];
                }
            }
        }
    }
    rho
}

/// Project the joint on a postselection operator and reduce to the detector:
/// ρ_{D|f} = Tr_sys[(E_f ⊗ 1) ρ⁺] / p_f with p_f the full trace.
pub fn postselect(joint: &JointState, e_f: &CMatrix) -> Result<ConditionedDetectorState> {
    let (n_sys, n_det) = joint.dims();
    if e_f.nrows() != n_sys || e_f.ncols() != n_sys {
        return Err(Error::DimensionMismatch {
            left: e_f.nrows(),
            right: n_sys,
        });
    }
    let mut reduced = CMatrix::zeros(n_det, n_det);
    for a in 0..n_sys {
        for b in 0..n_sys {
            let w = e_f[(a, b)];
            if w.norm() == 0.0 {
                continue;
            }
            for i in 0..n_det {
                for j in 0..n_det {
                    reduced[(i, j)] += w * joint.rho[(b * n_det + i, a * n_det + j)];
                }
            }
        }
    }
    let p_f = linalg::trace(&reduced).re;
    if p_f <= tolerances::OMEGA_FLOOR {
        return Err(Error::NoConditioning { p_f });
    }
    Ok(ConditionedDetectorState {
        rho: reduced.map(|z| z / p_f),
        p_f,
    })
}

/// Average of a Hermitian readout in the conditioned detector state.
pub fn oracle_average(state: &ConditionedDetectorState, o_op: &CMatrix) -> Result<f64> {
    if o_op.nrows() != state.rho.nrows() {
        return Err(Error::DimensionMismatch {
            left: o_op.nrows(),
            right: state.rho.nrows(),
        });
    }
    let z = linalg::trace_product(o_op, &state.rho);
    if z.im.abs() > 1e-10 {
        return Err(Error::InvalidState {
            reason: format!("readout average has imaginary residue {:.3e}", z.im),
        });
    }
    Ok(z.re)
}

/// One-call dense oracle: evolve, postselect, average.
pub fn measure_dense(
    rho_sys: &CMatrix,
    e_f: &CMatrix,
    s: &SpinOperator,
    rho_det: &CMatrix,
    q_op: &CMatrix,
    o_op: &CMatrix,
    lambda: f64,
) -> Result<(f64, f64)> {
    let joint = evolve_joint(rho_sys, rho_det, s, q_op, lambda)?;
    let conditioned = postselect(&joint, e_f)?;
    let avg = oracle_average(&conditioned, o_op)?;
    Ok((conditioned.p_f, avg))
}

/// Engine-versus-oracle comparison outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub p_f_delta: f64,
    pub avg_delta: f64,
    pub p_f_relative: f64,
    pub avg_relative: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn compare(engine: &MeasurementResult, oracle_p_f: f64, oracle_avg: f64, tol: f64) -> Comparison {
    let p_f_delta = (engine.p_f - oracle_p_f).abs();
    let avg_delta = (engine.avg_output - oracle_avg).abs();
    Comparison {
        p_f_delta,
        avg_delta,
        p_f_relative: p_f_delta / oracle_p_f.abs().max(1e-300),
        avg_relative: avg_delta / oracle_avg.abs().max(1e-300),
        tol,
        pass: p_f_delta <= tol && avg_delta <= tol,
    }
}

/// Uniform grid used to discretize a continuous detector.
#[derive(Debug, Clone, Copy)]
pub struct Grid {
    pub points: usize,
    pub half_width_sigmas: f64,
}

/// Position-basis density matrix of a Gaussian detector on a grid, together
/// with the grid coordinates. The off-diagonal profile follows from the
/// Wigner function: Fourier transforming the P dependence at fixed midpoint
/// gives mean `P̄ + (cov/σ_Q²)(Q − Q̄)` and variance `σ_P² − cov²/σ_Q²` for
/// the conditional momentum.
pub fn gaussian_position_state(det: &GaussianDetector, grid: Grid) -> (Vec<f64>, CMatrix) {
    let n = grid.points;
    let (q0, p0) = (det.mean_q, det.mean_p);
    let (sq, sp, cov) = (det.sigma_q, det.sigma_p, det.cov_qp);
    let half = grid.half_width_sigmas * sq;
    let h = 2.0 * half / (n - 1) as f64;
    let qs: Vec<f64> = (0..n).map(|i| q0 - half + i as f64 * h).collect();
    let var_p_cond = sp * sp - cov * cov / (sq * sq);
    let norm = h / (2.0 * std::f64::consts::PI * sq * sq).sqrt();
    let mut rho = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mid = (qs[i] + qs[j]) / 2.0 - q0;
            let u = qs[j] - qs[i];
            let amp = norm * (-mid * mid / (2.0 * sq * sq) - u * u * var_p_cond / 2.0).exp();
            let phase = -u * (p0 + cov / (sq * sq) * mid);
            let z = C64::new(amp * phase.cos(), amp * phase.sin());
            rho[(i, j)] = z;
            rho[(j, i)] = z.conj();
        }
    }
    let tr = linalg::trace(&rho).re;
    (qs, rho.map(|z| z / tr))
}

/// Momentum operator for a uniform periodic grid (spectral differentiation).
/// Accurate for states that decay well inside the box.
pub fn grid_momentum_operator(n: usize, spacing: f64) -> CMatrix {
    let length = n as f64 * spacing;
    // DFT frequency for bin k, symmetric convention
    let freq = |k: usize| -> f64 {
        let k = k as i64;
        let signed = if k <= (n as i64 - 1) / 2 { k } else { k - n as i64 };
        2.0 * std::f64::consts::PI * signed as f64 / length
    };
    // P[m,l] depends only on (m−l) mod n
    let mut profile = vec![C64::new(0.0, 0.0); n];
    for (delta, slot) in profile.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..n {
            let angle = 2.0 * std::f64::consts::PI * (k as f64) * (delta as f64) / n as f64;
            // e^{+i 2π k Δ / n} picks up the signed frequency
            acc += C64::new(angle.cos(), angle.sin()) * freq(k);
        }
        *slot = acc / C64::new(n as f64, 0.0);
    }
    let mut p = CMatrix::zeros(n, n);
    for m in 0..n {
        for l in 0..n {
            p[(m, l)] = profile[(m + n - l) % n];
        }
    }
    (&p + p.adjoint()).map(|z| z * 0.5)
}

/// Result of the grid-refined continuous oracle.
#[derive(Debug, Clone)]
pub struct ContinuousOracle {
    /// Values at the finest level.
    pub p_f: f64,
    pub avg: f64,
    /// Spread between the two finest levels, per quantity.
    pub p_f_error_bar: f64,
    pub avg_error_bar: f64,
    /// (points, p_f, avg) per level.
    pub levels: Vec<(usize, f64, f64)>,
}

/// Brute-force oracle for a Gaussian detector with the canonical readout,
/// refined over grid levels (default 128/256/512 points across ±8σ_Q).
pub fn measure_gaussian(
    det: &GaussianDetector,
    rho_sys: &CMatrix,
    e_f: &CMatrix,
    s: &SpinOperator,
    lambda: f64,
    grid_levels: &[usize],
) -> Result<ContinuousOracle> {
    let mut levels = Vec::new();
    for &points in grid_levels {
        let grid = Grid {
            points,
            half_width_sigmas: 8.0,
        };
        let (qs, rho_det) = gaussian_position_state(det, grid);
        let q_op = CMatrix::from_diagonal(&CVector::from_iterator(
            points,
            qs.iter().map(|&q| C64::new(q, 0.0)),
        ));
        let p_op = grid_momentum_operator(points, qs[1] - qs[0]);
        let (p_f, avg) = measure_dense(rho_sys, e_f, s, &rho_det, &q_op, &p_op, lambda)?;
        levels.push((points, p_f, avg));
    }
    let last = levels[levels.len() - 1];
    let prev = levels[levels.len() - 2];
    Ok(ContinuousOracle {
        p_f: last.1,
        avg: last.2,
        p_f_error_bar: (last.1 - prev.1).abs(),
        avg_error_bar: (last.2 - prev.2).abs(),
        levels,
    })
}

pub const DEFAULT_GRID_LEVELS: [usize; 3] = [128, 256, 512];
