//! Closed-form evaluation of the postselected measurement statistics.
//!
//! With s = sin λQ, t = 1 − cos λQ and the weak values (ω, A_w…E_w), the
//! postselection probability is
//!
//! ```text
//! P_f = ω { 1 − 2⟦s⟧A″ + ⟦s²⟧B − 2⟦t⟧C′ + 2⟦st⟧D″ + ⟦t²⟧E }
//! ```
//!
//! and the conditioned average of a centered readout O is
//!
//! ```text
//! ⟨O⟩_f = (ω/P_f) { ⟦i[O,s]⟧A′ − ⟦{O,s}⟧A″ − ⟦{O,t}⟧C′ − ⟦i[O,t]⟧C″
//!                   + ⟦sOs⟧B − ⟦i(tOs − sOt)⟧D′ + ⟦tOs + sOt⟧D″ + ⟦tOt⟧E }
//! ```
//!
//! (primes and double primes denote real and imaginary parts). Both are exact
//! operator identities following from S³ = S, valid for any coupling
//! strength; the brute-force oracle reproduces them to ~1e-12.
//!
//! For canonical detectors the same average reads, in phase-space moments of
//! the initial detector state,
//!
//! ```text
//! ⟨P⟩_f = (ω/P_f) { λ⟦cos λQ⟧A′ − 2⟦P sin λQ⟧A″ − 2⟦P(1−cos λQ)⟧C′
//!                   − λ⟦sin λQ⟧C″ + ⟦P sin²λQ⟧B + λ⟦1−cos λQ⟧D′
//!                   + 2⟦P sin λQ(1−cos λQ)⟧D″ + ⟦P(1−cos λQ)²⟧E }
//! ```
//!
//! where the three commutator-derived coefficients (the P-free ones) carry
//! the explicit factor λ from i[P, f(λQ)] = λ f′(λQ). For a continuous
//! canonical pair this is exactly the general formula with O = P; for a
//! finite-dimensional detector the commutation argument is only formal, so
//! the engine keeps the exact operator route for results and reports the
//! phase-space route's deviation alongside.

use crate::detector::{
    DetectorModel, DetectorMoments, OperatorAverages, ShiftMoments,
};
use crate::error::{Error, Result};
use crate::spin::SpinOperator;
use crate::states::{Postselection, SystemState};
use crate::tolerances;
use crate::weak_values::{weak_values_with_floor, WeakValues};

/// Which detector variable is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Readout {
    /// The canonical conjugate of the coupling variable (Gaussian and
    /// discrete detectors).
    CanonicalP,
    /// The explicit readout operator carried by a matrix detector.
    Explicit,
}

/// A complete measurement description.
#[derive(Debug, Clone)]
pub struct MeasurementSetup {
    pub system: SystemState,
    pub postselection: Option<Postselection>,
    pub observable: SpinOperator,
    pub detector: DetectorModel,
    pub lambda: f64,
    pub readout: Readout,
    pub omega_floor: f64,
}

impl MeasurementSetup {
    pub fn new(
        system: SystemState,
        postselection: Option<Postselection>,
        observable: SpinOperator,
        detector: DetectorModel,
        lambda: f64,
        readout: Readout,
    ) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::NotFinite { context: "lambda" });
        }
        if system.dim() != observable.dim() {
            return Err(Error::DimensionMismatch {
                left: system.dim(),
                right: observable.dim(),
            });
        }
        if let Some(post) = &postselection {
            if post.dim() != observable.dim() {
                return Err(Error::DimensionMismatch {
                    left: post.dim(),
                    right: observable.dim(),
                });
            }
        }
        match (&detector, readout) {
            (DetectorModel::Matrix(_), Readout::Explicit) => {}
            (DetectorModel::Matrix(_), Readout::CanonicalP) => {
                return Err(Error::ReadoutMismatch {
                    required: "an explicit readout operator",
                    actual: "a matrix detector driven with the canonical readout",
                })
            }
            (_, Readout::Explicit) => {
                return Err(Error::ReadoutMismatch {
                    required: "a matrix detector",
                    actual: "a canonical detector driven with an explicit readout",
                })
            }
            (_, Readout::CanonicalP) => {}
        }
        Ok(Self {
            system,
            postselection,
            observable,
            detector,
            lambda,
            readout,
            omega_floor: tolerances::OMEGA_FLOOR,
        })
    }

    pub fn with_omega_floor(mut self, floor: f64) -> Self {
        self.omega_floor = floor;
        self
    }

    /// The postselection in effect (identity when none was given).
    pub fn effective_postselection(&self) -> Postselection {
        self.postselection
            .clone()
            .unwrap_or_else(|| Postselection::identity(self.observable.dim()))
    }

    pub fn weak_values(&self) -> Result<WeakValues> {
        weak_values_with_floor(
            &self.system,
            &self.effective_postselection(),
            &self.observable,
            self.omega_floor,
        )
    }
}

/// How the engine produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineRoute {
    /// Analytic phase-space moments (Gaussian detectors).
    AnalyticMoments,
    /// Exact operator averages (matrix and discrete detectors).
    OperatorAverages,
}

/// Deviation of the phase-space (Wigner-sum) route from the exact operator
/// route for a discrete detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerRouteDelta {
    pub p_f_delta: f64,
    pub avg_delta: f64,
    /// Whether λ is an integer, where the translation picture is exact.
    pub integer_coupling: bool,
}

/// One labeled summand of a closed-form expression.
pub type Term = (&'static str, f64);

#[derive(Debug, Clone)]
pub struct MeasurementResult {
    /// Postselection probability.
    pub p_f: f64,
    /// Conditioned readout average, offset restored.
    pub avg_output: f64,
    /// Overlap ω of preparation and postselection.
    pub omega: f64,
    /// Readout mean subtracted during evaluation and restored afterwards.
    pub readout_offset: f64,
    /// The six summands of the probability formula (ω included).
    pub probability_terms: [Term; 6],
    /// The eight summands of the conditioned average (before ω/P_f).
    pub output_terms: [Term; 8],
    pub route: EngineRoute,
    /// Largest imaginary residue seen in the operator averages.
    pub imag_residue: f64,
    /// Discrete detectors: deviation of the phase-space route.
    pub wigner_route: Option<WignerRouteDelta>,
    pub warnings: Vec<String>,
}

fn probability_terms(wv: &WeakValues, m: &dyn ShiftMoments) -> [Term; 6] {
    let om = wv.omega;
    [
        ("unit", om),
        ("sin_im_a", -2.0 * om * m.sin_avg() * wv.a_w.im),
        ("sin_sq_b", om * m.sin_sq_avg() * wv.b_w),
        ("vers_re_c", -2.0 * om * m.vers_avg() * wv.c_w.re),
        ("sin_vers_im_d", 2.0 * om * m.sin_vers_avg() * wv.d_w.im),
        ("vers_sq_e", om * m.vers_sq_avg() * wv.e_w),
    ]
}

/// Postselection probability from the weak values and the pure-coupling
/// averages of any detector family. Slightly negative results within
/// [`tolerances::PROBABILITY_CLAMP`] are clamped to zero.
pub fn postselection_probability(wv: &WeakValues, m: &dyn ShiftMoments) -> Result<f64> {
    let raw: f64 = probability_terms(wv, m).iter().map(|(_, v)| v).sum();
    clamp_probability(raw).map(|(p, _)| p)
}

fn clamp_probability(raw: f64) -> Result<(f64, bool)> {
    if raw < -tolerances::PROBABILITY_CLAMP {
        return Err(Error::NegativeProbability { p_f: raw });
    }
    if raw < 0.0 {
        return Ok((0.0, true));
    }
    Ok((raw, false))
}

fn general_output_terms(wv: &WeakValues, oa: &OperatorAverages) -> [Term; 8] {
    [
        ("comm_sin_re_a", oa.comm_sin * wv.a_w.re),
        ("anti_sin_im_a", -oa.anti_sin * wv.a_w.im),
        ("anti_vers_re_c", -oa.anti_vers * wv.c_w.re),
        ("comm_vers_im_c", -oa.comm_vers * wv.c_w.im),
        ("sin_o_sin_b", oa.sin_o_sin * wv.b_w),
        ("comm_vers_sin_re_d", -oa.comm_vers_sin * wv.d_w.re),
        ("anti_vers_sin_im_d", oa.anti_vers_sin * wv.d_w.im),
        ("vers_o_vers_e", oa.vers_o_vers * wv.e_w),
    ]
}

/// Conditioned average of the centered readout for an arbitrary detector.
pub fn average_output_general(wv: &WeakValues, oa: &OperatorAverages, p_f: f64) -> Result<f64> {
    if p_f <= 0.0 {
        return Err(Error::NoConditioning { p_f });
    }
    let sum: f64 = general_output_terms(wv, oa).iter().map(|(_, v)| v).sum();
    Ok(wv.omega / p_f * sum)
}

fn canonical_output_terms(wv: &WeakValues, m: &DetectorMoments) -> [Term; 8] {
    let lam = m.lambda;
    [
        ("cos_re_a", lam * m.m_cos * wv.a_w.re),
        ("p_sin_im_a", -2.0 * m.m_p_sin * wv.a_w.im),
        ("p_vers_re_c", -2.0 * m.p_vers * wv.c_w.re),
        ("sin_im_c", -lam * m.m_sin * wv.c_w.im),
        ("p_sin_sq_b", m.p_sin_sq * wv.b_w),
        ("vers_re_d", lam * m.vers * wv.d_w.re),
        ("p_sin_vers_im_d", 2.0 * m.p_sin_vers * wv.d_w.im),
        ("p_vers_sq_e", m.p_vers_sq * wv.e_w),
    ]
}

/// Conditioned average of the centered canonical readout from phase-space
/// moments. Exact for continuous canonical detectors; for discrete detectors
/// it is the formal phase-space route (see the module docs).
pub fn average_output_canonical(wv: &WeakValues, m: &DetectorMoments, p_f: f64) -> Result<f64> {
    if p_f <= 0.0 {
        return Err(Error::NoConditioning { p_f });
    }
    let sum: f64 = canonical_output_terms(wv, m).iter().map(|(_, v)| v).sum();
    Ok(wv.omega / p_f * sum)
}

/// Evaluate a full setup with the appropriate moment provider.
pub fn run(setup: &MeasurementSetup) -> Result<MeasurementResult> {
    let wv = setup.weak_values()?;
    let post = setup.effective_postselection();
    let mut warnings = Vec::new();
    if !post.povm_bounded() {
        warnings.push(format!(
            "postselection eigenvalues reach {:.6}; probabilities are scaled accordingly",
            post.max_eigenvalue()
        ));
    }

    let result = match (&setup.detector, setup.readout) {
        (DetectorModel::Gaussian(g), Readout::CanonicalP) => {
            let m = g.moments(setup.lambda);
            let terms = probability_terms(&wv, &m);
            let (p_f, clamped) = clamp_probability(terms.iter().map(|(_, v)| v).sum())?;
            if clamped {
                warnings.push("postselection probability clamped to zero".into());
            }
            let avg_centered = average_output_canonical(&wv, &m, p_f)?;
            MeasurementResult {
                p_f,
                avg_output: avg_centered + m.readout_offset,
                omega: wv.omega,
                readout_offset: m.readout_offset,
                probability_terms: terms,
                output_terms: canonical_output_terms(&wv, &m),
                route: EngineRoute::AnalyticMoments,
                imag_residue: 0.0,
                wigner_route: None,
                warnings,
            }
        }
        (DetectorModel::Discrete(det), Readout::CanonicalP) => {
            let oa = det.operator_averages(setup.lambda);
            let terms = probability_terms(&wv, &oa);
            let (p_f, clamped) = clamp_probability(terms.iter().map(|(_, v)| v).sum())?;
            if clamped {
                warnings.push("postselection probability clamped to zero".into());
            }
            let avg_centered = average_output_general(&wv, &oa, p_f)?;
            let avg_output = avg_centered + oa.readout_offset;

            // formal phase-space route, reported but never asserted
            let m = det.moments(setup.lambda);
            let p_w = postselection_probability(&wv, &m)?;
            let avg_w = average_output_canonical(&wv, &m, p_w)? + m.readout_offset;
            let wigner_route = Some(WignerRouteDelta {
                p_f_delta: (p_f - p_w).abs(),
                avg_delta: (avg_output - avg_w).abs(),
                integer_coupling: (setup.lambda - setup.lambda.round()).abs() < 1e-12,
            });

            MeasurementResult {
                p_f,
                avg_output,
                omega: wv.omega,
                readout_offset: oa.readout_offset,
                probability_terms: terms,
                output_terms: general_output_terms(&wv, &oa),
                route: EngineRoute::OperatorAverages,
                imag_residue: oa.imag_residue,
                wigner_route,
                warnings,
            }
        }
        (DetectorModel::Matrix(det), Readout::Explicit) => {
            let oa = det.operator_averages(setup.lambda);
            let terms = probability_terms(&wv, &oa);
            let (p_f, clamped) = clamp_probability(terms.iter().map(|(_, v)| v).sum())?;
            if clamped {
                warnings.push("postselection probability clamped to zero".into());
            }
            let avg_centered = average_output_general(&wv, &oa, p_f)?;
            MeasurementResult {
                p_f,
                avg_output: avg_centered + oa.readout_offset,
                omega: wv.omega,
                readout_offset: oa.readout_offset,
                probability_terms: terms,
                output_terms: general_output_terms(&wv, &oa),
                route: EngineRoute::OperatorAverages,
                imag_residue: oa.imag_residue,
                wigner_route: None,
                warnings,
            }
        }
        // MeasurementSetup::new rejects the remaining combinations
        _ => unreachable!("readout/detector mismatch slipped past setup validation"),
    };

    if result.imag_residue > 1e-10 {
        return Err(Error::InvalidState {
            reason: format!(
                "operator averages carry imaginary residue {:.3e}; inputs are not Hermitian enough",
                result.imag_residue
            ),
        });
    }
    let bound = post.max_eigenvalue() + tolerances::PROBABILITY_CLAMP;
    if result.p_f > bound {
        return Err(Error::InvalidState {
            reason: format!(
                "postselection probability {:.12} exceeds the spectral bound {:.12}",
                result.p_f, bound
            ),
        });
    }
    Ok(result)
}
