//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |M - M†| = {deviation:.3e} exceeds {tol:.1e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("operator violates the cubic identity S³ = S: max |S³ - S| = {deviation:.3e}")]
    CubicIdentityViolated { deviation: f64 },

    #[error("eigenvalue {value:.10} is farther than {tol:.1e} from {{-1, 0, +1}}")]
    EigenvalueOutsideSpinSet { value: f64, tol: f64 },

    #[error("axis vector has norm {norm:.12}; pass a unit vector (divide by the norm)")]
    NonUnitAxis { norm: f64 },

    #[error("unsupported dimension {dim}; expected {expected}")]
    UnsupportedDimension { dim: usize, expected: &'static str },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("eigenvalue gaps differ: low gap {gap_low:.10e}, high gap {gap_high:.10e}")]
    UnequalSpacing { gap_low: f64, gap_high: f64 },

    #[error("degenerate spectrum: eigenvalue spacing is zero")]
    DegenerateSpectrum,

    #[error("invalid state: {reason}")]
    InvalidState { reason: String },

    #[error("invalid postselection operator: {reason}")]
    InvalidPostselection { reason: String },

    #[error("orthogonal preparation and postselection: ω = {omega:.3e} is at or below the floor {floor:.1e}")]
    OrthogonalPostselection { omega: f64, floor: f64 },

    #[error("uncertainty constraint violated: σ_P²σ_Q² - cov² = {value:.6e} < 1/4")]
    UncertaintyViolated { value: f64 },

    #[error("postselection probability {p_f:.6e} is negative beyond tolerance; inputs are inconsistent")]
    NegativeProbability { p_f: f64 },

    #[error("conditioning impossible: postselection probability {p_f:.6e} is not positive")]
    NoConditioning { p_f: f64 },

    #[error("readout requires {required}, but the detector is {actual}")]
    ReadoutMismatch {
        required: &'static str,
        actual: &'static str,
    },

    #[error("joint dimension {dim} exceeds the dense oracle cap {cap}")]
    JointDimensionCap { dim: usize, cap: usize },

    #[error("linear weak-measurement regime invalid: expansion margin {margin:.4} is not below 0.5")]
    LinearRegimeInvalid { margin: f64 },

    #[error("{context}: value is not finite")]
    NotFinite { context: &'static str },

    #[error("empty sweep range: {reason}")]
    EmptySweep { reason: String },
}
