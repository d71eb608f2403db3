//! Validation thresholds used across the crate.
//!
//! All values are absolute unless stated otherwise. The algebraic thresholds
//! sit roughly two orders of magnitude above f64 epsilon to absorb rounding
//! accumulated over small matrix products.

/// Hermiticity: max |M - M†| for matrices that must be exactly Hermitian.
pub const HERMITIAN: f64 = 1e-12;

/// Cubic identity max |S³ - S| for a valid spin operator.
pub const CUBIC_IDENTITY: f64 = 1e-10;

/// Distance of an eigenvalue from {-1, 0, +1} before an operator is rejected.
pub const SPIN_EIGENVALUE: f64 = 1e-8;

/// Unitarity: max |U U† - 1|.
pub const UNITARY: f64 = 1e-12;

/// Density matrices: trace deviation from one, and the most negative
/// eigenvalue tolerated before the state is rejected.
pub const STATE_TRACE: f64 = 1e-12;
pub const STATE_NEGATIVITY: f64 = 1e-12;

/// Overlap floor below which preparation and postselection count as
/// orthogonal and weak values are refused.
pub const OMEGA_FLOOR: f64 = 1e-12;

/// Commutator norm below which a special-case classification flag is set.
pub const COMMUTATOR: f64 = 1e-10;

/// Equal-spacing check in `affine_decompose`, relative to the full spread.
pub const SPACING_RELATIVE: f64 = 1e-8;

/// Uncertainty slack: σ_P²σ_Q² - cov² must exceed 1/4 minus this.
pub const UNCERTAINTY: f64 = 1e-12;

/// Probabilities this far below zero are clamped to zero; anything lower is
/// an internal-consistency error.
pub const PROBABILITY_CLAMP: f64 = 1e-10;

/// Default tolerance for engine-versus-oracle comparisons.
pub const ORACLE_DEFAULT: f64 = 1e-9;
