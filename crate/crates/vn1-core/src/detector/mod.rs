//! The three detector families and their measurement-formula inputs.

pub mod discrete;
pub mod gaussian;
pub mod matrix;
pub mod moments;

pub use discrete::{
    discrete_conjugate_pair, fourier_basis, translation_operator, DiscreteCanonicalDetector,
    WignerTable,
};
pub use gaussian::{GaussianDetector, QuadratureMoments, QuadratureSpec};
pub use matrix::MatrixDetector;
pub use moments::{DetectorMoments, OperatorAverages, ShiftMoments, WeakMoments};

/// Any of the supported detector families.
#[derive(Debug, Clone)]
pub enum DetectorModel {
    Gaussian(GaussianDetector),
    Discrete(DiscreteCanonicalDetector),
    Matrix(MatrixDetector),
}

impl DetectorModel {
    /// Hilbert-space dimension, where one exists (Gaussian detectors are
    /// continuous).
    pub fn dim(&self) -> Option<usize> {
        match self {
            DetectorModel::Gaussian(_) => None,
            DetectorModel::Discrete(d) => Some(d.dim()),
            DetectorModel::Matrix(m) => Some(m.dim()),
        }
    }
}
