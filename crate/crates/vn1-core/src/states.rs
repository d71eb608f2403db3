//! System-side inputs: the prepared density matrix and the postselection
//! operator.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::tolerances;

/// Prepared system state: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    rho: CMatrix,
}

impl SystemState {
    pub fn new(rho: CMatrix) -> Result<Self> {
        linalg::check_density_matrix(&rho, "preparation")?;
        Ok(Self { rho })
    }

    /// Pure state from an amplitude vector (normalized internally).
    pub fn pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState {
                reason: "zero or non-finite preparation vector".into(),
            });
        }
        let v = psi.map(|z| z / norm);
        Ok(Self {
            rho: &v * v.adjoint(),
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            rho: linalg::identity(dim).map(|z| z / dim as f64),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    /// Tr[ρ²], equal to 1 only for pure states.
    pub fn purity(&self) -> f64 {
        linalg::trace_product(&self.rho, &self.rho).re
    }
}

/// Postselection operator: Hermitian and positive semidefinite. Any positive
/// spectrum is accepted; eigenvalues above one merely mean the operator is
/// not a POVM element, which [`Postselection::povm_bounded`] reports.
#[derive(Debug, Clone, PartialEq)]
pub struct Postselection {
    op: CMatrix,
    max_eigenvalue: f64,
}

impl Postselection {
    pub fn new(op: CMatrix) -> Result<Self> {
        if op.nrows() != op.ncols() {
            return Err(Error::DimensionMismatch {
                left: op.nrows(),
                right: op.ncols(),
            });
        }
        linalg::check_hermitian(&op, tolerances::HERMITIAN).map_err(|e| {
            Error::InvalidPostselection {
                reason: e.to_string(),
            }
        })?;
        let w = linalg::hermitian_eigenvalues(&op);
        if w[0] < -tolerances::STATE_NEGATIVITY {
            return Err(Error::InvalidPostselection {
                reason: format!("negative eigenvalue {:.3e}", w[0]),
            });
        }
        Ok(Self {
            op,
            max_eigenvalue: w[w.len() - 1],
        })
    }

    /// Projector onto a (normalized) postselection vector.
    pub fn pure(phi: &CVector) -> Result<Self> {
        let norm = phi.norm();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::InvalidPostselection {
                reason: "zero or non-finite postselection vector".into(),
            });
        }
        let v = phi.map(|z| z / norm);
        Self::new(&v * v.adjoint())
    }

    /// No postselection: the identity.
    pub fn identity(dim: usize) -> Self {
        Self {
            op: linalg::identity(dim),
            max_eigenvalue: 1.0,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.nrows()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.max_eigenvalue
    }

    /// Whether all eigenvalues are ≤ 1 (within tolerance), i.e. the operator
    /// can be part of a POVM.
    pub fn povm_bounded(&self) -> bool {
        self.max_eigenvalue <= 1.0 + tolerances::STATE_NEGATIVITY
    }

    /// Whether the postselection is effectively rank one.
    pub fn is_rank_one(&self) -> bool {
        let tr = linalg::trace(&self.op).re;
        if tr <= 0.0 {
            return false;
        }
        let purity = linalg::trace_product(&self.op, &self.op).re / (tr * tr);
        purity >= 1.0 - 1e-10
    }
}
