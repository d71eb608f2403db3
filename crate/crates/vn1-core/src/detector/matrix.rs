//! Arbitrary-Hilbert-space detectors: an explicit state, coupling operator
//! and readout operator.

use crate::detector::moments::{OperatorAverages, WeakMoments};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixDetector {
    rho: CMatrix,
    q_op: CMatrix,
    o_op: CMatrix,
}

impl MatrixDetector {
    pub fn new(rho: CMatrix, q_op: CMatrix, o_op: CMatrix) -> Result<Self> {
        let n = rho.nrows();
        linalg::check_density_matrix(&rho, "detector state")?;
        for (m, name) in [(&q_op, "coupling operator"), (&o_op, "readout operator")] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch {
                    left: m.nrows(),
                    right: n,
                });
            }
            linalg::check_hermitian(m, tolerances::HERMITIAN).map_err(|e| Error::InvalidState {
                reason: format!("{name}: {e}"),
            })?;
        }
        Ok(Self { rho, q_op, o_op })
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn state(&self) -> &CMatrix {
        &self.rho
    }

    pub fn coupling_op(&self) -> &CMatrix {
        &self.q_op
    }

    pub fn readout_op(&self) -> &CMatrix {
        &self.o_op
    }

    /// ⟦O⟧ before centering.
    pub fn mean_readout(&self) -> f64 {
        linalg::trace_product(&self.o_op, &self.rho).re
    }

    /// The thirteen scalar averages entering the closed-form results.
    pub fn operator_averages(&self, lambda: f64) -> OperatorAverages {
        operator_averages_for(&self.rho, &self.q_op, &self.o_op, lambda)
    }

    /// Small-λ moments for the explicit readout (centered).
    pub fn weak_moments(&self) -> WeakMoments {
        weak_moments_for(&self.rho, &self.q_op, &self.o_op)
    }
}

/// Operator averages for any (ρ_D, Q, O) triple: s = sin λQ and t = 1 − cos λQ
/// are built spectrally from Q, the readout is centered against ρ_D, and each
/// average is the trace of a Hermitian combination against ρ_D.
pub(crate) fn operator_averages_for(
    rho: &CMatrix,
    q_op: &CMatrix,
    o_op: &CMatrix,
    lambda: f64,
) -> OperatorAverages {
    let n = rho.nrows();
    let (w, v) = linalg::hermitian_eigen(q_op);
    let diag = |f: &dyn Fn(f64) -> f64| {
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            w.iter().map(|&x| C64::new(f(x), 0.0)),
        ));
        &v * d * v.adjoint()
    };
    let s = diag(&|x| (lambda * x).sin());
    let t = diag(&|x| 1.0 - (lambda * x).cos());

    let offset = linalg::trace_product(o_op, rho).re;
    let o = o_op - linalg::identity(n).map(|z| z * offset);

    let mut imag_residue = 0.0f64;
    let mut avg = |m: CMatrix| -> f64 {
        let z = linalg::trace_product(&m, rho);
        imag_residue = imag_residue.max(z.im.abs());
        z.re
    };

    let i = C64::new(0.0, 1.0);
    let os = &o * &s;
    let so = &s * &o;
    let ot = &o * &t;
    let to = &t * &o;
    let sin = avg(s.clone());
    let sin_sq = avg(&s * &s);
    let vers = avg(t.clone());
    let sin_vers = avg(&s * &t);
    let vers_sq = avg(&t * &t);
    let comm_sin = avg((&os - &so).map(|z| z * i));
    let anti_sin = avg(&os + &so);
    let anti_vers = avg(&ot + &to);
    let comm_vers = avg((&ot - &to).map(|z| z * i));
    let sin_o_sin = avg(&so * &s);
    let t_o_s = &to * &s;
    let s_o_t = &so * &t;
    let comm_vers_sin = avg((&t_o_s - &s_o_t).map(|z| z * i));
    let anti_vers_sin = avg(&t_o_s + &s_o_t);
    let vers_o_vers = avg(&to * &t);

    OperatorAverages {
        lambda,
        readout_offset: offset,
        imag_residue,
        sin,
        sin_sq,
        vers,
        sin_vers,
        vers_sq,
        comm_sin,
        anti_sin,
        anti_vers,
        comm_vers,
        sin_o_sin,
        comm_vers_sin,
        anti_vers_sin,
        vers_o_vers,
    }
}

/// Small-λ moments for any (ρ_D, Q, O) triple, readout centered.
pub(crate) fn weak_moments_for(rho: &CMatrix, q_op: &CMatrix, o_op: &CMatrix) -> WeakMoments {
    let n = rho.nrows();
    let offset = linalg::trace_product(o_op, rho).re;
    let o = o_op - linalg::identity(n).map(|z| z * offset);
    let q2 = q_op * q_op;
    let i = C64::new(0.0, 1.0);
    let oq = &o * q_op;
    let qo = q_op * &o;
    let oq2 = &o * &q2;
    let q2o = &q2 * &o;
    let avg = |m: &CMatrix| linalg::trace_product(m, rho).re;
    WeakMoments {
        q: avg(q_op),
        q_sq: avg(&q2),
        comm_q: avg(&(&oq - &qo).map(|z| z * i)),
        anti_q: avg(&(&oq + &qo)),
        anti_q_sq: avg(&(&oq2 + &q2o)),
        comm_q_sq: avg(&(&oq2 - &q2o).map(|z| z * i)),
        q_o_q: avg(&(&qo * q_op)),
    }
}
