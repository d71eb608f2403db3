//! Operators with eigenvalues in {-1, 0, +1} and the closed-form exponential
//! they admit.
//!
//! Everything downstream rests on the cubic identity `S³ = S`, which turns
//! `exp(iφS)` into the three-term polynomial `1 + i sin(φ) S - (1 - cos φ) S²`.
//! Any Hermitian operator with three equally spaced eigenvalues reduces to
//! this case by an affine shift and rescale.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64, I, ONE};
use crate::tolerances;

/// A validated Hermitian operator satisfying `S³ = S`, dimension 3 or 4.
///
/// Matrices are written in the `S_z` eigenbasis ordered `|+1⟩, |0⟩, |−1⟩`
/// (for the 4-dimensional two-qubit embedding, a scalar singlet block is
/// prepended).
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOperator {
    matrix: CMatrix,
}

/// A validated unitary matrix (`U U† = 1` within [`tolerances::UNITARY`]).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    matrix: CMatrix,
}

impl UnitaryMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let n = matrix.nrows();
        let deviation = linalg::max_abs(&(&matrix * matrix.adjoint() - linalg::identity(n)));
        if deviation > tolerances::UNITARY {
            return Err(Error::InvalidState {
                reason: format!("matrix is not unitary: max |UU† - 1| = {deviation:.3e}"),
            });
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

/// Shift and scale relating an equally spaced spectrum to {-1, 0, +1}:
/// `X = delta_x · S + x2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineSpectrumMap {
    /// Eigenvalue spacing, strictly positive.
    pub delta_x: f64,
    /// Midpoint eigenvalue.
    pub x2: f64,
}

impl AffineSpectrumMap {
    /// Rebuild the original operator from its spin-1 normal form.
    pub fn recompose(&self, s: &SpinOperator) -> CMatrix {
        let n = s.dim();
        s.matrix().map(|z| z * self.delta_x) + linalg::identity(n).map(|z| z * self.x2)
    }
}

/// Standard spin-1 generators in the `|+1⟩, |0⟩, |−1⟩` basis.
pub fn spin1_generators() -> [CMatrix; 3] {
    let h = C64::new(1.0 / 2f64.sqrt(), 0.0);
    let sx = CMatrix::from_row_slice(
        3,
        3,
        &[
            C64::new(0.0, 0.0), h, C64::new(0.0, 0.0),
            h, C64::new(0.0, 0.0), h,
            C64::new(0.0, 0.0), h, C64::new(0.0, 0.0),
        ],
    );
    let ih = I * h;
    let sy = CMatrix::from_row_slice(
        3,
        3,
        &[
            C64::new(0.0, 0.0), -ih, C64::new(0.0, 0.0),
            ih, C64::new(0.0, 0.0), -ih,
            C64::new(0.0, 0.0), ih, C64::new(0.0, 0.0),
        ],
    );
    let sz = CMatrix::from_diagonal(&CVector::from_vec(vec![
        ONE,
        C64::new(0.0, 0.0),
        -ONE,
    ]));
    [sx, sy, sz]
}

impl SpinOperator {
    /// Spin-1 component along a unit axis: `n_x S_x + n_y S_y + n_z S_z`.
    pub fn from_axis(axis: [f64; 3]) -> Result<Self> {
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NonUnitAxis { norm });
        }
        let [sx, sy, sz] = spin1_generators();
        let m = sx.map(|z| z * axis[0]) + sy.map(|z| z * axis[1]) + sz.map(|z| z * axis[2]);
        Self::validate(m)
    }

    /// Accept any square matrix that is Hermitian, satisfies `S³ = S`, and has
    /// eigenvalues within [`tolerances::SPIN_EIGENVALUE`] of {-1, 0, +1}.
    pub fn validate(matrix: CMatrix) -> Result<Self> {
        let n = matrix.nrows();
        if n != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                left: n,
                right: matrix.ncols(),
            });
        }
        if n != 3 && n != 4 {
            return Err(Error::UnsupportedDimension {
                dim: n,
                expected: "3 or 4",
            });
        }
        check_spin_conditions(&matrix)?;
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `S²`.
    pub fn squared(&self) -> CMatrix {
        &self.matrix * &self.matrix
    }

    /// `exp(iφS) = 1 + i sin(φ) S − (1 − cos φ) S²`, exactly.
    pub fn exp_phi(&self, phi: f64) -> UnitaryMatrix {
        UnitaryMatrix {
            matrix: exp_phi_matrix(&self.matrix, &self.squared(), phi),
        }
    }

    /// Lift a 3-dimensional operator to the two-qubit total-spin block form:
    /// a scalar 0 on the singlet sector followed by the triplet block.
    pub fn embed_two_qubit(&self) -> Result<SpinOperator> {
        if self.dim() != 3 {
            return Err(Error::UnsupportedDimension {
                dim: self.dim(),
                expected: "3",
            });
        }
        let mut m = CMatrix::zeros(4, 4);
        m.view_mut((1, 1), (3, 3)).copy_from(&self.matrix);
        Ok(SpinOperator { matrix: m })
    }
}

/// The exponential polynomial without revalidation; `s2` must equal `s·s`.
pub(crate) fn exp_phi_matrix(s: &CMatrix, s2: &CMatrix, phi: f64) -> CMatrix {
    let n = s.nrows();
    linalg::identity(n) + s.map(|z| z * I * phi.sin()) - s2.map(|z| z * (1.0 - phi.cos()))
}

fn check_spin_conditions(m: &CMatrix) -> Result<()> {
    check_cubic_identity(m)?;
    for &w in linalg::hermitian_eigenvalues(m).iter() {
        let dist = (w + 1.0).abs().min(w.abs()).min((w - 1.0).abs());
        if dist > tolerances::SPIN_EIGENVALUE {
            return Err(Error::EigenvalueOutsideSpinSet {
                value: w,
                tol: tolerances::SPIN_EIGENVALUE,
            });
        }
    }
    Ok(())
}

fn check_cubic_identity(m: &CMatrix) -> Result<()> {
    linalg::check_hermitian(m, tolerances::HERMITIAN)?;
    let m3 = m * m * m;
    let deviation = linalg::max_abs(&(m3 - m));
    if deviation > tolerances::CUBIC_IDENTITY {
        return Err(Error::CubicIdentityViolated { deviation });
    }
    Ok(())
}

/// Split a Hermitian operator with three equally spaced eigenvalues
/// `x₁ < x₂ < x₃` into `(map, S)` with `X = map.delta_x · S + map.x2`.
pub fn affine_decompose(x: &CMatrix) -> Result<(AffineSpectrumMap, SpinOperator)> {
    linalg::check_hermitian(x, tolerances::HERMITIAN)?;
    if x.nrows() != 3 {
        return Err(Error::UnsupportedDimension {
            dim: x.nrows(),
            expected: "3",
        });
    }
    let w = linalg::hermitian_eigenvalues(x);
    let (x1, x2, x3) = (w[0], w[1], w[2]);
    let gap_low = x2 - x1;
    let gap_high = x3 - x2;
    let spread = x3 - x1;
    if spread <= 0.0 {
        return Err(Error::DegenerateSpectrum);
    }
    if (gap_low - gap_high).abs() > tolerances::SPACING_RELATIVE * spread {
        return Err(Error::UnequalSpacing { gap_low, gap_high });
    }
    let delta_x = spread / 2.0;
    let map = AffineSpectrumMap { delta_x, x2 };
    let s = (x - linalg::identity(3).map(|z| z * x2)).map(|z| z / delta_x);
    Ok((map, SpinOperator::validate(s)?))
}
