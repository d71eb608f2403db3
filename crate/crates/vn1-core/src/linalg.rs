//! Dense complex linear algebra helpers shared by the whole crate.
//!
//! Everything here is a thin layer over `nalgebra`: Hermitian
//! eigendecomposition with sorted eigenvalues, spectral calculus, Kronecker
//! products and the partial trace for system ⊗ detector joints, and a
//! scaling-and-squaring matrix exponential used as an independent check on
//! the spectral routes.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tolerances;

pub type C64 = num_complex::Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Largest entry magnitude.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// max |M - M†|.
pub fn hermiticity_error(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn check_hermitian(m: &CMatrix, tol: f64) -> Result<()> {
    let deviation = hermiticity_error(m);
    if deviation > tol {
        return Err(Error::NotHermitian { deviation, tol });
    }
    Ok(())
}

/// max |[A, B]|.
pub fn commutator_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a * b - b * a))
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Tr[A B], without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending and
/// eigenvector columns reordered to match.
pub fn hermitian_eigen(m: &CMatrix) -> (DVector<f64>, CMatrix) {
    let se = m.clone().symmetric_eigen();
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| se.eigenvalues[k]));
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> DVector<f64> {
    let mut v: Vec<f64> = m
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(f64::total_cmp);
    DVector::from_vec(v)
}

/// f(M) for Hermitian M through its eigendecomposition.
pub fn spectral_map(m: &CMatrix, f: impl Fn(f64) -> C64) -> CMatrix {
    let (w, v) = hermitian_eigen(m);
    let d = CMatrix::from_diagonal(&CVector::from_iterator(w.len(), w.iter().map(|&x| f(x))));
    &v * d * v.adjoint()
}

/// Kronecker product ordered system ⊗ detector: index = a·n_det + i.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Partial trace over the system factor of a system ⊗ detector joint.
pub fn partial_trace_system(joint: &CMatrix, n_sys: usize, n_det: usize) -> CMatrix {
    debug_assert_eq!(joint.nrows(), n_sys * n_det);
    let mut out = CMatrix::zeros(n_det, n_det);
    for a in 0..n_sys {
        for i in 0..n_det {
            for j in 0..n_det {
                out[(i, j)] += joint[(a * n_det + i, a * n_det + j)];
            }
        }
    }
    out
}

/// Partial trace over the detector factor.
pub fn partial_trace_detector(joint: &CMatrix, n_sys: usize, n_det: usize) -> CMatrix {
    debug_assert_eq!(joint.nrows(), n_sys * n_det);
    let mut out = CMatrix::zeros(n_sys, n_sys);
    for a in 0..n_sys {
        for b in 0..n_sys {
            for i in 0..n_det {
                out[(a, b)] += joint[(a * n_det + i, b * n_det + i)];
            }
        }
    }
    out
}

/// Dense matrix exponential by scaling and squaring with a Taylor kernel.
///
/// Independent of any eigendecomposition, so it can arbitrate between the
/// spectral routes. Accurate to ~1e-13 for the well-conditioned
/// (skew-Hermitian) arguments used in this crate.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let norm = max_abs(a) * n as f64;
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.map(|z| z / 2f64.powi(squarings as i32));
    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..=30 {
        term = &term * &scaled / C64::new(k as f64, 0.0);
        result += &term;
        if max_abs(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Build a column vector from interleaved (re, im) pairs.
pub fn vector_from_pairs(pairs: &[[f64; 2]]) -> CVector {
    CVector::from_iterator(pairs.len(), pairs.iter().map(|p| C64::new(p[0], p[1])))
}

/// Build a row-major matrix from (re, im) pairs.
pub fn matrix_from_pairs(dim: usize, pairs: &[[f64; 2]]) -> Result<CMatrix> {
    if pairs.len() != dim * dim {
        return Err(Error::DimensionMismatch {
            left: pairs.len(),
            right: dim * dim,
        });
    }
    Ok(CMatrix::from_fn(dim, dim, |i, j| {
        let p = pairs[i * dim + j];
        C64::new(p[0], p[1])
    }))
}

/// Validate that a square matrix is a density matrix within the crate
/// tolerances; returns the most negative eigenvalue found.
pub fn check_density_matrix(m: &CMatrix, what: &str) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            left: m.nrows(),
            right: m.ncols(),
        });
    }
    check_hermitian(m, tolerances::HERMITIAN).map_err(|e| Error::InvalidState {
        reason: format!("{what}: {e}"),
    })?;
    let tr = trace(m);
    if (tr.re - 1.0).abs() > tolerances::STATE_TRACE || tr.im.abs() > tolerances::STATE_TRACE {
        return Err(Error::InvalidState {
            reason: format!("{what}: trace = {tr} instead of 1"),
        });
    }
    let min_eig = hermitian_eigenvalues(m)[0];
    if min_eig < -tolerances::STATE_NEGATIVITY {
        return Err(Error::InvalidState {
            reason: format!("{what}: negative eigenvalue {min_eig:.3e}"),
        });
    }
    Ok(min_eig)
}
