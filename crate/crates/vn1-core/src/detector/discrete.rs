//! Finite-dimensional canonical detectors.
//!
//! The readout P has eigenstates |j⟩, j ∈ {−J, …, J} with d = 2J + 1, and
//! eigenvalues j/√d. Its conjugate partner Q is diagonal in the Fourier basis
//! |k̃⟩ = d^{-1/2} Σ_j e^{-2πijk/d} |j⟩. With eigenvalues Q_k = 2πk/d the
//! exponential exp(iQ) is exactly the cyclic translation T, including the
//! (−1)^{d−1} wrap sign, so integer coupling translates pointer states
//! cleanly. (An alternative labelling Q_k = 2πk/√d appears in parts of the
//! literature but is incompatible with exp(iQ) = T; it is kept here only as a
//! reporting scale on the Wigner table.)

use crate::detector::matrix::operator_averages_for;
use crate::detector::moments::{DetectorMoments, OperatorAverages, WeakMoments};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64};

/// Position of index i in the symmetric ladder: j = i − J (half-integer for
/// even d).
fn ladder_value(d: usize, i: usize) -> f64 {
    i as f64 - (d as f64 - 1.0) / 2.0
}

/// Cyclic translation by one pointer state: T|j⟩ = (−1)^{(d−1)·wrap} |j ⊕ 1⟩.
pub fn translation_operator(d: usize) -> CMatrix {
    assert!(d >= 2, "translation needs d >= 2");
    let wrap_sign = if d % 2 == 0 { -1.0 } else { 1.0 };
    let mut t = CMatrix::zeros(d, d);
    for i in 0..d {
        let (dst, sign) = if i + 1 == d { (0, wrap_sign) } else { (i + 1, 1.0) };
        t[(dst, i)] = C64::new(sign, 0.0);
    }
    t
}

/// Fourier basis: column k of the result is |k̃⟩ expressed over |j⟩.
pub fn fourier_basis(d: usize) -> CMatrix {
    let mut f = CMatrix::zeros(d, d);
    let scale = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        let j = ladder_value(d, i);
        for l in 0..d {
            let k = ladder_value(d, l);
            let phase = -2.0 * std::f64::consts::PI * j * k / d as f64;
            f[(i, l)] = C64::new(phase.cos() * scale, phase.sin() * scale);
        }
    }
    f
}

/// The conjugate pair (P, Q): P diagonal with entries j/√d, Q diagonal in the
/// Fourier basis with entries 2πk/d, so that exp(iQ) equals
/// [`translation_operator`].
pub fn discrete_conjugate_pair(d: usize) -> (CMatrix, CMatrix) {
    assert!(d >= 3, "canonical discrete detectors need d >= 3");
    let p = CMatrix::from_diagonal(&CVector::from_iterator(
        d,
        (0..d).map(|i| C64::new(ladder_value(d, i) / (d as f64).sqrt(), 0.0)),
    ));
    let f = fourier_basis(d);
    let q_diag = CMatrix::from_diagonal(&CVector::from_iterator(
        d,
        (0..d).map(|l| C64::new(2.0 * std::f64::consts::PI * ladder_value(d, l) / d as f64, 0.0)),
    ));
    let q = &f * q_diag * f.adjoint();
    let q = (&q + q.adjoint()).map(|z| z * 0.5);
    (p, q)
}

/// Discrete Wigner table W(P_j, Q_k) = Re[⟨k̃|j⟩⟨j|ρ|k̃⟩] with its labels.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerTable {
    pub d: usize,
    /// Row-major over (j, k).
    pub values: Vec<f64>,
    /// P eigenvalues j/√d.
    pub p_values: Vec<f64>,
    /// Q eigenvalues 2πk/d (translation-consistent convention).
    pub q_values: Vec<f64>,
    /// The alternative 2πk/√d labelling, for reporting only.
    pub q_values_root_scale: Vec<f64>,
}

impl WignerTable {
    pub fn value(&self, j: usize, k: usize) -> f64 {
        self.values[j * self.d + k]
    }

    /// Marginal over Q: should equal ⟨j|ρ|j⟩.
    pub fn p_marginal(&self, j: usize) -> f64 {
        (0..self.d).map(|k| self.value(j, k)).sum()
    }

    /// Marginal over P: should equal ⟨k̃|ρ|k̃⟩.
    pub fn q_marginal(&self, k: usize) -> f64 {
        (0..self.d).map(|j| self.value(j, k)).sum()
    }
}

/// A d-dimensional detector state read out in the pointer basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCanonicalDetector {
    d: usize,
    rho: CMatrix,
}

impl DiscreteCanonicalDetector {
    pub fn new(d: usize, rho: CMatrix) -> Result<Self> {
        if d < 3 {
            return Err(Error::UnsupportedDimension {
                dim: d,
                expected: "at least 3",
            });
        }
        if rho.nrows() != d {
            return Err(Error::DimensionMismatch {
                left: rho.nrows(),
                right: d,
            });
        }
        linalg::check_density_matrix(&rho, "detector state")?;
        Ok(Self { d, rho })
    }

    /// Pointer eigenstate |j⟩ at ladder index i ∈ 0..d (i = 0 is j = −J).
    pub fn pointer_state(d: usize, index: usize) -> Result<Self> {
        if index >= d {
            return Err(Error::DimensionMismatch {
                left: index,
                right: d,
            });
        }
        let mut rho = CMatrix::zeros(d, d);
        rho[(index, index)] = C64::new(1.0, 0.0);
        Self::new(d, rho)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn state(&self) -> &CMatrix {
        &self.rho
    }

    pub fn conjugate_pair(&self) -> (CMatrix, CMatrix) {
        discrete_conjugate_pair(self.d)
    }

    /// Mean pointer reading ⟦P⟧.
    pub fn mean_readout(&self) -> f64 {
        (0..self.d)
            .map(|i| ladder_value(self.d, i) / (self.d as f64).sqrt() * self.rho[(i, i)].re)
            .sum()
    }

    pub fn wigner(&self) -> WignerTable {
        let d = self.d;
        let f = fourier_basis(d);
        let mut values = vec![0.0; d * d];
        for j in 0..d {
            for k in 0..d {
                // ⟨k̃|j⟩ ⟨j|ρ|k̃⟩
                let bra_j: C64 = f[(j, k)].conj();
                let mut row = C64::new(0.0, 0.0);
                for l in 0..d {
                    row += self.rho[(j, l)] * f[(l, k)];
                }
                values[j * d + k] = (bra_j * row).re;
            }
        }
        let root_d = (d as f64).sqrt();
        WignerTable {
            d,
            values,
            p_values: (0..d).map(|i| ladder_value(d, i) / root_d).collect(),
            q_values: (0..d)
                .map(|l| 2.0 * std::f64::consts::PI * ladder_value(d, l) / d as f64)
                .collect(),
            q_values_root_scale: (0..d)
                .map(|l| 2.0 * std::f64::consts::PI * ladder_value(d, l) / root_d)
                .collect(),
        }
    }

    /// Quasi-averages at coupling λ as plain Wigner sums
    /// Σ_{j,k} W(P_j, Q_k) f(P_j, Q_k), with the readout centered.
    ///
    /// Exact for every function of Q alone (the Wigner marginals are the
    /// exact basis distributions); the P-weighted sums reproduce symmetrized
    /// operator averages. See [`DiscreteCanonicalDetector::operator_averages`]
    /// for the exact readout route.
    pub fn moments(&self, lambda: f64) -> DetectorMoments {
        let w = self.wigner();
        let offset = self.mean_readout();
        let mut acc = [0.0f64; 18];
        for j in 0..self.d {
            let dp = w.p_values[j] - offset;
            for k in 0..self.d {
                let weight = w.value(j, k);
                let q = w.q_values[k];
                let (s1, c1) = (lambda * q).sin_cos();
                let (s2, c2) = (2.0 * lambda * q).sin_cos();
                let vers = 1.0 - c1;
                let wp = weight * dp;
                acc[0] += weight * c1;
                acc[1] += weight * s1;
                acc[2] += weight * c2;
                acc[3] += weight * s2;
                acc[4] += wp * c1;
                acc[5] += wp * s1;
                acc[6] += wp * c2;
                acc[7] += wp * s2;
                acc[8] += wp;
                acc[9] += weight * s1 * s1;
                acc[10] += weight * vers;
                acc[11] += weight * vers * vers;
                acc[12] += weight * s1 * vers;
                acc[13] += weight * c1 * vers;
                acc[14] += wp * s1 * s1;
                acc[15] += wp * vers;
                acc[16] += wp * s1 * vers;
                acc[17] += wp * vers * vers;
            }
        }
        DetectorMoments {
            lambda,
            readout_offset: offset,
            m_cos: acc[0],
            m_sin: acc[1],
            m_cos2: acc[2],
            m_sin2: acc[3],
            m_p_cos: acc[4],
            m_p_sin: acc[5],
            m_p_cos2q: acc[6],
            m_p_sin2q: acc[7],
            m_p: acc[8],
            sin_sq: acc[9],
            vers: acc[10],
            vers_sq: acc[11],
            sin_vers: acc[12],
            cos_vers: acc[13],
            p_sin_sq: acc[14],
            p_vers: acc[15],
            p_sin_vers: acc[16],
            p_vers_sq: acc[17],
        }
    }

    /// Exact operator averages for the pointer readout P at coupling λ.
    pub fn operator_averages(&self, lambda: f64) -> OperatorAverages {
        let (p, q) = self.conjugate_pair();
        operator_averages_for(&self.rho, &q, &p, lambda)
    }

    /// Small-λ moments for the pointer readout (centered), by direct traces.
    pub fn weak_moments(&self) -> WeakMoments {
        let (p, q) = self.conjugate_pair();
        crate::detector::matrix::weak_moments_for(&self.rho, &q, &p)
    }
}
