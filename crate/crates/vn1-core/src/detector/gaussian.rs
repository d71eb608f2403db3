//! Mixed Gaussian detector states described by their phase-space moments.
//!
//! The Wigner function is the bivariate normal with mean (Q̄, P̄) and
//! covariance [[σ_Q², cov], [cov, σ_P²]]. Such a Wigner function belongs to a
//! valid quantum state exactly when σ_P²σ_Q² − cov² ≥ 1/4. Quasi-averages of
//! trigonometric moments follow from the characteristic function
//! ⟦e^{iaλQ}⟧ = exp(iaλQ̄ − a²λ²σ_Q²/2) and
//! ⟦δP e^{iaλQ}⟧ = iaλ·cov·⟦e^{iaλQ}⟧; a slow 2-D quadrature over the same
//! Wigner density serves as an independent oracle for them.

use crate::detector::moments::{DetectorMoments, WeakMoments};
use crate::error::{Error, Result};
use crate::tolerances;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianDetector {
    pub mean_q: f64,
    pub mean_p: f64,
    pub sigma_q: f64,
    pub sigma_p: f64,
    pub cov_qp: f64,
}

/// Grid for the quadrature oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Points per axis (odd keeps the mean on the grid).
    pub points_per_axis: usize,
    /// Half-width of the integration box in standard deviations.
    pub half_width_sigmas: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            points_per_axis: 1001,
            half_width_sigmas: 8.0,
        }
    }
}

/// Quadrature moments with a self-estimated accuracy flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureMoments {
    pub moments: DetectorMoments,
    /// Largest change when halving the resolution.
    pub refinement_delta: f64,
    /// Set when the refinement delta suggests the grid is too coarse.
    pub coarse_grid: bool,
}

impl GaussianDetector {
    pub fn new(mean_q: f64, mean_p: f64, sigma_q: f64, sigma_p: f64, cov_qp: f64) -> Result<Self> {
        for (value, context) in [
            (mean_q, "mean_q"),
            (mean_p, "mean_p"),
            (sigma_q, "sigma_q"),
            (sigma_p, "sigma_p"),
            (cov_qp, "cov_qp"),
        ] {
            if !value.is_finite() {
                return Err(Error::NotFinite { context });
            }
        }
        if sigma_q <= 0.0 || sigma_p <= 0.0 {
            return Err(Error::InvalidState {
                reason: format!("standard deviations must be positive: σ_Q={sigma_q}, σ_P={sigma_p}"),
            });
        }
        let det = sigma_p * sigma_p * sigma_q * sigma_q - cov_qp * cov_qp;
        if det < 0.25 - tolerances::UNCERTAINTY {
            return Err(Error::UncertaintyViolated { value: det });
        }
        Ok(Self {
            mean_q,
            mean_p,
            sigma_q,
            sigma_p,
            cov_qp,
        })
    }

    /// Coherence scale of the readout basis, δP = 1/(2σ_Q). Always ≤ σ_P.
    pub fn coherence_scale(&self) -> f64 {
        1.0 / (2.0 * self.sigma_q)
    }

    /// Analytic quasi-averages at coupling λ (readout centered on P̄).
    pub fn moments(&self, lambda: f64) -> DetectorMoments {
        let chi = |a: f64| -> (f64, f64) {
            let amp = (-a * a * lambda * lambda * self.sigma_q * self.sigma_q / 2.0).exp();
            let phase = a * lambda * self.mean_q;
            (amp * phase.cos(), amp * phase.sin())
        };
        let (c1, s1) = chi(1.0);
        let (c2, s2) = chi(2.0);
        // ⟦δP e^{iaλQ}⟧ = iaλ·cov·χ(a)
        let k1 = lambda * self.cov_qp;
        let k2 = 2.0 * lambda * self.cov_qp;
        DetectorMoments::from_base(
            lambda,
            self.mean_p,
            c1,
            s1,
            c2,
            s2,
            -k1 * s1,
            k1 * c1,
            -k2 * s2,
            k2 * c2,
            0.0,
        )
    }

    /// Quasi-averages by 2-D quadrature over the Wigner density. Composites
    /// are integrated directly rather than reconstructed, so comparing
    /// against [`GaussianDetector::moments`] exercises both the base moments
    /// and the double-angle identities.
    pub fn moments_quadrature(&self, lambda: f64, spec: QuadratureSpec) -> QuadratureMoments {
        let full = self.quadrature_pass(lambda, spec.points_per_axis, spec.half_width_sigmas);
        let halved = self.quadrature_pass(
            lambda,
            spec.points_per_axis / 2 + 1,
            spec.half_width_sigmas,
        );
        let refinement_delta = full.max_difference(&halved);
        QuadratureMoments {
            moments: full,
            refinement_delta,
            coarse_grid: refinement_delta > 1e-9,
        }
    }

    fn quadrature_pass(&self, lambda: f64, n: usize, half_width: f64) -> DetectorMoments {
        let n = n.max(3);
        let (q0, p0) = (self.mean_q, self.mean_p);
        let (sq, sp) = (self.sigma_q, self.sigma_p);
        let rho = self.cov_qp / (sq * sp);
        let one_minus_rho2 = (1.0 - rho * rho).max(1e-300);
        let norm = 1.0 / (2.0 * std::f64::consts::PI * sq * sp * one_minus_rho2.sqrt());

        let hq = 2.0 * half_width * sq / (n - 1) as f64;
        let hp = 2.0 * half_width * sp / (n - 1) as f64;

        // trapezoid weights: 1/2 at the ends
        let edge = |idx: usize| if idx == 0 || idx == n - 1 { 0.5 } else { 1.0 };

        let mut acc = [0.0f64; 18];
        for i in 0..n {
            let q = q0 - half_width * sq + i as f64 * hq;
            let (uq, wq) = ((q - q0) / sq, edge(i));
            let (s1, c1) = (lambda * q).sin_cos();
            let (s2, c2) = (2.0 * lambda * q).sin_cos();
            let vers = 1.0 - c1;
            for j in 0..n {
                let p = p0 - half_width * sp + j as f64 * hp;
                let up = (p - p0) / sp;
                let z = (uq * uq - 2.0 * rho * uq * up + up * up) / (2.0 * one_minus_rho2);
                let w = wq * edge(j) * norm * (-z).exp() * hq * hp;
                let dp = p - p0;
                let wp = w * dp;
                acc[0] += w * c1;
                acc[1] += w * s1;
                acc[2] += w * c2;
                acc[3] += w * s2;
                acc[4] += wp * c1;
                acc[5] += wp * s1;
                acc[6] += wp * c2;
                acc[7] += wp * s2;
                acc[8] += wp;
                acc[9] += w * s1 * s1;
                acc[10] += w * vers;
                acc[11] += w * vers * vers;
                acc[12] += w * s1 * vers;
                acc[13] += w * c1 * vers;
                acc[14] += wp * s1 * s1;
                acc[15] += wp * vers;
                acc[16] += wp * s1 * vers;
                acc[17] += wp * vers * vers;
            }
        }

        DetectorMoments {
            lambda,
            readout_offset: p0,
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

    /// Small-λ moments for the canonical readout P (centered).
    pub fn weak_moments_p(&self) -> WeakMoments {
        WeakMoments {
            q: self.mean_q,
            q_sq: self.sigma_q * self.sigma_q + self.mean_q * self.mean_q,
            comm_q: 1.0,
            anti_q: 2.0 * self.cov_qp,
            anti_q_sq: 4.0 * self.mean_q * self.cov_qp,
            comm_q_sq: 2.0 * self.mean_q,
            q_o_q: 2.0 * self.mean_q * self.cov_qp,
        }
    }

    /// Small-λ moments for reading out the coupling variable itself
    /// (O = Q − Q̄).
    pub fn weak_moments_q(&self) -> WeakMoments {
        let var = self.sigma_q * self.sigma_q;
        WeakMoments {
            q: self.mean_q,
            q_sq: var + self.mean_q * self.mean_q,
            comm_q: 0.0,
            anti_q: 2.0 * var,
            anti_q_sq: 4.0 * self.mean_q * var,
            comm_q_sq: 0.0,
            q_o_q: 2.0 * self.mean_q * var,
        }
    }

    /// Central absolute moment ⟦|Q − Q̄|ⁿ⟧ in closed form:
    /// σⁿ·2^{n/2}·Γ((n+1)/2)/√π.
    pub fn abs_central_moment_q(&self, n: u32) -> f64 {
        let sigma_pow = self.sigma_q.powi(n as i32);
        if n % 2 == 0 {
            // (n-1)!! σⁿ
            let mut acc = 1.0;
            let mut k = n as i64 - 1;
            while k > 1 {
                acc *= k as f64;
                k -= 2;
            }
            sigma_pow * acc
        } else {
            // σⁿ 2^{n/2} ((n−1)/2)! / √π
            let mut fact = 1.0;
            for k in 2..=((n - 1) / 2) as i64 {
                fact *= k as f64;
            }
            sigma_pow * 2f64.powf(n as f64 / 2.0) * fact / std::f64::consts::PI.sqrt()
        }
    }
}
