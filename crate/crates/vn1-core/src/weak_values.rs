//! The overlap ω and the five generalized weak values, with the special-case
//! classification of postselected spin-1 setups.
//!
//! For preparation ρ_i, postselection E_f and observable S:
//!
//! ```text
//! ω   = Tr[E_f ρ_i]
//! A_w = Tr[E_f S  ρ_i    ] / ω      B_w = Tr[E_f S  ρ_i S ] / ω
//! C_w = Tr[E_f S² ρ_i    ] / ω      D_w = Tr[E_f S  ρ_i S²] / ω
//! E_w = Tr[E_f S² ρ_i S²] / ω
//! ```
//!
//! B_w and E_w are real and nonnegative; A_w, C_w, D_w are complex. No
//! assumption is made about the coupling strength.

use crate::error::{Error, Result};
use crate::linalg::{self, C64};
#[cfg(test)]
use crate::linalg::CMatrix;
use crate::spin::SpinOperator;
use crate::states::{Postselection, SystemState};
use crate::tolerances;

/// Overlap between preparation and postselection, `Tr[E_f ρ_i]`.
pub fn fidelity(rho: &SystemState, post: &Postselection) -> Result<f64> {
    if rho.dim() != post.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: post.dim(),
        });
    }
    Ok(linalg::trace_product(post.matrix(), rho.matrix()).re)
}

/// The record (ω, A_w, B_w, C_w, D_w, E_w).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakValues {
    pub omega: f64,
    pub a_w: C64,
    pub b_w: f64,
    pub c_w: C64,
    pub d_w: C64,
    pub e_w: f64,
}

/// ω-multiplied weak values; finite even for orthogonal preparation and
/// postselection, where the normalized values diverge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnnormalizedWeakValues {
    pub omega: f64,
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
    pub e: C64,
}

impl UnnormalizedWeakValues {
    fn compute(rho: &SystemState, post: &Postselection, s: &SpinOperator) -> Result<Self> {
        if rho.dim() != s.dim() || post.dim() != s.dim() {
            return Err(Error::DimensionMismatch {
                left: rho.dim().max(post.dim()),
                right: s.dim(),
            });
        }
        let e_f = post.matrix();
        let r = rho.matrix();
        let sm = s.matrix();
        let s2 = s.squared();
        let sr = sm * r;
        let s2r = &s2 * r;
        Ok(Self {
            omega: linalg::trace_product(e_f, r).re,
            a: linalg::trace_product(e_f, &sr),
            b: linalg::trace_product(e_f, &(&sr * sm)),
            c: linalg::trace_product(e_f, &s2r),
            d: linalg::trace_product(e_f, &(&sr * &s2)),
            e: linalg::trace_product(e_f, &(&s2r * &s2)),
        })
    }

    /// Normalize by ω; fails when ω is at or below `floor`.
    pub fn normalized(&self, floor: f64) -> Result<WeakValues> {
        if self.omega <= floor {
            return Err(Error::OrthogonalPostselection {
                omega: self.omega,
                floor,
            });
        }
        let om = self.omega;
        Ok(WeakValues {
            omega: om,
            a_w: self.a / om,
            b_w: self.b.re / om,
            c_w: self.c / om,
            d_w: self.d / om,
            e_w: self.e.re / om,
        })
    }
}

/// Weak values with the default orthogonality floor.
pub fn weak_values(
    rho: &SystemState,
    post: &Postselection,
    s: &SpinOperator,
) -> Result<WeakValues> {
    weak_values_with_floor(rho, post, s, tolerances::OMEGA_FLOOR)
}

pub fn weak_values_with_floor(
    rho: &SystemState,
    post: &Postselection,
    s: &SpinOperator,
    floor: f64,
) -> Result<WeakValues> {
    UnnormalizedWeakValues::compute(rho, post, s)?.normalized(floor)
}

/// ω-multiplied traces, defined for any overlap including zero.
pub fn weak_values_unnormalized(
    rho: &SystemState,
    post: &Postselection,
    s: &SpinOperator,
) -> Result<UnnormalizedWeakValues> {
    UnnormalizedWeakValues::compute(rho, post, s)
}

/// Which structural special case a setup falls into.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SpecialCaseFlags {
    /// S² = 1: the operator behaves like a spin-1/2.
    pub spin_half_like: bool,
    /// E_f or ρ_i commutes with S.
    pub commutes_with_s: bool,
    /// E_f or ρ_i commutes with S² but the stronger condition fails.
    pub commutes_with_s_squared: bool,
    /// Both preparation and postselection are rank one.
    pub pure_pure: bool,
}

/// Residuals of the identities implied by S² = 1:
/// C_w = 1, D_w = A_w, E_w = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinHalfResiduals {
    pub c_minus_one: f64,
    pub d_minus_a: f64,
    pub e_minus_one: f64,
}

/// Residuals when E_f or ρ_i commutes with S: all weak values real,
/// C_w = E_w = B_w, D_w = A_w.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutingResiduals {
    pub max_imaginary: f64,
    pub c_minus_b: f64,
    pub e_minus_b: f64,
    pub d_minus_a: f64,
}

/// Residuals when E_f or ρ_i commutes with S² only: C_w real, D_w = A_w,
/// E_w = C_w.
///
/// E_w = C_w follows from S⁴ = S²: moving ρ_i (or E_f) past S² collapses
/// `Tr[E_f S²ρ_i S²]` onto `Tr[E_f S²ρ_i]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SSquaredCommutingResiduals {
    pub c_imaginary: f64,
    pub d_minus_a: f64,
    pub e_minus_c: f64,
}

/// Residuals for rank-one preparation and postselection:
/// B_w = |A_w|², E_w = |C_w|², D_w = A_w C_w*.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurePureResiduals {
    pub b_minus_a_sq: f64,
    pub e_minus_c_sq: f64,
    pub d_minus_a_cstar: f64,
}

/// Classification plus the residuals of every identity set. Residuals are
/// always computed so borderline setups stay inspectable; flags are set only
/// when the structural test passes the commutator threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialCaseReport {
    pub flags: SpecialCaseFlags,
    pub spin_half: SpinHalfResiduals,
    pub commuting: CommutingResiduals,
    pub s_squared_commuting: SSquaredCommutingResiduals,
    pub pure_pure: PurePureResiduals,
}

pub fn classify_special_case(
    rho: &SystemState,
    post: &Postselection,
    s: &SpinOperator,
) -> Result<SpecialCaseReport> {
    let wv = weak_values(rho, post, s)?;
    let s2 = s.squared();
    let tol = tolerances::COMMUTATOR;

    let spin_half_like =
        linalg::max_abs(&(&s2 - linalg::identity(s.dim()))) <= tol;
    let commutes_with_s = linalg::commutator_norm(post.matrix(), s.matrix()) <= tol
        || linalg::commutator_norm(rho.matrix(), s.matrix()) <= tol;
    let commutes_with_s_squared = !commutes_with_s
        && (linalg::commutator_norm(post.matrix(), &s2) <= tol
            || linalg::commutator_norm(rho.matrix(), &s2) <= tol);
    let pure_pure = rho.purity() >= 1.0 - 1e-10 && post.is_rank_one();

    let max_imaginary = wv
        .a_w
        .im
        .abs()
        .max(wv.c_w.im.abs())
        .max(wv.d_w.im.abs());

    Ok(SpecialCaseReport {
        flags: SpecialCaseFlags {
            spin_half_like,
            commutes_with_s,
            commutes_with_s_squared,
            pure_pure,
        },
        spin_half: SpinHalfResiduals {
            c_minus_one: (wv.c_w - C64::new(1.0, 0.0)).norm(),
            d_minus_a: (wv.d_w - wv.a_w).norm(),
            e_minus_one: (wv.e_w - 1.0).abs(),
        },
        commuting: CommutingResiduals {
            max_imaginary,
            c_minus_b: (wv.c_w - C64::new(wv.b_w, 0.0)).norm(),
            e_minus_b: (wv.e_w - wv.b_w).abs(),
            d_minus_a: (wv.d_w - wv.a_w).norm(),
        },
        s_squared_commuting: SSquaredCommutingResiduals {
            c_imaginary: wv.c_w.im.abs(),
            d_minus_a: (wv.d_w - wv.a_w).norm(),
            e_minus_c: (C64::new(wv.e_w, 0.0) - wv.c_w).norm(),
        },
        pure_pure: PurePureResiduals {
            b_minus_a_sq: (wv.b_w - wv.a_w.norm_sqr()).abs(),
            e_minus_c_sq: (wv.e_w - wv.c_w.norm_sqr()).abs(),
            d_minus_a_cstar: (wv.d_w - wv.a_w * wv.c_w.conj()).norm(),
        },
    })
}
