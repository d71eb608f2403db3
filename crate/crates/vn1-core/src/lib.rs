//! Exact simulation of indirect (von Neumann) measurements of spin-1 systems.
//!
//! A detector couples to a system observable `S` (any Hermitian operator with
//! eigenvalues in {-1, 0, +1}) through the unitary `U = exp(i λ Q S)`, where
//! `Q` acts on the detector. The library evaluates the postselected detector
//! statistics three ways:
//!
//! * closed form, for an arbitrary detector and readout ([`engine`]),
//! * closed form, for canonical detectors through phase-space moments of the
//!   detector state ([`detector`]),
//! * brute force, by building the joint state and conjugating it with the
//!   exact unitary ([`oracle`]).
//!
//! The first two are algebraic consequences of `S³ = S`; the oracle never uses
//! them, which makes it an independent ground truth. [`weak_limit`] adds the
//! perturbative expansions valid for small coupling together with their
//! validity diagnostics.
//!
//! Basis convention: spin matrices are written in the `S_z` eigenbasis ordered
//! `|+1⟩, |0⟩, |−1⟩`.

pub mod detector;
pub mod engine;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod spin;
pub mod states;
pub mod tolerances;
pub mod weak_limit;
pub mod weak_values;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, C64};
