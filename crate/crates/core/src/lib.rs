//! Rotationally invariant states of two spins.
//!
//! States on `C^n1 ⊗ C^n2` that commute with all product rotations are
//! described by `n1` real coordinates, either `α` (projectors onto total
//! angular momentum) or `β` (invariant tensor operators). This crate
//! converts between them exactly, applies partial time reversal and the
//! Breuer map, classifies states, reproduces the closed-form geometry of
//! the PPT and bound-entangled regions, and cross-checks everything against
//! dense matrices.

pub mod dense;
pub mod error;
pub mod geometry;
pub mod maps;
pub mod radical;
pub mod repr;
pub mod spin;
pub mod verify;
pub mod wigner;

pub use error::{Error, Result};
pub use maps::{classify, Classification, PureProductState, Verdict};
pub use radical::ExactRadical;
pub use repr::{alpha_to_beta, beta_to_alpha, AlphaVector, BetaVector, LMatrix, SpinPair, DEFAULT_TOL};
pub use spin::HalfInt;
