//! Weighted ergodic optimization on concrete hyperbolic systems.
//!
//! Given a system `(X, T)`, an observable `u` and a positive weight `ψ`, the
//! crate computes the minimum ratio average `β = min_ν ∫u dν / ∫ψ dν` over
//! invariant measures, sub-actions certifying it, shadowing orbits for
//! periodic pseudo-orbits, periodic orbits whose gap dominates their deviation
//! from a reference set, and perturbations of `u` whose unique minimizing
//! measure is a chosen periodic orbit.

pub mod dynamics;
pub mod construction;
pub mod enumeration;
pub mod error;
pub mod numeric;
pub mod observables;
pub mod par;
pub mod perturbation;
pub mod shadowing;
pub mod subaction;

pub use error::{Error, Result};
