//! Concrete dynamical systems with exact point arithmetic.

pub mod linalg;
mod point;
mod system;
pub mod words;

pub use point::{pseudo_orbit_jumps, validate_pseudo_orbit, Point, PseudoOrbit};
pub use system::{common_prefix_len, AspConstants, SystemDescriptor, SystemKind};
