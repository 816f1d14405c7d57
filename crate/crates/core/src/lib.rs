//! Numerical laboratory for rotationally symmetric metrics
//! `g = ds² + f(s)² g_{S²}` on the 3-sphere.
//!
//! The crate is `no_std` (with `alloc`) and purely computational: profiles and
//! their geometry ([`warping`], [`geometry`]), generators for the standard
//! families ([`families`]), grid shortest paths ([`distance`]), sequence
//! diagnostics ([`sequence`]) and the intrinsic-flat upper bound ([`swif`]).
//! File formats, reports on disk and the command line live in the `wsl` crate.
#![cfg_attr(not(any(test, feature = "std")), no_std)]
// `!(x > 0.0)` is used on purpose so NaN fails every check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod distance;
pub mod error;
pub mod families;
pub mod geometry;
pub mod grid;
pub mod interp;
pub mod math;
pub mod sequence;
pub mod swif;
pub mod warping;

pub use error::{Error, Result};
pub use geometry::{CriticalKind, CriticalSphere, HypothesisVerdict, RotSymManifold, Tolerances};
pub use grid::GridFunction;
pub use warping::{ClosedForm, WarpingFunction};
