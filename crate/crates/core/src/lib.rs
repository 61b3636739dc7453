//! Verification toolkit for C*-algebra valued metric spaces.
//!
//! The crate models a handful of concrete ordered *-algebras (matrices under
//! the entrywise or Loewner order, real tuples, step functions), the metric
//! spaces built on top of them, circles `C(x0, r) = {x : d(x, x0) = r}`, and
//! mechanical checkers for the fixed-circle existence and uniqueness
//! conditions together with the classical contraction conditions they build on.
//!
//! Everything is evaluated at desk scale: universally quantified statements
//! are checked over explicit circle members and deterministic seeded samples.

pub mod algebra;
pub mod circle;
pub mod error;
pub mod par;
pub mod scenario;
pub mod space;
pub mod spectral;
pub mod theorems;

pub use algebra::{AlgebraDescriptor, AlgebraKind, Element, OrderVerdict, Relation};
pub use circle::{on_circle, solve_circle, Circle, Membership};
pub use error::{Error, Result};
pub use space::{
    apply_mapping, distance, sample_points, Point, Region, Rule, SampleSet, SelfMapping,
    SpaceInstance, SpaceKind,
};

/// Version string embedded in run reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
