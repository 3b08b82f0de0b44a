//! Conformal parameterization of triangle meshes with holes.
//!
//! Surfaces with one hole map onto a planar annulus with unit outer radius
//! ([`acm`]); surfaces with `k` holes map onto the unit disk with `k` circular
//! holes ([`pacm`]). Both pipelines finish with a quasi-conformal correction
//! that drives the Beltrami coefficient of the result towards zero.

pub mod acm;
pub mod beltrami;
pub mod error;
pub mod flatten;
pub mod lbs;
pub mod mesh;
pub mod metrics;
pub mod mobius;
pub mod obj;
pub mod pacm;
pub mod register;
pub mod sparse;
pub mod surgery;
pub mod synth;

pub use acm::{acm, acm_with, AcmOptions, AnnulusResult};
pub use beltrami::BeltramiField;
pub use error::{Error, Result};
pub use lbs::{lbs_solve, ConstraintSet};
pub use mesh::{PlanarMesh, TriMesh};
pub use pacm::{pacm, pacm_with, CircularDomain, PacmOptions};
