//! Difference-of-convex (DC) analysis for piecewise-linear and positively
//! homogeneous functions on the plane, plus derivative-variation diagnostics
//! for general Lipschitz functions.
//!
//! The crate is organised around a small pipeline:
//!
//! - [`geometry`] — curves with natural (arc-length) parametrization, convex
//!   hulls and polygons;
//! - [`pwl`] — piecewise-linear function representations: triangulated meshes
//!   and positively homogeneous sector fans, with dihedral-edge enumeration;
//! - [`decompose`] — the Aleksandrov convex-dihedral-angle summation that
//!   splits a PWL function into a difference of two convex PWL functions;
//! - [`variation`] — total variation of the derivative along curves, turn of
//!   lifted curves, and the 1-D cumulative decomposition;
//! - [`homogeneous`] — radial lifts, degree-1 ↔ degree-m conversion and the
//!   fan-based DC pipeline for positively homogeneous functions;
//! - [`dctest`] — DC-representability diagnostics over curve families, mesh
//!   refinement studies and quasidifferential sequence tests;
//! - [`builtins`] — the named test functions exposed through the CLI.

pub mod builtins;
pub mod dctest;
pub mod decompose;
pub mod geometry;
pub mod homogeneous;
pub mod pwl;
pub mod variation;

/// Library version string.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
