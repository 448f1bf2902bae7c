//! Numerical laboratory for the geometry of cost functions with c-convex
//! potentials.
//!
//! The crate is organized around a pipeline:
//!
//! * [`geometry`] — pure convex geometry in chart coordinates (hulls, polar
//!   duals, John ellipsoids, supporting planes, normal cones).
//! * [`cost`] — the built-in cost functions on box charts, their analytic
//!   derivatives, and structural audits (twist / nondegeneracy).
//! * [`cexp`] — the twist-inverse machinery: momenta, c-exponential maps,
//!   c-segments, coordinate images, dilations.
//! * [`conditions`] — curvature condition checks: the MTW-type tensor,
//!   A3w/A3s/NNCC verdicts, the maximum principle along c-segments, and the
//!   quantitative quasiconvexity constant.
//! * [`cfunc`] — c-functions, semidiscrete c-convex potentials,
//!   c-subdifferentials, sublevel sets, c-polar duals and c-cones.
//! * [`solver`] — semidiscrete optimal transport by damped dual ascent.
//! * [`estimates`] — the sharp-growth and Aleksandrov-type pointwise
//!   estimates, the chopping families used for localization, and the cone
//!   refinement experiment.
//!
//! Everything is deterministic given a seed: samplers derive one RNG stream
//! per sample index, so results do not depend on evaluation order or on the
//! degree of parallelism.

pub mod cexp;
pub mod cfunc;
pub mod conditions;
pub mod cost;
pub mod estimates;
pub mod geometry;
pub mod grid;
pub mod report;
pub mod rng;
pub mod solver;
pub mod tol;

pub use nalgebra::{DMatrix, DVector};

/// Chart coordinates of a point, covector, or momentum.
pub type Vector = DVector<f64>;
/// Dense square matrix in chart coordinates.
pub type Matrix = DMatrix<f64>;
