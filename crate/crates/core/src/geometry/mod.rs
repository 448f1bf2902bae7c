//! Convex geometry in chart coordinates.
//!
//! Convex bodies are polytopes in vertex + halfspace form; smooth bodies
//! enter as polygonal approximations. This keeps support functions, widths,
//! and polar duals exact and avoids a tolerance cascade.

mod cones;
mod ellipsoid;
mod polar;
pub mod polytope;
mod simplex;
mod support;

pub use cones::{inward_normal, normal_cone, InwardNormal, NormalConeGenerators};
pub use ellipsoid::{john_ellipsoid, john_ellipsoid_with, mvee, unit_ball_volume, Ellipsoid};
pub use polar::{
    dual_volume_bound, halfspace_intersection_vertices, polar_dual, DualVolumeBound, PolarDual,
};
pub use polytope::{Polytope, PolytopeJson};
pub use support::{
    bishop_phelps, supporting_plane_distance, width_segment, BishopPhelpsWitness, WidthSegment,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("input contains no points")]
    EmptyInput,
    #[error("input is non-finite or inconsistent")]
    NonFinite,
    #[error("body is degenerate for this operation")]
    DegenerateBody,
    #[error("iteration did not converge within {0} steps")]
    NoConvergence(usize),
    #[error("point lies outside the body by {0:.3e}")]
    PointOutside(f64),
    #[error("not a vertex of the polytope: {0}")]
    NotAVertex(String),
    #[error("no Bishop-Phelps witness found; this indicates a geometry bug")]
    NoWitness,
    #[error("strict normal cone is empty at the requested vertex")]
    NotExposed,
    #[error("linear program failed: {0}")]
    Lp(String),
}
