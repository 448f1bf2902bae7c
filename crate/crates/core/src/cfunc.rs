//! c-functions, semidiscrete c-convex potentials, their subdifferentials,
//! sublevel sets, c-polar duals, and c-cones.
//!
//! Potentials here are finite maxima of c-functions. That class is closed
//! under every construction below, c-convex by construction, and its
//! subdifferentials are computable exactly as argmax sets.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost::{CostError, CostModel};
use crate::geometry::Polytope;
use crate::grid::{Grid, GridMask};
use crate::{rng, tol, Vector};

#[derive(Debug, Error)]
pub enum CfuncError {
    #[error("sublevel set contains no grid point")]
    EmptySet,
    #[error("boundary sample is empty")]
    EmptyBoundary,
    #[error("no admissible focus on the grid")]
    EmptyAdmissible,
    #[error(transparent)]
    Cost(#[from] CostError),
}

/// `m(x) = -c(x, focus) + offset`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CFunction {
    pub focus: Vector,
    pub offset: f64,
}

impl CFunction {
    pub fn new(focus: Vector, offset: f64) -> Self {
        Self { focus, offset }
    }

    /// The c-function with the given focus passing through `(x0, value)`.
    pub fn through(cost: &CostModel, focus: Vector, x0: &Vector, value: f64) -> Self {
        let offset = value + cost.value(x0, &focus);
        Self { focus, offset }
    }

    pub fn eval(&self, cost: &CostModel, x: &Vector) -> f64 {
        -cost.value(x, &self.focus) + self.offset
    }
}

/// Pointwise maximum of finitely many c-functions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SemidiscretePotential {
    pub pieces: Vec<CFunction>,
}

impl SemidiscretePotential {
    pub fn new(pieces: Vec<CFunction>) -> Self {
        assert!(!pieces.is_empty(), "potential needs at least one piece");
        Self { pieces }
    }

    pub fn eval(&self, cost: &CostModel, x: &Vector) -> f64 {
        self.pieces
            .iter()
            .map(|m| m.eval(cost, x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Indices of the pieces attaining the max within the active tolerance.
    pub fn active_set(&self, cost: &CostModel, x: &Vector) -> Vec<usize> {
        let values: Vec<f64> = self.pieces.iter().map(|m| m.eval(cost, x)).collect();
        let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v >= best - tol::ACTIVE_PIECE)
            .map(|(i, _)| i)
            .collect()
    }

    /// Index of the single best piece (ties resolved to the lowest index).
    pub fn argmax_piece(&self, cost: &CostModel, x: &Vector) -> usize {
        let mut best = 0;
        let mut best_v = f64::NEG_INFINITY;
        for (i, m) in self.pieces.iter().enumerate() {
            let v = m.eval(cost, x);
            if v > best_v {
                best_v = v;
                best = i;
            }
        }
        best
    }
}

/// c-subdifferential at a point: the foci of all active pieces, together
/// with their covector form `pbar_(x, focus)`.
#[derive(Debug, Clone)]
pub struct SubdifferentialAt {
    pub piece_indices: Vec<usize>,
    pub foci: Vec<Vector>,
    pub covectors: Vec<Vector>,
}

pub fn c_subdifferential(
    cost: &CostModel,
    u: &SemidiscretePotential,
    x: &Vector,
) -> Result<SubdifferentialAt, CfuncError> {
    let idx = u.active_set(cost, x);
    let foci: Vec<Vector> = idx.iter().map(|&i| u.pieces[i].focus.clone()).collect();
    let covectors = foci
        .iter()
        .map(|f| cost.momentum_target(x, f))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SubdifferentialAt { piece_indices: idx, foci, covectors })
}

/// Weighted volume of the subdifferential image of a region: the union of
/// pieces active at any of the sample points, weighted per piece.
///
/// For a potential built from a focus grid the natural weights are the
/// focus-cell volumes, making this a quadrature of the image volume; for a
/// transport solution the weights are the atom masses, making it the target
/// mass of the image.
#[derive(Debug, Clone)]
pub struct SubdiffImage {
    pub active_pieces: Vec<usize>,
    pub weighted_volume: f64,
}

pub fn subdiff_image_volume<'a>(
    cost: &CostModel,
    u: &SemidiscretePotential,
    sample_points: impl IntoIterator<Item = &'a Vector>,
    weights: &[f64],
) -> SubdiffImage {
    assert_eq!(weights.len(), u.pieces.len());
    let mut active = vec![false; u.pieces.len()];
    for x in sample_points {
        for i in u.active_set(cost, x) {
            active[i] = true;
        }
    }
    let active_pieces: Vec<usize> =
        active.iter().enumerate().filter_map(|(i, &a)| a.then_some(i)).collect();
    let weighted_volume = active_pieces.iter().map(|&i| weights[i]).sum();
    SubdiffImage { active_pieces, weighted_volume }
}

/// Monte-Carlo estimate of the volume of the gradient-map image of a region,
/// via the Jacobian of `T(x) = cexp_x(Du(x))` with `Du` from central
/// differences of a grid-sampled potential. Used as an independent check of
/// the weighted count above on smooth instances.
pub fn gradient_image_volume_mc(
    cost: &CostModel,
    u: &dyn Fn(&Vector) -> f64,
    region: &GridMask,
    mc_samples: usize,
    seed: u64,
) -> (f64, f64) {
    let dim = region.grid.dim();
    let h = 1e-5;
    let indices: Vec<usize> = region.indices().collect();
    if indices.is_empty() {
        return (0.0, 0.0);
    }
    let transport = |x: &Vector| -> Option<Vector> {
        let mut grad = Vector::zeros(dim);
        for i in 0..dim {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            grad[i] = (u(&xp) - u(&xm)) / (2.0 * h);
        }
        crate::cexp::cexp_target_unchecked(cost, x, &grad).ok()
    };
    let mut values = Vec::with_capacity(mc_samples);
    for k in 0..mc_samples {
        let mut r = rng::stream(seed, k as u64);
        use rand::Rng;
        let cell = indices[r.gen_range(0..indices.len())];
        let x = region.grid.point(cell);
        // |det DT| by forward differences of the transport map.
        let fd = 1e-4;
        let Some(t0) = transport(&x) else { continue };
        let mut jac = crate::Matrix::zeros(dim, dim);
        let mut ok = true;
        for i in 0..dim {
            let mut xi = x.clone();
            xi[i] += fd;
            match transport(&xi) {
                Some(ti) => jac.set_column(i, &((ti - &t0) / fd)),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            values.push(jac.determinant().abs());
        }
    }
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let region_volume = region.volume();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
        / (values.len().max(2) - 1) as f64;
    let est = region_volume * mean;
    let se = region_volume * (var / values.len() as f64).sqrt();
    (est, se)
}

/// Sublevel set `S = { u <= m }` on a grid.
#[derive(Debug, Clone)]
pub struct SublevelSet {
    pub mask: GridMask,
    pub boundary: Vec<Vector>,
    /// Set exactly when no inside cell touches the outermost cell ring.
    pub compactly_contained: bool,
    /// Hull of the coordinate image `coord(S | focus(m))` of the masked points.
    pub coord_hull: Polytope,
    /// Depth inside that hull reached by images of points outside S;
    /// vanishes (up to grid resolution) when the image is convex.
    pub convexity_defect: f64,
    pub focus: Vector,
}

pub fn sublevel_set(
    cost: &CostModel,
    u: &SemidiscretePotential,
    m: &CFunction,
    grid: &Grid,
) -> Result<SublevelSet, CfuncError> {
    let mask = GridMask::from_predicate(grid, |x| {
        u.eval(cost, x) <= m.eval(cost, x) + tol::ACTIVE_PIECE
    });
    if mask.count() == 0 {
        return Err(CfuncError::EmptySet);
    }
    let boundary = mask.boundary_face_midpoints();
    let compactly_contained = !mask.touches_box_boundary();

    let images: Vec<Vector> = mask
        .points()
        .map(|x| cost.momentum_source(&x, &m.focus))
        .collect::<Result<_, _>>()?;
    let coord_hull = Polytope::hull(&images).map_err(|_| CfuncError::EmptySet)?;

    let mut defect = 0.0f64;
    for (i, inside) in mask.inside.iter().enumerate() {
        if !inside {
            let p = cost.momentum_source(&grid.point(i), &m.focus)?;
            let depth = -coord_hull.violation(&p);
            if depth > defect {
                defect = depth;
            }
        }
    }
    Ok(SublevelSet {
        mask,
        boundary,
        compactly_contained,
        coord_hull,
        convexity_defect: defect,
        focus: m.focus.clone(),
    })
}

/// c-polar dual of a region with respect to a grid of candidate foci:
/// `{ xbar : -c(xhat, xbar) + c(x, xbar) - (m(xhat) - m(x)) <= lambda }`
/// for every boundary sample point `xhat`.
#[derive(Debug, Clone)]
pub struct CPolarDual {
    /// Indices into the focus grid.
    pub members: Vec<usize>,
    pub points: Vec<Vector>,
}

pub fn c_polar_dual(
    cost: &CostModel,
    boundary: &[Vector],
    x: &Vector,
    m: &CFunction,
    lambda: f64,
    focus_grid: &Grid,
) -> Result<CPolarDual, CfuncError> {
    if boundary.is_empty() {
        return Err(CfuncError::EmptyBoundary);
    }
    let m_x = m.eval(cost, x);
    let mut members = Vec::new();
    let mut points = Vec::new();
    for (j, xbar) in focus_grid.points() {
        let c_x = cost.value(x, &xbar);
        let mut worst = f64::NEG_INFINITY;
        for xhat in boundary {
            let lhs = -cost.value(xhat, &xbar) + c_x - (m.eval(cost, xhat) - m_x);
            worst = worst.max(lhs);
            if worst > lambda {
                break;
            }
        }
        if worst <= lambda {
            members.push(j);
            points.push(xbar);
        }
    }
    Ok(CPolarDual { members, points })
}

/// The c-cone with vertex `x0`, base boundary sample, and height `lambda`:
/// for each focus on the grid, the largest offset keeping the c-function
/// below `m` on the boundary and below `m(x0) - lambda` at the vertex.
pub fn c_cone(
    cost: &CostModel,
    x0: &Vector,
    m: &CFunction,
    boundary: &[Vector],
    lambda: f64,
    focus_grid: &Grid,
) -> Result<SemidiscretePotential, CfuncError> {
    if boundary.is_empty() {
        return Err(CfuncError::EmptyBoundary);
    }
    if focus_grid.len() == 0 {
        return Err(CfuncError::EmptyAdmissible);
    }
    let mut pieces = Vec::with_capacity(focus_grid.len());
    for (_, xbar) in focus_grid.points() {
        let boundary_cap = boundary
            .iter()
            .map(|xhat| m.eval(cost, xhat) + cost.value(xhat, &xbar))
            .fold(f64::INFINITY, f64::min);
        let vertex_cap = m.eval(cost, x0) - lambda + cost.value(x0, &xbar);
        pieces.push(CFunction::new(xbar, boundary_cap.min(vertex_cap)));
    }
    Ok(SemidiscretePotential::new(pieces))
}

/// Grid argmin of `u + c(., focus)`: where a c-function with that focus
/// would support `u` from below. Returns the grid index and the gap between
/// the two smallest distinct values (a support-localization diagnostic).
pub fn argmin_support_point(
    cost: &CostModel,
    u: &SemidiscretePotential,
    focus: &Vector,
    grid: &Grid,
) -> (usize, f64) {
    let mut best_idx = 0usize;
    let mut best = f64::INFINITY;
    let mut second = f64::INFINITY;
    for (i, x) in grid.points() {
        let g = u.eval(cost, &x) + cost.value(&x, focus);
        if g < best {
            second = best;
            best = g;
            best_idx = i;
        } else if g < second {
            second = g;
        }
    }
    (best_idx, second - best)
}

/// Uniform sample of the boundary of a polytope: facet vertices plus seeded
/// convex combinations within each facet.
pub fn polytope_boundary_sample(a: &Polytope, per_facet: usize, seed: u64) -> Vec<Vector> {
    use rand::Rng;
    let facets = a.facets_ambient();
    let mut out = Vec::new();
    for (fi, (normal, offset)) in facets.iter().enumerate() {
        let on: Vec<&Vector> = a
            .vertices()
            .iter()
            .filter(|v| (normal.dot(v) - offset).abs() <= tol::FACET * (1.0 + offset.abs()))
            .collect();
        if on.is_empty() {
            continue;
        }
        for v in &on {
            out.push((*v).clone());
        }
        if on.len() >= 2 {
            let mut r = rng::stream(seed, fi as u64);
            for _ in 0..per_facet {
                let mut weights: Vec<f64> = (0..on.len()).map(|_| r.gen_range(0.0..1.0)).collect();
                let total: f64 = weights.iter().sum();
                for w in &mut weights {
                    *w /= total;
                }
                let mut p = Vector::zeros(a.ambient_dim());
                for (w, v) in weights.iter().zip(&on) {
                    p += *v * *w;
                }
                out.push(p);
            }
        }
    }
    // Dedup vertices shared between facets.
    let mut dedup: Vec<Vector> = Vec::with_capacity(out.len());
    for p in out {
        if !dedup.iter().any(|q| (q - &p).norm() < 1e-12) {
            dedup.push(p);
        }
    }
    dedup
}
