//! The twist-inverse machinery: momenta, c-exponential maps, c-segments,
//! coordinate images, and dilations.
//!
//! `cexp_target(x, pbar)` solves `-Dc(x, y) = pbar` for `y` by Newton with
//! the analytic cross-Hessian as Jacobian; `cexp_source` is the mirror
//! problem. The initial guess is the Euclidean analogue (`x + pbar`), exact
//! for the two flat kinds, with momentum-continuation retries when a plain
//! solve fails.

use thiserror::Error;

use crate::cost::{CostError, CostModel};
use crate::geometry::Polytope;
use crate::report::{ConditionReport, Verdict, Witness};
use crate::{tol, Vector};

#[derive(Debug, Error)]
pub enum CexpError {
    #[error("Newton did not converge: residual {residual:.3e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("converged point violates the opposite domain box by {0:.3e}")]
    OutsideDomain(f64),
    #[error(transparent)]
    Cost(#[from] CostError),
}

/// Which chart a momentum belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `p_(x,xbar) = -Dbar c(x, xbar)`, a covector at xbar.
    Source,
    /// `pbar_(x,xbar) = -Dc(x, xbar)`, a covector at x.
    Target,
}

/// Momentum of a pair, recomputable from the pair itself.
#[derive(Debug, Clone)]
pub struct Momentum {
    pub base: Vector,
    pub covector: Vector,
    pub side: Side,
}

impl Momentum {
    pub fn source(cost: &CostModel, x: &Vector, xbar: &Vector) -> Result<Self, CostError> {
        Ok(Self { base: xbar.clone(), covector: cost.momentum_source(x, xbar)?, side: Side::Source })
    }

    pub fn target(cost: &CostModel, x: &Vector, xbar: &Vector) -> Result<Self, CostError> {
        Ok(Self { base: x.clone(), covector: cost.momentum_target(x, xbar)?, side: Side::Target })
    }
}

/// `cexp_x(pbar)`: the unique `y` with `-Dc(x, y) = pbar`.
pub fn cexp_target(cost: &CostModel, x: &Vector, pbar: &Vector) -> Result<Vector, CexpError> {
    newton_invert(cost, x, pbar, Side::Target)
}

/// Like [`cexp_target`] but without the domain-membership check; derivative
/// stencils may poke slightly past the box edge, which is fine for the
/// analytic kinds as long as the singular separation is respected.
pub fn cexp_target_unchecked(
    cost: &CostModel,
    x: &Vector,
    pbar: &Vector,
) -> Result<Vector, CexpError> {
    newton_invert_inner(cost, x, pbar, Side::Target)
}

/// `cexp_xbar(p)`: the unique `y` with `-Dbar c(y, xbar) = p`.
pub fn cexp_source(cost: &CostModel, xbar: &Vector, p: &Vector) -> Result<Vector, CexpError> {
    newton_invert(cost, xbar, p, Side::Source)
}

fn residual(cost: &CostModel, anchor: &Vector, y: &Vector, want: &Vector, side: Side) -> Result<(Vector, crate::cost::CrossHessian), CostError> {
    match side {
        Side::Target => {
            let der = cost.derivatives(anchor, y)?;
            Ok(((-der.grad_x) - want, der.cross))
        }
        Side::Source => {
            let der = cost.derivatives(y, anchor)?;
            Ok(((-der.grad_xbar) - want, der.cross))
        }
    }
}

fn newton_once(
    cost: &CostModel,
    anchor: &Vector,
    want: &Vector,
    side: Side,
    start: &Vector,
) -> Result<Vector, CexpError> {
    let mut y = start.clone();
    let mut last_res = f64::INFINITY;
    for it in 0..tol::NEWTON_MAX_ITER {
        let (f, cross) = residual(cost, anchor, &y, want, side)?;
        let res = f.norm();
        // dF/dy: for the target side F(y) = -Dc(anchor, y) - want, so the
        // Jacobian is -D Dbar c = the cross block; mirror for the source
        // side (its transpose).
        let jac = match side {
            Side::Target => cross.matrix.clone(),
            Side::Source => cross.matrix.transpose(),
        };
        let Some(step) = jac.lu().solve(&f) else {
            return Err(CexpError::NoConvergence { residual: res, iterations: it });
        };
        let mut next = &y - &step;
        // Keep singular kinds away from the diagonal.
        if cost.kind.is_singular() {
            let mut damp = 1.0;
            while damp > 1e-4 && (&next - anchor).norm() < 0.5 * cost.singular_separation {
                damp *= 0.5;
                next = &y - &step * damp;
            }
        }
        if res <= tol::NEWTON_RESIDUAL {
            // Take the final correction: one more quadratic contraction on
            // top of the residual test gives full position accuracy even
            // when the Jacobian is small.
            return Ok(next);
        }
        if res > 10.0 * last_res.max(tol::NEWTON_RESIDUAL) {
            return Err(CexpError::NoConvergence { residual: res, iterations: it });
        }
        last_res = res;
        y = next;
    }
    let (f, _) = residual(cost, anchor, &y, want, side)?;
    if f.norm() <= tol::NEWTON_RESIDUAL {
        Ok(y)
    } else {
        Err(CexpError::NoConvergence { residual: f.norm(), iterations: tol::NEWTON_MAX_ITER })
    }
}

fn newton_invert(
    cost: &CostModel,
    anchor: &Vector,
    want: &Vector,
    side: Side,
) -> Result<Vector, CexpError> {
    let solved = newton_invert_inner(cost, anchor, want, side)?;
    let violation = match side {
        Side::Target => cost.omega_bar.violation(&solved),
        Side::Source => cost.omega.violation(&solved),
    };
    if violation > tol::DOMAIN_MEMBERSHIP {
        return Err(CexpError::OutsideDomain(violation));
    }
    Ok(solved)
}

fn newton_invert_inner(
    cost: &CostModel,
    anchor: &Vector,
    want: &Vector,
    side: Side,
) -> Result<Vector, CexpError> {
    // Euclidean-analogue initial guess.
    let start = anchor + want;
    match newton_once(cost, anchor, want, side, &start) {
        Ok(y) => Ok(y),
        Err(_) => {
            // Continuation along the momentum segment from a momentum we can
            // invert trivially (the one at the opposite box center).
            let opposite_center = match side {
                Side::Target => cost.omega_bar.center(),
                Side::Source => cost.omega.center(),
            };
            let p_center = match side {
                Side::Target => cost.momentum_target(anchor, &opposite_center)?,
                Side::Source => cost.momentum_source(&opposite_center, anchor)?,
            };
            let mut result = Err(CexpError::NoConvergence {
                residual: f64::INFINITY,
                iterations: 0,
            });
            'retry: for split in 1..=tol::NEWTON_RETRIES {
                let steps = 1usize << split.min(8);
                let mut y = opposite_center.clone();
                for k in 1..=steps {
                    let t = k as f64 / steps as f64;
                    let p_t = &p_center * (1.0 - t) + want * t;
                    match newton_once(cost, anchor, &p_t, side, &y) {
                        Ok(next) => y = next,
                        Err(e) => {
                            result = Err(e);
                            continue 'retry;
                        }
                    }
                }
                result = Ok(y);
                break;
            }
            result
        }
    }
}

/// A c-segment: the image of a straight momentum segment under the
/// c-exponential of its anchor.
#[derive(Debug, Clone)]
pub struct CSegment {
    pub anchor: Vector,
    pub side: Side,
    pub p_start: Vector,
    pub p_end: Vector,
}

impl CSegment {
    /// Segment with respect to `anchor` from `from` to `to`, both in the
    /// chart opposite to the anchor.
    pub fn with_respect_to(
        cost: &CostModel,
        anchor: &Vector,
        side: Side,
        from: &Vector,
        to: &Vector,
    ) -> Result<Self, CexpError> {
        let (p_start, p_end) = match side {
            // Anchor xbar, endpoints in Omega: source momenta.
            Side::Source => (
                cost.momentum_source(from, anchor)?,
                cost.momentum_source(to, anchor)?,
            ),
            // Anchor x, endpoints in Omega-bar: target momenta.
            Side::Target => (
                cost.momentum_target(anchor, from)?,
                cost.momentum_target(anchor, to)?,
            ),
        };
        Ok(Self { anchor: anchor.clone(), side, p_start, p_end })
    }

    pub fn momentum_at(&self, t: f64) -> Vector {
        &self.p_start * (1.0 - t) + &self.p_end * t
    }

    pub fn eval(&self, cost: &CostModel, t: f64) -> Result<Vector, CexpError> {
        let p = self.momentum_at(t);
        match self.side {
            Side::Source => cexp_source(cost, &self.anchor, &p),
            Side::Target => cexp_target(cost, &self.anchor, &p),
        }
    }
}

/// Coordinate image `coord(A | xbar) = { -Dbar c(a, xbar) : a in A }` of a
/// polytope, as the hull of the vertex images, plus a convexity defect
/// (how far mapped edge midpoints stick out of that hull).
#[derive(Debug, Clone)]
pub struct CoordImage {
    pub hull: Polytope,
    pub convexity_defect: f64,
}

pub fn coord_image_source(
    cost: &CostModel,
    a: &Polytope,
    xbar: &Vector,
) -> Result<CoordImage, CexpError> {
    let mapped: Vec<Vector> = a
        .vertices()
        .iter()
        .map(|v| cost.momentum_source(v, xbar))
        .collect::<Result<_, _>>()?;
    let hull = Polytope::hull(&mapped).map_err(|_| CostError::DegeneratePair(0.0))?;
    let mut defect = 0.0f64;
    for (i, v) in a.vertices().iter().enumerate() {
        for w in &a.vertices()[i + 1..] {
            let mid = (v + w) * 0.5;
            let img = cost.momentum_source(&mid, xbar)?;
            defect = defect.max(hull.violation(&img).max(0.0));
        }
    }
    Ok(CoordImage { hull, convexity_defect: defect })
}

/// Mirror form: `coord(Abar | x) = { -Dc(x, b) : b in Abar }`.
pub fn coord_image_target(
    cost: &CostModel,
    abar: &Polytope,
    x: &Vector,
) -> Result<CoordImage, CexpError> {
    let mapped: Vec<Vector> = abar
        .vertices()
        .iter()
        .map(|v| cost.momentum_target(x, v))
        .collect::<Result<_, _>>()?;
    let hull = Polytope::hull(&mapped).map_err(|_| CostError::DegeneratePair(0.0))?;
    let mut defect = 0.0f64;
    for (i, v) in abar.vertices().iter().enumerate() {
        for w in &abar.vertices()[i + 1..] {
            let mid = (v + w) * 0.5;
            let img = cost.momentum_target(x, &mid)?;
            defect = defect.max(hull.violation(&img).max(0.0));
        }
    }
    Ok(CoordImage { hull, convexity_defect: defect })
}

/// Dilation of `A` by `kappa` with respect to `xbar`: scale the coordinate
/// image about its center of mass and map back through the c-exponential.
pub fn dilate(
    cost: &CostModel,
    a: &Polytope,
    kappa: f64,
    xbar: &Vector,
) -> Result<Vec<Vector>, CexpError> {
    assert!(kappa > 0.0);
    let image = coord_image_source(cost, a, xbar)?;
    let p_cm = image.hull.centroid().clone();
    let mut out = Vec::with_capacity(image.hull.vertices().len());
    for p in image.hull.vertices() {
        let scaled = &p_cm + (p - &p_cm) * kappa;
        out.push(cexp_source(cost, xbar, &scaled)?);
    }
    Ok(out)
}

/// Samples c-segments between vertices of `A` with respect to the given
/// anchors and reports the worst signed-distance violation of `A`.
pub fn check_cconvex(
    cost: &CostModel,
    a: &Polytope,
    anchors: &[Vector],
    t_steps: usize,
    seed: u64,
) -> ConditionReport {
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    let mut samples = 0usize;
    let mut discarded = 0usize;
    for anchor in anchors {
        for (i, from) in a.vertices().iter().enumerate() {
            for to in &a.vertices()[i + 1..] {
                let seg = match CSegment::with_respect_to(cost, anchor, Side::Source, from, to) {
                    Ok(s) => s,
                    Err(_) => {
                        discarded += 1;
                        continue;
                    }
                };
                for k in 0..=t_steps {
                    let t = k as f64 / t_steps as f64;
                    samples += 1;
                    match seg.eval(cost, t) {
                        Ok(pt) => {
                            let viol = a.violation(&pt);
                            if viol > worst {
                                worst = viol;
                                witness = Some(
                                    Witness::new()
                                        .with("anchor", anchor.iter().cloned())
                                        .with("from", from.iter().cloned())
                                        .with("to", to.iter().cloned())
                                        .with("t", [t])
                                        .with("point", pt.iter().cloned()),
                                );
                            }
                        }
                        Err(_) => discarded += 1,
                    }
                }
            }
        }
    }
    ConditionReport {
        condition: format!("c-convexity({})", cost.kind.name()),
        verdict: if worst <= tol::SEGMENT_SLACK { Verdict::Pass } else { Verdict::Fail },
        extremal: worst,
        witness,
        samples,
        discarded,
        seed,
        tolerance: tol::SEGMENT_SLACK,
        notes: Vec::new(),
    }
}
