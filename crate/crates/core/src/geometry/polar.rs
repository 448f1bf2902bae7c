//! Polar duals of convex bodies with respect to a center and height.

use super::{GeomError, Polytope};
use crate::grid::BoxDomain;
use crate::{Matrix, Vector};

/// Result of a polar dual computation. `clipped` is set when the center was
/// not interior, the dual is unbounded, and the returned body was cut to the
/// bounding box.
#[derive(Debug, Clone)]
pub struct PolarDual {
    pub polytope: Polytope,
    pub clipped: bool,
}

/// `{ q : <q - q0, p - p0> <= lambda for all p in A }`.
///
/// Exact as a halfspace intersection over the vertices of `A`. When `p0` is
/// not interior to `A` the dual is unbounded; it is intersected with
/// `clip_box` and flagged.
pub fn polar_dual(
    a: &Polytope,
    p0: &Vector,
    q0: &Vector,
    lambda: f64,
    clip_box: &BoxDomain,
) -> Result<PolarDual, GeomError> {
    if lambda <= 0.0 {
        return Err(GeomError::NonFinite);
    }
    let interior_margin = 1e-9 * (1.0 + a.diameter());
    let interior = a.is_full_dimensional() && a.violation(p0) < -interior_margin;

    // Halfspaces <q, p - p0> <= lambda + <q0, p - p0>, one per vertex of A.
    let mut halfspaces: Vec<(Vector, f64)> = a
        .vertices()
        .iter()
        .filter_map(|p| {
            let dir = p - p0;
            let norm = dir.norm();
            if norm <= 1e-13 {
                return None; // vertex at the center constrains nothing
            }
            Some((dir.clone(), lambda + q0.dot(&dir)))
        })
        .collect();
    let clipped = !interior;
    if clipped {
        for axis in 0..clip_box.dim() {
            let mut e = Vector::zeros(clip_box.dim());
            e[axis] = 1.0;
            halfspaces.push((e.clone(), clip_box.hi[axis]));
            halfspaces.push((-e, -clip_box.lo[axis]));
        }
    }

    let verts = halfspace_intersection_vertices(&halfspaces, q0.len());
    if verts.is_empty() {
        return Err(GeomError::EmptyInput);
    }
    Ok(PolarDual { polytope: Polytope::hull(&verts)?, clipped })
}

/// Vertex enumeration of `{ x : <n_i, x> <= c_i }` by solving every
/// d-subset of active constraints.
pub fn halfspace_intersection_vertices(halfspaces: &[(Vector, f64)], dim: usize) -> Vec<Vector> {
    let m = halfspaces.len();
    if m < dim {
        return Vec::new();
    }
    let scale = halfspaces
        .iter()
        .map(|(n, c)| c.abs() / n.norm().max(1e-300))
        .fold(1.0f64, f64::max);
    let feas_tol = 1e-9 * scale;
    let mut verts: Vec<Vector> = Vec::new();
    let mut subset: Vec<usize> = (0..dim).collect();
    loop {
        let mut mat = Matrix::zeros(dim, dim);
        let mut rhs = Vector::zeros(dim);
        for (r, &i) in subset.iter().enumerate() {
            mat.set_row(r, &halfspaces[i].0.transpose());
            rhs[r] = halfspaces[i].1;
        }
        let lu = mat.lu();
        if let Some(x) = lu.solve(&rhs) {
            if x.iter().all(|v| v.is_finite())
                && halfspaces.iter().all(|(n, c)| n.dot(&x) <= c + feas_tol * n.norm().max(1.0))
                && !verts.iter().any(|v| (v - &x).norm() < 1e-10 * scale)
            {
                verts.push(x);
            }
        }
        if !advance(&mut subset, m) {
            break;
        }
    }
    verts
}

fn advance(subset: &mut [usize], m: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] + (k - i) < m {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Volume comparison between a body and its polar dual about the center of
/// mass: reports `|A*|`, `|A|`, and the scale-free constant
/// `C = |A*| |A| / lambda^n`.
#[derive(Debug, Clone)]
pub struct DualVolumeBound {
    pub dual_volume: f64,
    pub body_volume: f64,
    pub constant: f64,
    pub clipped: bool,
}

pub fn dual_volume_bound(
    a: &Polytope,
    q0: &Vector,
    lambda: f64,
    clip_box: &BoxDomain,
) -> Result<DualVolumeBound, GeomError> {
    if !a.is_full_dimensional() {
        return Err(GeomError::DegenerateBody);
    }
    let p_cm = a.centroid().clone();
    let dual = polar_dual(a, &p_cm, q0, lambda, clip_box)?;
    let n = a.ambient_dim() as i32;
    let dual_volume = dual.polytope.volume();
    let body_volume = a.volume();
    let constant = dual_volume * body_volume / lambda.powi(n);
    if !constant.is_finite() {
        return Err(GeomError::NonFinite);
    }
    Ok(DualVolumeBound { dual_volume, body_volume, constant, clipped: dual.clipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polytope::vec2;

    fn square() -> Polytope {
        Polytope::hull(&[vec2(-1.0, -1.0), vec2(1.0, -1.0), vec2(1.0, 1.0), vec2(-1.0, 1.0)])
            .unwrap()
    }

    fn big_box() -> BoxDomain {
        BoxDomain::cube(2, -100.0, 100.0)
    }

    #[test]
    fn square_dual_is_cross_polytope() {
        let d = polar_dual(&square(), &Vector::zeros(2), &Vector::zeros(2), 1.0, &big_box())
            .unwrap();
        assert!(!d.clipped);
        assert_eq!(d.polytope.vertices().len(), 4);
        assert!((d.polytope.volume() - 2.0).abs() < 1e-9);
        // Vertices are (+-1, 0), (0, +-1).
        for v in d.polytope.vertices() {
            assert!((v.abs().sum() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn square_dual_scales_with_lambda() {
        let d = polar_dual(&square(), &Vector::zeros(2), &Vector::zeros(2), 2.0, &big_box())
            .unwrap();
        assert!((d.polytope.volume() - 8.0).abs() < 1e-9);
    }

    #[test]
    fn ball_dual_is_ball() {
        let pts: Vec<Vector> = (0..64)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
                vec2(t.cos(), t.sin())
            })
            .collect();
        let ball = Polytope::hull(&pts).unwrap();
        let d =
            polar_dual(&ball, &Vector::zeros(2), &Vector::zeros(2), 1.0, &big_box()).unwrap();
        assert!(!d.clipped);
        let rel = (d.polytope.volume() - std::f64::consts::PI).abs() / std::f64::consts::PI;
        assert!(rel < 0.02, "relative error {rel}");
    }

    #[test]
    fn homogeneity_in_lambda() {
        let a = Polytope::hull(&[
            vec2(0.0, 0.0),
            vec2(2.0, 0.3),
            vec2(1.4, 1.9),
            vec2(-0.3, 1.0),
        ])
        .unwrap();
        let p0 = a.centroid().clone();
        let q0 = vec2(0.4, -0.2);
        let d1 = polar_dual(&a, &p0, &q0, 1.0, &big_box()).unwrap();
        let d3 = polar_dual(&a, &p0, &q0, 3.0, &big_box()).unwrap();
        for v in d3.polytope.vertices() {
            let back = (&q0 + (v - &q0) / 3.0).clone_owned();
            assert!(
                d1.polytope.violation(&back).abs() < 1e-9,
                "scaled vertex not on the unit-height dual"
            );
        }
        assert!((d3.polytope.volume() - 9.0 * d1.polytope.volume()).abs() < 1e-8);
    }

    #[test]
    fn boundary_center_is_clipped_and_flagged() {
        let d = polar_dual(&square(), &vec2(1.0, 0.0), &Vector::zeros(2), 1.0, &big_box())
            .unwrap();
        assert!(d.clipped);
        // The dual contains points far along the clipping box.
        assert!(d.polytope.support(&vec2(1.0, 0.0)) >= 99.0);
    }

    #[test]
    fn dual_volume_constant_square() {
        // |A| = 4, |A*| = 2 lambda^2, C = 8.
        let b = dual_volume_bound(&square(), &Vector::zeros(2), 1.0, &big_box()).unwrap();
        assert!((b.constant - 8.0).abs() < 1e-9);
        let b2 = dual_volume_bound(&square(), &Vector::zeros(2), 10.0, &big_box()).unwrap();
        assert!((b2.constant - 8.0).abs() < 1e-6);
    }

    #[test]
    fn dual_volume_constant_disk_is_pi_squared() {
        for r in [0.5, 1.0, 2.0] {
            let pts: Vec<Vector> = (0..128)
                .map(|k| {
                    let t = 2.0 * std::f64::consts::PI * k as f64 / 128.0;
                    vec2(r * t.cos(), r * t.sin())
                })
                .collect();
            let disk = Polytope::hull(&pts).unwrap();
            let b = dual_volume_bound(&disk, &Vector::zeros(2), 1.0, &big_box()).unwrap();
            let pi2 = std::f64::consts::PI * std::f64::consts::PI;
            assert!(
                (b.constant - pi2).abs() / pi2 < 0.01,
                "constant {} for radius {}",
                b.constant,
                r
            );
        }
    }

    #[test]
    fn degenerate_body_rejected() {
        let seg = Polytope::hull(&[vec2(0.0, 0.0), vec2(1.0, 0.0)]).unwrap();
        assert!(matches!(
            dual_volume_bound(&seg, &Vector::zeros(2), 1.0, &big_box()),
            Err(GeomError::DegenerateBody)
        ));
    }
}
