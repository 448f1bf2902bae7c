//! Normal cones at polytope vertices and inward-pointing strict normals.

use super::simplex::{maximize, LpProblem};
use super::{GeomError, Polytope};
use crate::{tol, Vector};

/// Generators of the normal cone of a polytope at one of its vertices.
#[derive(Debug, Clone)]
pub struct NormalConeGenerators {
    pub base: Vector,
    /// Unit normals of the facets incident to the base vertex, in ambient
    /// coordinates.
    pub generators: Vec<Vector>,
}

impl NormalConeGenerators {
    /// Membership in the (closed) normal cone: `<q, p - base> <= 0` for all
    /// vertices `p`.
    pub fn contains(&self, a: &Polytope, q: &Vector) -> bool {
        a.vertices().iter().all(|p| q.dot(&(p - &self.base)) <= tol::FACET * (1.0 + q.norm()))
    }

    /// Membership in the strict normal cone: `<q, p - base> < 0` for every
    /// vertex `p != base`.
    pub fn contains_strict(&self, a: &Polytope, q: &Vector) -> bool {
        a.vertices().iter().all(|p| {
            let r = p - &self.base;
            let n = r.norm();
            n <= 1e-12 || q.dot(&r) < -1e-10 * n * q.norm().max(1e-300)
        })
    }
}

pub fn normal_cone(a: &Polytope, p_e: &Vector) -> Result<NormalConeGenerators, GeomError> {
    let idx = a
        .vertex_index(p_e)
        .ok_or_else(|| GeomError::NotAVertex(format!("{:?}", p_e.as_slice())))?;
    let facets = a.facets_ambient();
    let generators: Vec<Vector> =
        a.incident_facets(idx).into_iter().map(|f| facets[f].0.clone()).collect();
    Ok(NormalConeGenerators { base: a.vertices()[idx].clone(), generators })
}

/// Inward-pointing strict normal at an exposed vertex.
///
/// Returns a unit `e0` in the strict normal cone together with the largest
/// `lambda0 > 0` such that `p_e - lambda e0` stays in the body for all
/// `lambda in (0, lambda0]`. Bodies with affine dimension below the ambient
/// dimension are handled by orthogonal projection onto their affine hull.
#[derive(Debug, Clone)]
pub struct InwardNormal {
    pub direction: Vector,
    pub reach: f64,
}

pub fn inward_normal(a: &Polytope, p_e: &Vector) -> Result<InwardNormal, GeomError> {
    if a.vertices().len() < 2 || a.affine_dim() == 0 {
        return Err(GeomError::DegenerateBody);
    }
    let idx = a
        .vertex_index(p_e)
        .ok_or_else(|| GeomError::NotAVertex(format!("{:?}", p_e.as_slice())))?;
    let d = a.affine_dim();
    let y_e = a.to_affine(&a.vertices()[idx]);
    let verts_aff: Vec<Vector> = a.vertices().iter().map(|v| a.to_affine(v)).collect();

    // Incident facet normals in affine coordinates.
    let gens: Vec<Vector> =
        a.incident_facets(idx).iter().map(|&f| a.facets_affine()[f].normal.clone()).collect();
    if gens.is_empty() {
        return Err(GeomError::NotExposed);
    }

    // Axis direction pointing from the interior toward the vertex.
    let interior = a.to_affine(a.centroid());
    let axis_raw = &y_e - &interior;
    if axis_raw.norm() < 1e-12 {
        return Err(GeomError::NotExposed);
    }
    let axis = axis_raw.normalize();

    // Cross-section of the normal cone at height one along the axis.
    let mut scaled: Vec<Vector> = Vec::with_capacity(gens.len());
    for g in &gens {
        let h = g.dot(&axis);
        if h <= 1e-12 {
            // An incident facet normal orthogonal to the axis means the
            // vertex is not exposed within tolerance.
            return Err(GeomError::NotExposed);
        }
        scaled.push(g / h);
    }

    // Max-min point of the cross-section: maximize over mixtures mu the
    // minimum of <w(mu), g_i>, a small matrix game.
    let w0 = if scaled.len() == 1 {
        scaled[0].clone()
    } else {
        let k = scaled.len();
        let gram: Vec<Vec<f64>> =
            scaled.iter().map(|gi| scaled.iter().map(|gj| gi.dot(gj)).collect()).collect();
        // Variables: mu_1..mu_k, t_plus, t_minus. Maximize t_plus - t_minus
        // subject to sum_j mu_j gram[i][j] >= t, sum mu = 1.
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for i in 0..k {
            let mut row: Vec<f64> = (0..k).map(|j| -gram[i][j]).collect();
            row.push(1.0);
            row.push(-1.0);
            rows.push(row);
            rhs.push(0.0);
        }
        let mut sum_row = vec![1.0; k];
        sum_row.extend_from_slice(&[0.0, 0.0]);
        rows.push(sum_row.clone());
        rhs.push(1.0);
        let neg: Vec<f64> = sum_row.iter().map(|v| -v).collect();
        rows.push(neg);
        rhs.push(-1.0);
        let mut objective = vec![0.0; k];
        objective.extend_from_slice(&[1.0, -1.0]);
        let sol = maximize(&LpProblem { objective, rows, rhs })
            .map_err(|e| GeomError::Lp(e.to_string()))?;
        // The game value is at least one by Cauchy-Schwarz on the
        // cross-section; anything well below that signals a bad cone setup.
        debug_assert!(sol.objective > 0.9, "max-min value {}", sol.objective);
        let mut w = Vector::zeros(d);
        for (j, g) in scaled.iter().enumerate() {
            w += g * sol.x[j];
        }
        w
    };

    // The max-min point can sit on the cone boundary for lopsided fans; mix
    // toward the generator average until the strict inequalities hold.
    let mean = scaled.iter().sum::<Vector>() / scaled.len() as f64;
    let strict_ok = |w: &Vector| {
        verts_aff.iter().enumerate().all(|(i, y)| {
            if i == idx {
                return true;
            }
            let r = y - &y_e;
            w.dot(&r) < -1e-10 * r.norm() * w.norm()
        })
    };
    let ray_ok = |w: &Vector| gens.iter().all(|g| g.dot(w) > 1e-12 * w.norm());
    let mut chosen: Option<Vector> = None;
    for eps in [0.0, 1e-6, 1e-3, 1e-1, 0.5, 1.0] {
        let w = &w0 * (1.0 - eps) + &mean * eps;
        if w.norm() > 1e-12 && strict_ok(&w) && ray_ok(&w) {
            chosen = Some(w.normalize());
            break;
        }
    }
    let e0_aff = chosen.ok_or(GeomError::NotExposed)?;

    // Ray-cast p_e - lambda e0 against the facets.
    let mut reach = f64::INFINITY;
    for f in a.facets_affine() {
        let denom = -f.normal.dot(&e0_aff);
        if denom > 1e-12 {
            let slack = f.offset - f.normal.dot(&y_e);
            reach = reach.min(slack.max(0.0) / denom);
        }
    }
    if !reach.is_finite() || reach <= 0.0 {
        return Err(GeomError::NotExposed);
    }

    let origin = a.from_affine(&Vector::zeros(d));
    let direction = a.from_affine(&e0_aff) - origin;
    Ok(InwardNormal { direction, reach })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polytope::vec2;
    use crate::rng;
    use rand::Rng;

    fn square01() -> Polytope {
        Polytope::hull(&[vec2(0.0, 0.0), vec2(1.0, 0.0), vec2(1.0, 1.0), vec2(0.0, 1.0)])
            .unwrap()
    }

    #[test]
    fn square_corner_generators() {
        let a = square01();
        let nc = normal_cone(&a, &vec2(0.0, 0.0)).unwrap();
        assert_eq!(nc.generators.len(), 2);
        for g in &nc.generators {
            assert!(
                (g - vec2(-1.0, 0.0)).norm() < 1e-9 || (g - vec2(0.0, -1.0)).norm() < 1e-9
            );
        }
        let diag = vec2(-1.0, -1.0).normalize();
        assert!(nc.contains(&a, &diag));
        assert!(nc.contains_strict(&a, &diag));
        assert!(!nc.contains(&a, &vec2(0.0, 1.0)));
        // A generator itself is in the cone but not the strict cone.
        assert!(nc.contains(&a, &vec2(-1.0, 0.0)));
        assert!(!nc.contains_strict(&a, &vec2(-1.0, 0.0)));
    }

    #[test]
    fn not_a_vertex_rejected() {
        let a = square01();
        assert!(matches!(
            normal_cone(&a, &vec2(0.5, 0.0)),
            Err(GeomError::NotAVertex(_))
        ));
    }

    #[test]
    fn square_corner_inward_normal() {
        let a = square01();
        let iw = inward_normal(&a, &vec2(0.0, 0.0)).unwrap();
        let expected = vec2(-1.0, -1.0).normalize();
        assert!((&iw.direction - expected).norm() < 1e-9);
        assert!((iw.reach - std::f64::consts::SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn triangle_inward_normal_postconditions() {
        let a = Polytope::hull(&[vec2(0.0, 0.0), vec2(1.0, 0.0), vec2(0.0, 1.0)]).unwrap();
        let p_e = vec2(1.0, 0.0);
        let iw = inward_normal(&a, &p_e).unwrap();
        let nc = normal_cone(&a, &p_e).unwrap();
        assert!(nc.contains_strict(&a, &iw.direction));
        for k in 1..=10 {
            let lam = iw.reach * k as f64 / 10.0;
            let q = &p_e - &iw.direction * lam;
            assert!(a.contains(&q, 1e-9), "ray point at lambda={lam} escaped");
        }
    }

    #[test]
    fn segment_endpoint_after_hull_projection() {
        let a = Polytope::hull(&[vec2(0.0, 0.0), vec2(0.0, 1.0)]).unwrap();
        let iw = inward_normal(&a, &vec2(0.0, 1.0)).unwrap();
        assert!((&iw.direction - vec2(0.0, 1.0)).norm() < 1e-9);
        assert!((iw.reach - 1.0).abs() < 1e-9);
    }

    #[test]
    fn lopsided_cone_stays_strict() {
        // Obtuse fan at the origin vertex: the pure max-min point may lie on
        // the cone boundary, exercising the mixing fallback.
        let a = Polytope::hull(&[
            vec2(0.0, 0.0),
            vec2(1.0, 0.05),
            vec2(0.9, 1.0),
            vec2(-0.4, 1.0),
        ])
        .unwrap();
        let p_e = vec2(0.0, 0.0);
        let iw = inward_normal(&a, &p_e).unwrap();
        let nc = normal_cone(&a, &p_e).unwrap();
        assert!(nc.contains_strict(&a, &iw.direction));
        for k in 1..=10 {
            let lam = iw.reach * k as f64 / 10.0;
            assert!(a.contains(&(&p_e - &iw.direction * lam), 1e-9));
        }
    }

    #[test]
    fn randomized_inward_normal_battery() {
        for inst in 0..300u64 {
            let mut r = rng::stream(99, inst);
            let npts = r.gen_range(3..9);
            let pts: Vec<Vector> =
                (0..npts).map(|_| vec2(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect();
            let Ok(a) = Polytope::hull(&pts) else { continue };
            if a.vertices().len() < 2 {
                continue;
            }
            let vi = r.gen_range(0..a.vertices().len());
            let p_e = a.vertices()[vi].clone();
            let iw = inward_normal(&a, &p_e).unwrap();
            assert!((iw.direction.norm() - 1.0).abs() < 1e-9);
            assert!(iw.reach > 0.0);
            for k in 1..=10 {
                let lam = iw.reach * k as f64 / 10.0;
                assert!(a.contains(&(&p_e - &iw.direction * lam), 1e-8));
            }
            for (i, v) in a.vertices().iter().enumerate() {
                if i != vi {
                    assert!(iw.direction.dot(&(v - &p_e)) < 0.0);
                }
            }
        }
    }
}
