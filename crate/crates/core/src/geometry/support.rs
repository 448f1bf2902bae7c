//! Supporting planes, widths, and the Bishop-Phelps construction.

use super::simplex::{maximize, LpProblem};
use super::{GeomError, Polytope};
use crate::{tol, Vector};

/// Distance from `p` (inside `A`) to the supporting plane of `A` with outward
/// normal `v`: `sup_{q in A} <q - p, v>`. Exact on polytopes.
pub fn supporting_plane_distance(a: &Polytope, p: &Vector, v: &Vector) -> Result<f64, GeomError> {
    let excess = a.violation(p);
    if excess > tol::POINT_OUTSIDE {
        return Err(GeomError::PointOutside(excess));
    }
    debug_assert!((v.norm() - 1.0).abs() < 1e-9, "direction must be unit length");
    Ok(a.support(v) - v.dot(p))
}

/// Longest chord of `A` parallel to `v`.
#[derive(Debug, Clone)]
pub struct WidthSegment {
    pub length: f64,
    pub start: Vector,
    pub end: Vector,
}

/// Maximizes the extent `tau` of `z + t v` over `z in A`, `z + tau v in A`,
/// a linear program over the facet inequalities. For bodies whose affine
/// hull is lower dimensional the chord is computed inside the hull; a
/// direction leaving the hull gives length zero.
pub fn width_segment(a: &Polytope, v: &Vector) -> Result<WidthSegment, GeomError> {
    debug_assert!((v.norm() - 1.0).abs() < 1e-9, "direction must be unit length");
    if a.affine_dim() == 0 {
        return Err(GeomError::DegenerateBody);
    }

    // Work in affine-hull coordinates.
    let basis_t = |p: &Vector| a.to_affine(p);
    let v_aff = {
        let origin = a.from_affine(&Vector::zeros(a.affine_dim()));
        basis_t(&(v + &origin))
    };
    let v_norm = v_aff.norm();
    if v_norm < 1e-12 {
        // Direction orthogonal to the affine hull: every chord is a point.
        let p = a.vertices()[0].clone();
        return Ok(WidthSegment { length: 0.0, start: p.clone(), end: p });
    }
    let dir = v_aff / v_norm;

    let d = a.affine_dim();
    let facets = a.facets_affine();
    // Shift coordinates so the body lies in the positive orthant:
    // y = z - lo, variables (y, tau) >= 0.
    let mut lo = Vector::from_element(d, f64::INFINITY);
    for vert in a.vertices() {
        let c = basis_t(vert);
        for i in 0..d {
            lo[i] = lo[i].min(c[i]);
        }
    }
    // max tau  s.t.  n.(y + lo) <= c  and  n.(y + lo) + tau n.dir <= c
    let nvars = d + 1;
    let mut rows = Vec::with_capacity(2 * facets.len());
    let mut rhs = Vec::with_capacity(2 * facets.len());
    for f in facets {
        let base: Vec<f64> = f.normal.iter().cloned().collect();
        let c = f.offset - f.normal.dot(&lo);
        let mut row1 = base.clone();
        row1.push(0.0);
        rows.push(row1);
        rhs.push(c);
        let mut row2 = base;
        row2.push(f.normal.dot(&dir));
        rows.push(row2);
        rhs.push(c);
    }
    let mut objective = vec![0.0; nvars];
    objective[d] = 1.0;
    let sol = maximize(&LpProblem { objective, rows, rhs })
        .map_err(|e| GeomError::Lp(e.to_string()))?;
    let z = Vector::from_iterator(d, sol.x[..d].iter().cloned()) + lo;
    let tau = sol.x[d];
    // Chord length measured in ambient coordinates equals tau because the
    // affine basis is orthonormal and dir is unit.
    let start = a.from_affine(&z);
    let end = a.from_affine(&(z + dir * tau));
    Ok(WidthSegment { length: tau, start, end })
}

/// Bishop-Phelps witness: a boundary point `p_e` and unit normal `e_hat`
/// such that the plane with normal `e_hat` supports `A` at `p_e`,
/// `|p - p_e| <= rho^-1 d(p, plane_e)`, and `|e - e_hat| <= 2 rho`.
#[derive(Debug, Clone)]
pub struct BishopPhelpsWitness {
    pub point: Vector,
    pub normal: Vector,
    pub distance_bound: f64,
    pub distance: f64,
    pub normal_deviation: f64,
}

pub fn bishop_phelps(
    a: &Polytope,
    p: &Vector,
    e: &Vector,
    rho: f64,
) -> Result<BishopPhelpsWitness, GeomError> {
    if !(0.0..1.0).contains(&rho) || rho == 0.0 {
        return Err(GeomError::NonFinite);
    }
    let excess = a.violation(p);
    if excess > tol::POINT_OUTSIDE {
        return Err(GeomError::PointOutside(excess));
    }
    let plane_dist = supporting_plane_distance(a, p, e)?;
    let dist_bound = plane_dist / rho + tol::FACET;
    let dev_bound = 2.0 * rho + tol::FACET;

    let mut candidates: Vec<(Vector, Vector)> = Vec::new();

    // Vertex x incident facet normal pairs.
    let facets = a.facets_ambient();
    for (vi, vert) in a.vertices().iter().enumerate() {
        for fi in a.incident_facets(vi) {
            candidates.push((vert.clone(), facets[fi].0.clone()));
        }
    }
    // Projection of p onto each facet plane, when it stays inside the body.
    for (normal, offset) in &facets {
        let gap = offset - normal.dot(p);
        let proj = p + normal * gap;
        if a.contains(&proj, tol::FACET) {
            candidates.push((proj, normal.clone()));
        }
    }
    // Support points of directions in the spherical cap around e: any unit w
    // supports A at its support vertex, so these are always valid pairs.
    let mut dirs: Vec<Vector> = vec![e.clone()];
    for (normal, _) in &facets {
        dirs.push(normal.clone());
    }
    for vert in a.vertices() {
        let d = vert - p;
        if d.norm() > 1e-12 {
            dirs.push(d.normalize());
        }
    }
    for target in dirs {
        for k in 0..=8 {
            let t = k as f64 / 8.0;
            let w = e * (1.0 - t) + &target * t;
            if w.norm() > 1e-9 {
                let w = w.normalize();
                candidates.push((a.support_point(&w).clone(), w));
            }
        }
    }

    let mut best: Option<BishopPhelpsWitness> = None;
    for (point, normal) in candidates {
        // Support condition of the pair.
        let support_gap = a.support(&normal) - normal.dot(&point);
        if support_gap > tol::FACET {
            continue;
        }
        let distance = (p - &point).norm();
        let normal_deviation = (e - &normal).norm();
        if distance <= dist_bound && normal_deviation <= dev_bound {
            let better = match &best {
                None => true,
                Some(b) => {
                    normal_deviation < b.normal_deviation - 1e-12
                        || ((normal_deviation - b.normal_deviation).abs() <= 1e-12
                            && distance < b.distance)
                }
            };
            if better {
                best = Some(BishopPhelpsWitness {
                    point,
                    normal,
                    distance_bound: plane_dist / rho,
                    distance,
                    normal_deviation,
                });
            }
        }
    }
    best.ok_or(GeomError::NoWitness)
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

    fn square_sym() -> Polytope {
        Polytope::hull(&[vec2(-1.0, -1.0), vec2(1.0, -1.0), vec2(1.0, 1.0), vec2(-1.0, 1.0)])
            .unwrap()
    }

    #[test]
    fn plane_distance_on_square() {
        let a = square_sym();
        let d = supporting_plane_distance(&a, &Vector::zeros(2), &vec2(1.0, 0.0)).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        let d = supporting_plane_distance(&a, &vec2(0.5, 0.0), &vec2(1.0, 0.0)).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
    }

    #[test]
    fn plane_distance_outside_point_rejected() {
        let a = square_sym();
        assert!(matches!(
            supporting_plane_distance(&a, &vec2(2.0, 0.0), &vec2(1.0, 0.0)),
            Err(GeomError::PointOutside(_))
        ));
    }

    #[test]
    fn plane_distance_matches_vertex_oracle() {
        for inst in 0..50u64 {
            let mut r = rng::stream(42, inst);
            let pts: Vec<Vector> =
                (0..8).map(|_| vec2(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect();
            let Ok(a) = Polytope::hull(&pts) else { continue };
            if !a.is_full_dimensional() {
                continue;
            }
            let p = a.centroid().clone();
            let v = rng::unit_vector(&mut r, 2);
            let d = supporting_plane_distance(&a, &p, &v).unwrap();
            let oracle =
                a.vertices().iter().map(|q| v.dot(&(q - &p))).fold(f64::NEG_INFINITY, f64::max);
            assert!((d - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn width_of_square() {
        let a = square_sym();
        let w = width_segment(&a, &vec2(1.0, 0.0)).unwrap();
        assert!((w.length - 2.0).abs() < 1e-9);
        assert!(((&w.end - &w.start).norm() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn width_of_triangle_along_x() {
        let a = Polytope::hull(&[vec2(0.0, 0.0), vec2(1.0, 0.0), vec2(0.0, 1.0)]).unwrap();
        let w = width_segment(&a, &vec2(1.0, 0.0)).unwrap();
        assert!((w.length - 1.0).abs() < 1e-9, "chord at height 0 has length 1, got {}", w.length);
    }

    #[test]
    fn width_bounded_by_plane_separation() {
        for inst in 0..50u64 {
            let mut r = rng::stream(7, inst);
            let pts: Vec<Vector> =
                (0..10).map(|_| vec2(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect();
            let Ok(a) = Polytope::hull(&pts) else { continue };
            if !a.is_full_dimensional() {
                continue;
            }
            let v = rng::unit_vector(&mut r, 2);
            let w = width_segment(&a, &v).unwrap();
            let p = a.centroid().clone();
            let sep = supporting_plane_distance(&a, &p, &v).unwrap()
                + supporting_plane_distance(&a, &p, &(-&v)).unwrap();
            assert!(w.length <= sep + 1e-9);
            // Endpoints lie in the body and differ by length * v.
            assert!(a.contains(&w.start, 1e-7));
            assert!(a.contains(&w.end, 1e-7));
            assert!((&w.end - &w.start - &v * w.length).norm() < 1e-7);
        }
    }

    #[test]
    fn width_of_segment_body() {
        let a = Polytope::hull(&[vec2(0.0, 0.0), vec2(0.0, 1.0)]).unwrap();
        let along = width_segment(&a, &vec2(0.0, 1.0)).unwrap();
        assert!((along.length - 1.0).abs() < 1e-9);
        let across = width_segment(&a, &vec2(1.0, 0.0)).unwrap();
        assert!(across.length.abs() < 1e-9);
    }

    #[test]
    fn bishop_phelps_axis_case() {
        let a = square01();
        let w = bishop_phelps(&a, &vec2(0.9, 0.5), &vec2(1.0, 0.0), 0.3).unwrap();
        assert!((w.point - vec2(1.0, 0.5)).norm() < 1e-9);
        assert!((w.normal - vec2(1.0, 0.0)).norm() < 1e-12);
        assert!(w.distance <= 0.1 / 0.3 + 1e-9);
    }

    #[test]
    fn bishop_phelps_center_wide_rho() {
        let a = square01();
        let w = bishop_phelps(&a, &vec2(0.5, 0.5), &vec2(1.0, 0.0), 0.9).unwrap();
        assert!(w.distance <= 0.5 / 0.9 + 1e-9);
        assert!(w.normal_deviation <= 1.8 + 1e-9);
    }

    #[test]
    fn bishop_phelps_ball_center() {
        let pts: Vec<Vector> = (0..64)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
                vec2(t.cos(), t.sin())
            })
            .collect();
        let a = Polytope::hull(&pts).unwrap();
        let e = vec2(0.6, 0.8);
        let w = bishop_phelps(&a, &Vector::zeros(2), &e, 0.5).unwrap();
        assert!(w.normal_deviation <= 1.0 + 1e-9);
        assert!((w.point.norm() - 1.0).abs() < 1e-2);
    }

    #[test]
    fn bishop_phelps_wide_slab() {
        // Far-from-vertices case: the witness must come from a facet
        // projection, not a vertex.
        let a = Polytope::hull(&[
            vec2(-10.0, 0.0),
            vec2(10.0, 0.0),
            vec2(10.0, 1.0),
            vec2(-10.0, 1.0),
        ])
        .unwrap();
        let w = bishop_phelps(&a, &vec2(0.0, 0.5), &vec2(0.0, 1.0), 0.9).unwrap();
        assert!(w.distance <= 0.5 / 0.9 + 1e-9);
        assert!(w.normal_deviation <= 1.8 + 1e-9);
    }

    #[test]
    fn bishop_phelps_randomized_battery() {
        let mut failures = 0;
        for inst in 0..500u64 {
            let mut r = rng::stream(1234, inst);
            let npts = r.gen_range(3..10);
            let pts: Vec<Vector> =
                (0..npts).map(|_| vec2(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect();
            let Ok(a) = Polytope::hull(&pts) else { continue };
            if !a.is_full_dimensional() {
                continue;
            }
            // Random interior point: blend centroid toward a vertex.
            let t: f64 = r.gen_range(0.0..0.95);
            let vi = r.gen_range(0..a.vertices().len());
            let p = a.centroid() * (1.0 - t) + &a.vertices()[vi] * t;
            let e = rng::unit_vector(&mut r, 2);
            let rho: f64 = r.gen_range(0.05..0.95);
            match bishop_phelps(&a, &p, &e, rho) {
                Ok(w) => {
                    let dref = supporting_plane_distance(&a, &p, &e).unwrap();
                    assert!(w.distance <= dref / rho + 1e-7);
                    assert!(w.normal_deviation <= 2.0 * rho + 1e-7);
                    let support_gap = a.support(&w.normal) - w.normal.dot(&w.point);
                    assert!(support_gap.abs() <= 1e-7);
                }
                Err(_) => failures += 1,
            }
        }
        assert_eq!(failures, 0, "witness search failed on {failures} instances");
    }
}
