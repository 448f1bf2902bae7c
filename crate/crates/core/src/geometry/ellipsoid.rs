//! Ellipsoids and the John ellipsoid of a polytope.
//!
//! The inner ellipsoid is obtained by computing the minimum-volume enclosing
//! ellipsoid of the vertex set (Khachiyan ascent with Wolfe-Atwood away
//! steps, which converges linearly and reaches the tight tolerances the
//! double-inclusion check demands) and shrinking it by the dimension about
//! its center.

use super::{GeomError, Polytope};
use crate::{tol, Matrix, Vector};

/// `E = { p : (p - center)^T shape (p - center) <= 1 }` with `shape`
/// symmetric positive definite.
#[derive(Debug, Clone)]
pub struct Ellipsoid {
    pub center: Vector,
    pub shape: Matrix,
}

impl Ellipsoid {
    pub fn new(center: Vector, shape: Matrix) -> Result<Self, GeomError> {
        let d = center.len();
        if shape.nrows() != d || shape.ncols() != d {
            return Err(GeomError::NonFinite);
        }
        let asym = (&shape - shape.transpose()).abs().max();
        if asym > tol::ELLIPSOID_SYM * (1.0 + shape.abs().max()) {
            return Err(GeomError::NonFinite);
        }
        let eig = shape.clone().symmetric_eigenvalues();
        if eig.iter().any(|&l| l <= 0.0) {
            return Err(GeomError::DegenerateBody);
        }
        Ok(Self { center, shape })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn quadratic(&self, p: &Vector) -> f64 {
        let r = p - &self.center;
        (self.shape.clone() * &r).dot(&r)
    }

    pub fn contains(&self, p: &Vector, slack: f64) -> bool {
        self.quadratic(p) <= 1.0 + slack
    }

    /// `max_{p in E} <v, p>`.
    pub fn support(&self, v: &Vector) -> f64 {
        let inv = self.shape.clone().try_inverse().expect("SPD shape");
        v.dot(&self.center) + (inv * v).dot(v).sqrt()
    }

    /// Dilation about the center: radius scaled by `k`.
    pub fn scaled_about_center(&self, k: f64) -> Self {
        Self { center: self.center.clone(), shape: &self.shape / (k * k) }
    }

    /// Pairs `(semi-axis length, unit axis direction)`.
    pub fn principal_axes(&self) -> Vec<(f64, Vector)> {
        let eig = self.shape.clone().symmetric_eigen();
        let mut axes: Vec<(f64, Vector)> = (0..self.dim())
            .map(|i| {
                (
                    1.0 / eig.eigenvalues[i].sqrt(),
                    eig.eigenvectors.column(i).clone_owned(),
                )
            })
            .collect();
        axes.sort_by(|a, b| b.0.total_cmp(&a.0));
        axes
    }

    pub fn volume(&self) -> f64 {
        let d = self.dim();
        unit_ball_volume(d) / self.shape.determinant().sqrt()
    }
}

pub fn unit_ball_volume(d: usize) -> f64 {
    // pi^(d/2) / Gamma(d/2 + 1)
    match d {
        0 => 1.0,
        1 => 2.0,
        2 => std::f64::consts::PI,
        _ => 2.0 * std::f64::consts::PI / d as f64 * unit_ball_volume(d - 2),
    }
}

/// Minimum-volume enclosing ellipsoid of a full-dimensional point set.
///
/// Stops when the duality gap `max_i w_i / (d+1) - 1` and its away-step
/// counterpart drop below `gap_tol`. The returned shape matrix is rescaled
/// so that every input point is covered exactly.
pub fn mvee(points: &[Vector], gap_tol: f64, max_iter: usize) -> Result<Ellipsoid, GeomError> {
    let m = points.len();
    let d = points[0].len();
    if m <= d {
        return Err(GeomError::DegenerateBody);
    }
    let lifted: Vec<Vector> = points
        .iter()
        .map(|p| {
            let mut z = Vector::zeros(d + 1);
            z.rows_mut(0, d).copy_from(p);
            z[d] = 1.0;
            z
        })
        .collect();

    let mut u = vec![1.0 / m as f64; m];
    let dd = (d + 1) as f64;
    let mut converged = false;
    for _ in 0..max_iter {
        let mut x = Matrix::zeros(d + 1, d + 1);
        for (ui, z) in u.iter().zip(&lifted) {
            if *ui > 0.0 {
                x += z * z.transpose() * *ui;
            }
        }
        let Some(xinv) = x.try_inverse() else {
            return Err(GeomError::DegenerateBody);
        };
        let w: Vec<f64> = lifted.iter().map(|z| (&xinv * z).dot(z)).collect();

        let (jmax, &wmax) = w
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty");
        let (jmin, &wmin) = w
            .iter()
            .enumerate()
            .filter(|&(i, _)| u[i] > 1e-15)
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty");

        let add_gap = wmax / dd - 1.0;
        let away_gap = 1.0 - wmin / dd;
        if add_gap <= gap_tol && away_gap <= gap_tol {
            converged = true;
            break;
        }

        if add_gap >= away_gap {
            let step = (wmax - dd) / (dd * (wmax - 1.0));
            for v in u.iter_mut() {
                *v *= 1.0 - step;
            }
            u[jmax] += step;
        } else {
            // Away step, clamped so the weight stays nonnegative.
            let step_raw = (wmin - dd) / (dd * (wmin - 1.0));
            let step = step_raw.max(-u[jmin] / (1.0 - u[jmin]));
            for v in u.iter_mut() {
                *v *= 1.0 - step;
            }
            u[jmin] += step;
            u[jmin] = u[jmin].max(0.0);
        }
    }
    if !converged {
        return Err(GeomError::NoConvergence(max_iter));
    }

    let mut center = Vector::zeros(d);
    for (ui, p) in u.iter().zip(points) {
        center += p * *ui;
    }
    let mut second = Matrix::zeros(d, d);
    for (ui, p) in u.iter().zip(points) {
        second += p * p.transpose() * *ui;
    }
    let sigma = second - &center * center.transpose();
    let Some(mut shape) = sigma.try_inverse() else {
        return Err(GeomError::DegenerateBody);
    };
    shape /= d as f64;
    shape = (&shape + shape.transpose()) * 0.5;

    // Exact coverage: inflate by the largest violation.
    let e = Ellipsoid { center: center.clone(), shape: shape.clone() };
    let kappa = points.iter().map(|p| e.quadratic(p)).fold(0.0f64, f64::max);
    Ellipsoid::new(center, shape / kappa)
}

/// Inner ellipsoid with the double inclusion
/// `E subset A subset p_cm + dim (E - p_cm)`.
///
/// Returns the ellipsoid and its center.
pub fn john_ellipsoid(a: &Polytope) -> Result<(Ellipsoid, Vector), GeomError> {
    john_ellipsoid_with(a, tol::MVEE_GAP, tol::MVEE_MAX_ITER)
}

pub fn john_ellipsoid_with(
    a: &Polytope,
    gap_tol: f64,
    max_iter: usize,
) -> Result<(Ellipsoid, Vector), GeomError> {
    if !a.is_full_dimensional() {
        return Err(GeomError::DegenerateBody);
    }
    let d = a.ambient_dim() as f64;
    let outer = mvee(a.vertices(), gap_tol, max_iter)?;
    let inner = Ellipsoid::new(outer.center.clone(), &outer.shape * (d * d))?;
    Ok((inner, outer.center))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polytope::vec2;

    fn check_double_inclusion(a: &Polytope, e: &Ellipsoid, p_cm: &Vector) {
        let n = a.ambient_dim() as f64;
        // E subset A: support of E along each facet normal stays below the offset.
        for (normal, offset) in a.facets_ambient() {
            assert!(
                e.support(&normal) <= offset + tol::JOHN_INCLUSION,
                "inner inclusion violated by {:.3e}",
                e.support(&normal) - offset
            );
        }
        // A subset p_cm + n (E - p_cm).
        let blown = e.scaled_about_center(n);
        for v in a.vertices() {
            let q = blown.quadratic(v);
            assert!(q <= 1.0 + tol::JOHN_INCLUSION, "outer inclusion violated: {q}");
        }
        assert_eq!(p_cm.len(), a.ambient_dim());
    }

    #[test]
    fn square_john_ellipsoid() {
        let a = Polytope::hull(&[
            vec2(-1.0, -1.0),
            vec2(1.0, -1.0),
            vec2(1.0, 1.0),
            vec2(-1.0, 1.0),
        ])
        .unwrap();
        let (e, p_cm) = john_ellipsoid(&a).unwrap();
        assert!(p_cm.norm() < 1e-7);
        check_double_inclusion(&a, &e, &p_cm);
        // MVEE of the square is the disk of radius sqrt(2); shrunk by n = 2.
        let axes = e.principal_axes();
        for (len, _) in axes {
            assert!((len - std::f64::consts::SQRT_2 / 2.0).abs() < 1e-6);
        }
    }

    #[test]
    fn ball_polytope_john_ellipsoid() {
        let pts: Vec<Vector> = (0..64)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
                vec2(t.cos(), t.sin())
            })
            .collect();
        let a = Polytope::hull(&pts).unwrap();
        let (e, p_cm) = john_ellipsoid(&a).unwrap();
        check_double_inclusion(&a, &e, &p_cm);
        assert!(p_cm.norm() < 1e-6);
    }

    #[test]
    fn triangle_tight_inclusion() {
        // The inner inclusion for a simplex is tight (it is the Steiner
        // inellipse), exercising the convergence tolerance.
        let a = Polytope::hull(&[vec2(0.0, 0.0), vec2(1.0, 0.0), vec2(0.0, 1.0)]).unwrap();
        let (e, p_cm) = john_ellipsoid(&a).unwrap();
        check_double_inclusion(&a, &e, &p_cm);
        assert!((p_cm - vec2(1.0 / 3.0, 1.0 / 3.0)).norm() < 1e-6);
    }

    #[test]
    fn degenerate_body_rejected() {
        let a = Polytope::hull(&[vec2(0.0, 0.0), vec2(0.0, 1.0)]).unwrap();
        assert!(matches!(john_ellipsoid(&a), Err(GeomError::DegenerateBody)));
    }

    #[test]
    fn ellipsoid_volume_formula() {
        let e = Ellipsoid::new(
            Vector::zeros(2),
            Matrix::from_diagonal(&Vector::from_vec(vec![1.0 / 4.0, 1.0])),
        )
        .unwrap();
        // Semi-axes 2 and 1.
        assert!((e.volume() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }
}
