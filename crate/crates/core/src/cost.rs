//! Cost functions on box charts.
//!
//! Four built-in kinds, each with analytic derivatives up to the mixed
//! second order:
//!
//! * `bilinear`       c(x, y) = -<x, y>
//! * `quadratic`      c(x, y) = |x - y|^2 / 2
//! * `power(p)`       c(x, y) = |x - y|^p,  p in (-2, 1) u (1, inf)
//! * `inverse_square` c(x, y) = |x - y|^-2
//!
//! The singular kinds live on separated boxes; the minimal admitted
//! separation is enforced at construction. Finite differences serve only as
//! a cross-check of the analytic formulas.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::BoxDomain;
use crate::report::{ConditionReport, Verdict, Witness};
use crate::{rng, tol, Matrix, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostKind {
    Bilinear,
    Quadratic,
    Power { p: f64 },
    InverseSquare,
}

impl CostKind {
    pub fn name(&self) -> String {
        match self {
            CostKind::Bilinear => "bilinear".into(),
            CostKind::Quadratic => "quadratic".into(),
            CostKind::Power { p } => format!("power({p})"),
            CostKind::InverseSquare => "inverse_square".into(),
        }
    }

    /// Kinds whose derivatives or cross-Hessian degenerate on the diagonal
    /// `x = xbar`; these require separated boxes. Every power exponent
    /// qualifies: the cross-Hessian determinant vanishes or blows up at
    /// `r = 0` for all of them.
    pub fn is_singular(&self) -> bool {
        matches!(self, CostKind::Power { .. } | CostKind::InverseSquare)
    }
}

#[derive(Debug, Error)]
pub enum CostError {
    #[error("power exponent {0} outside (-2,1) u (1,inf)")]
    BadExponent(f64),
    #[error("domain boxes must share the dimension")]
    DimensionMismatch,
    #[error("singular cost requires separated boxes: min corner distance {found:.3e} < required {required:.3e}")]
    NotSeparated { found: f64, required: f64 },
    #[error("pair (x, xbar) within the singular separation: |x - xbar| = {0:.3e}")]
    SingularPair(f64),
    #[error("cross-Hessian is numerically degenerate at the requested pair: |det| = {0:.3e}")]
    DegeneratePair(f64),
}

/// A cost function together with its charts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CostModel {
    pub kind: CostKind,
    /// Source box Omega.
    pub omega: BoxDomain,
    /// Target box Omega-bar.
    pub omega_bar: BoxDomain,
    /// Minimal |x - xbar| admitted for singular kinds.
    pub singular_separation: f64,
    /// Base step for finite-difference cross-checks.
    pub fd_step: f64,
}

/// Mixed second derivative block `-D Dbar c` and its determinant.
///
/// In chart coordinates this is the matrix `C_ij = -d^2 c / dx_i dxbar_j`,
/// read as the linear map sending target tangents to source cotangents. Its
/// transpose is the adjoint map; the inverse of the transpose is the
/// transform `E` used to pull covectors to target tangents.
#[derive(Debug, Clone)]
pub struct CrossHessian {
    pub matrix: Matrix,
    pub det: f64,
}

impl CrossHessian {
    /// Condition number estimate from singular values.
    pub fn condition_number(&self) -> f64 {
        let svd = self.matrix.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        smax / smin
    }

    /// `E = C^-1`: covector at x -> tangent at xbar.
    pub fn to_target_tangent(&self, eta: &Vector) -> Vector {
        self.matrix.clone().lu().solve(eta).expect("cross-Hessian verified invertible")
    }

    /// `E^-1 = C`: tangent at xbar -> covector at x.
    pub fn to_source_covector(&self, w: &Vector) -> Vector {
        &self.matrix * w
    }

    /// Adjoint transform `E* = (C^T)^-1`: covector at xbar -> tangent at x.
    pub fn adjoint_to_source_tangent(&self, p: &Vector) -> Vector {
        self.matrix.transpose().lu().solve(p).expect("cross-Hessian verified invertible")
    }
}

/// Value plus first derivatives plus the cross block.
#[derive(Debug, Clone)]
pub struct CostDerivatives {
    pub value: f64,
    /// D c(x, xbar): derivative in x.
    pub grad_x: Vector,
    /// Dbar c(x, xbar): derivative in xbar.
    pub grad_xbar: Vector,
    pub cross: CrossHessian,
}

impl CostModel {
    pub fn new(
        kind: CostKind,
        omega: BoxDomain,
        omega_bar: BoxDomain,
        singular_separation: f64,
        fd_step: f64,
    ) -> Result<Self, CostError> {
        if omega.dim() != omega_bar.dim() {
            return Err(CostError::DimensionMismatch);
        }
        if let CostKind::Power { p } = kind {
            let inside_low = p > -2.0 + 1e-12 && p < 1.0 - 1e-12 && p.abs() > 1e-9;
            let inside_high = p > 1.0 + 1e-12;
            if !(inside_low || inside_high) {
                return Err(CostError::BadExponent(p));
            }
        }
        let model = Self { kind, omega, omega_bar, singular_separation, fd_step };
        if model.kind.is_singular() {
            let found = model.min_corner_separation();
            if found < singular_separation || singular_separation <= 0.0 {
                return Err(CostError::NotSeparated { found, required: singular_separation });
            }
        }
        Ok(model)
    }

    /// Nonsingular kind on a shared cube, the default laboratory setup.
    pub fn flat(kind: CostKind, dim: usize) -> Self {
        assert!(!kind.is_singular());
        Self {
            kind,
            omega: BoxDomain::cube(dim, 0.0, 1.0),
            omega_bar: BoxDomain::cube(dim, 0.0, 1.0),
            singular_separation: 0.0,
            fd_step: tol::FD_STEP,
        }
    }

    /// Singular kind on separated cubes `[0,1]^dim` and `[3,4]^dim`.
    pub fn separated(kind: CostKind, dim: usize) -> Self {
        assert!(kind.is_singular());
        Self::new(
            kind,
            BoxDomain::cube(dim, 0.0, 1.0),
            BoxDomain::cube(dim, 3.0, 4.0),
            1.0,
            tol::FD_STEP,
        )
        .expect("separated cubes satisfy the separation requirement")
    }

    pub fn dim(&self) -> usize {
        self.omega.dim()
    }

    /// Distance between the two boxes (coordinatewise gap).
    fn min_corner_separation(&self) -> f64 {
        let mut d2 = 0.0;
        for i in 0..self.dim() {
            let gap = (self.omega_bar.lo[i] - self.omega.hi[i])
                .max(self.omega.lo[i] - self.omega_bar.hi[i])
                .max(0.0);
            d2 += gap * gap;
        }
        d2.sqrt()
    }

    fn check_pair(&self, x: &Vector, xbar: &Vector) -> Result<(), CostError> {
        if self.kind.is_singular() {
            let r = (x - xbar).norm();
            if r < self.singular_separation {
                return Err(CostError::SingularPair(r));
            }
        }
        Ok(())
    }

    pub fn value(&self, x: &Vector, xbar: &Vector) -> f64 {
        match self.kind {
            CostKind::Bilinear => -x.dot(xbar),
            CostKind::Quadratic => (x - xbar).norm_squared() / 2.0,
            CostKind::Power { p } => (x - xbar).norm().powf(p),
            CostKind::InverseSquare => (x - xbar).norm_squared().recip(),
        }
    }

    /// Analytic value, gradients, and cross block.
    pub fn derivatives(&self, x: &Vector, xbar: &Vector) -> Result<CostDerivatives, CostError> {
        self.check_pair(x, xbar)?;
        let n = self.dim();
        let d = x - xbar;
        let (value, grad_x, cross) = match self.kind {
            CostKind::Bilinear => (-x.dot(xbar), -xbar.clone(), Matrix::identity(n, n)),
            CostKind::Quadratic => (d.norm_squared() / 2.0, d.clone(), Matrix::identity(n, n)),
            CostKind::Power { p } => radial_power(&d, p),
            CostKind::InverseSquare => radial_power(&d, -2.0),
        };
        let grad_xbar = match self.kind {
            CostKind::Bilinear => -x.clone(),
            _ => -&grad_x,
        };
        let det = cross.determinant();
        if det.abs() < tol::CROSS_DET_MIN {
            return Err(CostError::DegeneratePair(det.abs()));
        }
        Ok(CostDerivatives { value, grad_x, grad_xbar, cross: CrossHessian { matrix: cross, det } })
    }

    /// Source-side momentum `p_(x,xbar) = -Dbar c(x, xbar)`.
    pub fn momentum_source(&self, x: &Vector, xbar: &Vector) -> Result<Vector, CostError> {
        Ok(-self.derivatives(x, xbar)?.grad_xbar)
    }

    /// Target-side momentum `pbar_(x,xbar) = -D c(x, xbar)`.
    pub fn momentum_target(&self, x: &Vector, xbar: &Vector) -> Result<Vector, CostError> {
        Ok(-self.derivatives(x, xbar)?.grad_x)
    }

    /// Gram matrix of the inner product `<v, w> = <E v, E w>` on covectors
    /// at x, with `E = (-Dbar D c)^-1` and the identity ambient metric.
    pub fn metric(&self, x: &Vector, xbar: &Vector) -> Result<Matrix, CostError> {
        let der = self.derivatives(x, xbar)?;
        let c = &der.cross.matrix;
        // Gram of E = C^-1 under the identity metric: (C C^T)^-1.
        let inv = (c * c.transpose())
            .try_inverse()
            .ok_or(CostError::DegeneratePair(der.cross.det.abs()))?;
        Ok((&inv + inv.transpose()) * 0.5)
    }

    /// Central-difference gradients and cross block with one Richardson
    /// refinement, for cross-checking the analytic formulas.
    pub fn derivatives_fd(&self, x: &Vector, xbar: &Vector) -> CostDerivatives {
        let n = self.dim();
        let h = self.fd_step;
        let richardson = |coarse: f64, fine: f64| (4.0 * fine - coarse) / 3.0;
        let d1 = |f: &dyn Fn(f64) -> f64, h: f64| (f(h) - f(-h)) / (2.0 * h);

        let mut grad_x = Vector::zeros(n);
        let mut grad_xbar = Vector::zeros(n);
        for i in 0..n {
            let fx = |t: f64| {
                let mut xx = x.clone();
                xx[i] += t;
                self.value(&xx, xbar)
            };
            grad_x[i] = richardson(d1(&fx, h), d1(&fx, h / 2.0));
            let fy = |t: f64| {
                let mut yy = xbar.clone();
                yy[i] += t;
                self.value(x, &yy)
            };
            grad_xbar[i] = richardson(d1(&fy, h), d1(&fy, h / 2.0));
        }
        let mut cross = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mixed = |hh: f64| {
                    let eval = |sx: f64, sy: f64| {
                        let mut xx = x.clone();
                        let mut yy = xbar.clone();
                        xx[i] += sx;
                        yy[j] += sy;
                        self.value(&xx, &yy)
                    };
                    (eval(hh, hh) - eval(hh, -hh) - eval(-hh, hh) + eval(-hh, -hh))
                        / (4.0 * hh * hh)
                };
                // cross = -d^2 c / dx_i dxbar_j
                cross[(i, j)] = -richardson(mixed(h), mixed(h / 2.0));
            }
        }
        let det = cross.determinant();
        CostDerivatives { value: self.value(x, xbar), grad_x, grad_xbar, cross: CrossHessian { matrix: cross, det } }
    }
}

/// Derivatives of `c = r^p` with `r = |x - xbar|`, `d = x - xbar`:
/// `Dc = p r^(p-2) d` and `-D Dbar c = p r^(p-2) (I + (p-2) dhat dhat^T)`.
fn radial_power(d: &Vector, p: f64) -> (f64, Vector, Matrix) {
    let n = d.len();
    let r = d.norm();
    let value = r.powf(p);
    let grad_x = d * (p * r.powf(p - 2.0));
    let dhat = d / r;
    let cross =
        (Matrix::identity(n, n) + &dhat * dhat.transpose() * (p - 2.0)) * (p * r.powf(p - 2.0));
    (value, grad_x, cross)
}

/// Structural audit: samples pairs, reports the worst cross-Hessian
/// determinant (nondegeneracy proxy) and verifies the twist inversion
/// round-trips through the Newton solve.
pub fn audit_structure(cost: &CostModel, n_samples: usize, seed: u64) -> ConditionReport {
    let mut min_det = f64::INFINITY;
    let mut worst: Option<Witness> = None;
    let mut failures = Vec::new();
    let mut discarded = 0usize;

    for k in 0..n_samples {
        let mut r = rng::stream(seed, k as u64);
        let x = rng::point_in_box(&mut r, &cost.omega.lo, &cost.omega.hi);
        let xbar = rng::point_in_box(&mut r, &cost.omega_bar.lo, &cost.omega_bar.hi);
        let der = match cost.derivatives(&x, &xbar) {
            Ok(d) => d,
            Err(_) => {
                discarded += 1;
                continue;
            }
        };
        if der.cross.det.abs() < min_det {
            min_det = der.cross.det.abs();
            worst = Some(
                Witness::new()
                    .with("x", x.iter().cloned())
                    .with("xbar", xbar.iter().cloned()),
            );
        }
        // Twist check: invert xbar -> -Dc(x, xbar) by Newton and round-trip.
        let pbar = -der.grad_x;
        match crate::cexp::cexp_target(cost, &x, &pbar) {
            Ok(back) => {
                let err = (&back - &xbar).norm();
                if err > tol::CEXP_ROUNDTRIP {
                    failures.push(format!("twist round-trip error {err:.3e} at sample {k}"));
                }
            }
            Err(e) => failures.push(format!("twist inversion failed at sample {k}: {e}")),
        }
    }

    let pass = failures.is_empty() && min_det > tol::CROSS_DET_MIN;
    let mut notes = failures;
    notes.truncate(5);
    ConditionReport {
        condition: format!("structure({})", cost.kind.name()),
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        extremal: min_det,
        witness: worst,
        samples: n_samples,
        discarded,
        seed,
        tolerance: tol::CROSS_DET_MIN,
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(coords: &[f64]) -> Vector {
        Vector::from_vec(coords.to_vec())
    }

    #[test]
    fn bilinear_derivatives_are_exact() {
        let c = CostModel::flat(CostKind::Bilinear, 2);
        let der = c.derivatives(&v(&[0.3, 0.4]), &v(&[0.7, 0.1])).unwrap();
        assert!((der.grad_x - v(&[-0.7, -0.1])).norm() < 1e-15);
        assert!((der.grad_xbar - v(&[-0.3, -0.4])).norm() < 1e-15);
        assert!((der.cross.matrix.clone() - Matrix::identity(2, 2)).abs().max() < 1e-15);
        assert!((der.cross.det - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quadratic_derivatives_are_exact() {
        let c = CostModel::flat(CostKind::Quadratic, 3);
        let x = v(&[0.1, 0.2, 0.9]);
        let y = v(&[0.5, 0.5, 0.5]);
        let der = c.derivatives(&x, &y).unwrap();
        assert!((der.grad_x - (&x - &y)).norm() < 1e-15);
        assert!((der.cross.matrix.clone() - Matrix::identity(3, 3)).abs().max() < 1e-15);
    }

    #[test]
    fn inverse_square_reference_point() {
        let c = CostModel::separated(CostKind::InverseSquare, 2);
        // Reference pair |x - xbar| = 1 evaluated outside the boxes is fine
        // for the formula itself.
        let x = v(&[0.0, 0.0]);
        let y = v(&[1.0, 0.0]);
        let der = c.derivatives(&x, &y).unwrap();
        assert!((der.value - 1.0).abs() < 1e-15);
        assert!((der.grad_x - v(&[2.0, 0.0])).norm() < 1e-12);
    }

    #[test]
    fn analytic_matches_fd_all_kinds() {
        let kinds = [
            CostModel::flat(CostKind::Bilinear, 2),
            CostModel::flat(CostKind::Quadratic, 2),
            CostModel::separated(CostKind::Power { p: -1.0 }, 2),
            CostModel::separated(CostKind::Power { p: 0.5 }, 2),
            CostModel::separated(CostKind::Power { p: 3.0 }, 2),
            CostModel::separated(CostKind::InverseSquare, 2),
        ];
        for c in kinds {
            for k in 0..500u64 {
                let mut r = rng::stream(17, k);
                let x = rng::point_in_box(&mut r, &c.omega.lo, &c.omega.hi);
                let y = rng::point_in_box(&mut r, &c.omega_bar.lo, &c.omega_bar.hi);
                let a = c.derivatives(&x, &y).unwrap();
                let f = c.derivatives_fd(&x, &y);
                let scale = 1.0 + a.grad_x.norm().max(a.grad_xbar.norm());
                assert!(
                    (&a.grad_x - &f.grad_x).norm() / scale < tol::DERIV_FD_REL,
                    "{} grad_x mismatch",
                    c.kind.name()
                );
                assert!((&a.grad_xbar - &f.grad_xbar).norm() / scale < tol::DERIV_FD_REL);
                let mscale = 1.0 + a.cross.matrix.abs().max();
                assert!(
                    (&a.cross.matrix - &f.cross.matrix).abs().max() / mscale < tol::DERIV_FD_REL,
                    "{} cross mismatch",
                    c.kind.name()
                );
            }
        }
    }

    #[test]
    fn metric_identity_for_flat_kinds() {
        for kind in [CostKind::Bilinear, CostKind::Quadratic] {
            let c = CostModel::flat(kind, 2);
            let g = c.metric(&v(&[0.2, 0.8]), &v(&[0.9, 0.3])).unwrap();
            assert!((g - Matrix::identity(2, 2)).abs().max() < 1e-14);
        }
    }

    #[test]
    fn metric_spd_for_inverse_square() {
        let c = CostModel::separated(CostKind::InverseSquare, 2);
        for k in 0..50u64 {
            let mut r = rng::stream(5, k);
            let x = rng::point_in_box(&mut r, &c.omega.lo, &c.omega.hi);
            let y = rng::point_in_box(&mut r, &c.omega_bar.lo, &c.omega_bar.hi);
            let g = c.metric(&x, &y).unwrap();
            let eig = g.clone().symmetric_eigenvalues();
            assert!(eig.iter().all(|&l| l > 0.0), "metric not SPD");
            // Eigenvalues equal squared singular values of E = C^-1.
            let der = c.derivatives(&x, &y).unwrap();
            let e = der.cross.matrix.clone().try_inverse().unwrap();
            let mut sv: Vec<f64> =
                e.svd(false, false).singular_values.iter().map(|s| s * s).collect();
            let mut ev: Vec<f64> = eig.iter().cloned().collect();
            sv.sort_by(f64::total_cmp);
            ev.sort_by(f64::total_cmp);
            for (a, b) in sv.iter().zip(&ev) {
                assert!((a - b).abs() / a.max(1e-300) < 1e-8);
            }
        }
    }

    #[test]
    fn singular_pair_rejected() {
        let c = CostModel::separated(CostKind::InverseSquare, 2);
        let near = v(&[0.5, 0.5]);
        let near_bar = v(&[0.6, 0.5]);
        assert!(matches!(c.derivatives(&near, &near_bar), Err(CostError::SingularPair(_))));
    }

    #[test]
    fn overlapping_singular_boxes_rejected() {
        let err = CostModel::new(
            CostKind::InverseSquare,
            BoxDomain::cube(2, 0.0, 1.0),
            BoxDomain::cube(2, 0.5, 1.5),
            0.5,
            tol::FD_STEP,
        );
        assert!(matches!(err, Err(CostError::NotSeparated { .. })));
    }

    #[test]
    fn bad_power_exponent_rejected() {
        for p in [1.0, 0.0, -2.0, -2.5] {
            let err = CostModel::new(
                CostKind::Power { p },
                BoxDomain::cube(2, 0.0, 1.0),
                BoxDomain::cube(2, 3.0, 4.0),
                1.0,
                tol::FD_STEP,
            );
            assert!(err.is_err(), "p = {p} should be rejected");
        }
    }

    #[test]
    fn audit_flat_kinds_pass_with_unit_det() {
        for kind in [CostKind::Bilinear, CostKind::Quadratic] {
            let c = CostModel::flat(kind, 2);
            let rep = audit_structure(&c, 200, 3);
            assert!(rep.passed(), "{:?}", rep.notes);
            assert!((rep.extremal - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn audit_inverse_square_passes_on_separated_boxes() {
        let c = CostModel::separated(CostKind::InverseSquare, 2);
        let rep = audit_structure(&c, 200, 3);
        assert!(rep.passed(), "{:?}", rep.notes);
        assert!(rep.extremal > 0.0);
    }

    #[test]
    fn cost_config_round_trip() {
        let c = CostModel::separated(CostKind::Power { p: -1.0 }, 2);
        let s = serde_json::to_string(&c).unwrap();
        let back: CostModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back.kind, c.kind);
        assert_eq!(back.omega, c.omega);
    }
}
