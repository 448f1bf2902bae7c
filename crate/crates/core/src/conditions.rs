//! Curvature-condition checks for cost functions.
//!
//! The central quantity is a cross-curvature value computed in chart
//! coordinates as
//!
//! ```text
//! S(x, xbar)(V, V, eta, eta) = -(3/2) d^2/ds^2 d^2/dt^2 c(x + s V, ybar(t))
//! ```
//!
//! where `ybar(t)` follows the straight momentum path
//! `-Dc(x, ybar(t)) = pbar(x,xbar) + t eta`. With a flat ambient chart the
//! straight line in `x` is the chart geodesic, and the momentum-linear path
//! in `xbar` carries exactly the second-order correction that turns the
//! naive mixed fourth derivative into the curvature tensor, so this agrees
//! with the classical coordinate expression for every choice of `V` and
//! `eta`. Nonnegativity over pairs with `<eta, V> = 0` is the weak
//! condition, a strict margin over the same pairs the strong one, and
//! dropping the orthogonality the cross-curvature variant.
//!
//! Everything else in this module samples the scalar function
//! `f(t) = -c(x, xbar(t)) + c(x0, xbar(t))` along c-segments (or its
//! mirror): the maximum principle says f is maximized at the endpoints, the
//! quasiconvexity constant M bounds interior increments by `M t` times the
//! endpoint increment, and the second-derivative constant C bounds
//! `f'' >= -C |f'|` with the companion comparison `M <= e^C`.

use serde::{Deserialize, Serialize};

use crate::cexp::{self, CSegment, Side};
use crate::cost::CostModel;
use crate::report::{ConditionReport, Verdict, Witness};
use crate::{rng, tol, Vector};

/// One tensor query.
#[derive(Debug, Clone)]
pub struct MTWQuery {
    pub x: Vector,
    pub xbar: Vector,
    pub v: Vector,
    pub eta: Vector,
}

impl MTWQuery {
    /// Normalizes both vectors; when `orthogonal` is set, projects `eta`
    /// against `v` first (Gram-Schmidt) and renormalizes.
    pub fn normalized(
        x: Vector,
        xbar: Vector,
        v: Vector,
        eta: Vector,
        orthogonal: bool,
    ) -> Option<Self> {
        let vn = v.norm();
        if vn < 1e-12 {
            return None;
        }
        let v = v / vn;
        let mut eta = eta;
        if orthogonal {
            let c = eta.dot(&v);
            eta -= &v * c;
        }
        let en = eta.norm();
        if en < 1e-9 {
            return None;
        }
        Some(Self { x, xbar, v, eta: eta / en })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MTWValue {
    pub value: f64,
    /// Richardson disagreement, an estimate of the finite-difference error.
    pub fd_error: f64,
}

/// Raw tensor evaluation; homogeneous of degree two in `v` and in `eta`.
///
/// Internally both directions are rescaled so the stencil moves `x` and
/// `xbar` by O(h) each: the momentum direction is divided by the norm of
/// the target velocity `C^-1 eta` it induces. The result is scaled back by
/// homogeneity, so the returned value refers to the caller's raw `v`, `eta`.
pub fn mtw_value(cost: &CostModel, q: &MTWQuery) -> Result<MTWValue, cexp::CexpError> {
    let der0 = cost.derivatives(&q.x, &q.xbar)?;
    let pbar0 = -&der0.grad_x;
    let v_norm = q.v.norm();
    let v_unit = &q.v / v_norm;
    let target_vel = der0.cross.to_target_tangent(&q.eta);
    let vel_norm = target_vel.norm();
    let eta_scaled = &q.eta / vel_norm;

    let scale = 1.0 + q.xbar.norm().max(q.x.norm());
    let h = tol::mtw_fd_step(scale);

    let stencil = |hs: f64, ht: f64| -> Result<f64, cexp::CexpError> {
        let mut acc = 0.0;
        for (bt, wt) in [(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)] {
            let p = &pbar0 + &eta_scaled * (bt * ht);
            let ybar = cexp::cexp_target_unchecked(cost, &q.x, &p)?;
            for (bs, ws) in [(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)] {
                let xs = &q.x + &v_unit * (bs * hs);
                acc += wt * ws * cost.value(&xs, &ybar);
            }
        }
        Ok(acc / (hs * hs * ht * ht))
    };

    let coarse = stencil(h, h)?;
    let fine = stencil(h / 2.0, h / 2.0)?;
    let extrapolated = (4.0 * fine - coarse) / 3.0;
    let back_scale = (v_norm * vel_norm).powi(2);
    let fd_error = back_scale * 1.5 * (fine - coarse).abs() / 3.0;
    Ok(MTWValue { value: -1.5 * extrapolated * back_scale, fd_error })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ConditionKind {
    A3w,
    A3s,
    Nncc,
}

impl ConditionKind {
    pub fn name(&self) -> &'static str {
        match self {
            ConditionKind::A3w => "A3w",
            ConditionKind::A3s => "A3s",
            ConditionKind::Nncc => "NNCC",
        }
    }

    pub fn orthogonal_pairs(&self) -> bool {
        !matches!(self, ConditionKind::Nncc)
    }
}

/// Verdict thresholds. `a3w_tol` absorbs finite-difference noise around
/// zero; `strict_delta` is the margin demanded of the strict conditions.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConditionThresholds {
    pub a3w_tol: f64,
    pub strict_delta: f64,
}

impl Default for ConditionThresholds {
    fn default() -> Self {
        Self { a3w_tol: 1e-5, strict_delta: 1e-4 }
    }
}

/// Samples tensor queries and classifies the cost.
pub fn check_condition(
    cost: &CostModel,
    kind: ConditionKind,
    n_samples: usize,
    seed: u64,
    thresholds: ConditionThresholds,
) -> ConditionReport {
    let dim = cost.dim();
    let mut min_value = f64::INFINITY;
    let mut witness = None;
    let mut discarded = 0usize;

    if kind.orthogonal_pairs() && dim < 2 {
        return ConditionReport {
            condition: format!("{}({})", kind.name(), cost.kind.name()),
            verdict: Verdict::Pass,
            extremal: 0.0,
            witness: None,
            samples: 0,
            discarded: 0,
            seed,
            tolerance: thresholds.a3w_tol,
            notes: vec!["vacuous in dimension 1: no orthogonal pairs".into()],
        };
    }

    // Interior sampling: the nested stencil needs room around the pair.
    let margin_x = 0.02 * cost.omega.volume().powf(1.0 / dim as f64);
    let margin_y = 0.05 * cost.omega_bar.volume().powf(1.0 / dim as f64);
    let omega = cost.omega.shrunk(margin_x);
    let omega_bar = cost.omega_bar.shrunk(margin_y);

    for k in 0..n_samples {
        let mut r = rng::stream(seed, k as u64);
        let x = rng::point_in_box(&mut r, &omega.lo, &omega.hi);
        let xbar = rng::point_in_box(&mut r, &omega_bar.lo, &omega_bar.hi);
        let v = rng::unit_vector(&mut r, dim);
        let eta = rng::unit_vector(&mut r, dim);
        let Some(q) = MTWQuery::normalized(x, xbar, v, eta, kind.orthogonal_pairs()) else {
            discarded += 1;
            continue;
        };
        match mtw_value(cost, &q) {
            Ok(val) => {
                if val.fd_error > 10.0 * thresholds.a3w_tol {
                    discarded += 1;
                    continue;
                }
                if val.value < min_value {
                    min_value = val.value;
                    witness = Some(
                        Witness::new()
                            .with("x", q.x.iter().cloned())
                            .with("xbar", q.xbar.iter().cloned())
                            .with("v", q.v.iter().cloned())
                            .with("eta", q.eta.iter().cloned()),
                    );
                }
            }
            Err(_) => discarded += 1,
        }
    }

    let verdict = match kind {
        ConditionKind::A3w => {
            if min_value >= -thresholds.a3w_tol {
                Verdict::Pass
            } else {
                Verdict::Fail
            }
        }
        ConditionKind::A3s | ConditionKind::Nncc => {
            if min_value >= thresholds.strict_delta {
                Verdict::Pass
            } else {
                Verdict::Fail
            }
        }
    };
    ConditionReport {
        condition: format!("{}({})", kind.name(), cost.kind.name()),
        verdict,
        extremal: min_value,
        witness,
        samples: n_samples,
        discarded,
        seed,
        tolerance: match kind {
            ConditionKind::A3w => thresholds.a3w_tol,
            _ => thresholds.strict_delta,
        },
        notes: Vec::new(),
    }
}

/// A sampled c-segment configuration. Focus side:
/// `f(t) = -c(x, xbar(t)) + c(x0, xbar(t))` with `xbar(t)` the c-segment
/// with respect to `x0`; the mirrored configuration runs a source segment
/// and swaps the roles of the two charts.
#[derive(Debug, Clone)]
pub struct SegmentSample {
    pub seg: CSegment,
    pub observer: Vector,
    pub focus_side: bool,
}

impl SegmentSample {
    /// Evaluates `f` on a uniform grid of `steps + 1` points; None when the
    /// segment leaves the admissible box mid-parameter.
    pub fn values(&self, cost: &CostModel, steps: usize) -> Option<Vec<f64>> {
        let mut out = Vec::with_capacity(steps + 1);
        for k in 0..=steps {
            let t = k as f64 / steps as f64;
            let y = self.seg.eval(cost, t).ok()?;
            let v = if self.focus_side {
                -cost.value(&self.observer, &y) + cost.value(&self.seg.anchor, &y)
            } else {
                -cost.value(&y, &self.observer) + cost.value(&y, &self.seg.anchor)
            };
            out.push(v);
        }
        Some(out)
    }

    fn witness(&self) -> Witness {
        Witness::new()
            .with("anchor", self.seg.anchor.iter().cloned())
            .with("observer", self.observer.iter().cloned())
            .with("p_start", self.seg.p_start.iter().cloned())
            .with("p_end", self.seg.p_end.iter().cloned())
            .with("focus_side", [if self.focus_side { 1.0 } else { 0.0 }])
    }
}

/// Draws the k-th segment configuration for a seed. Odd indices mirror the
/// roles of the two domains so both displayed inequalities are exercised.
pub fn sample_segment(cost: &CostModel, seed: u64, k: u64) -> Result<SegmentSample, cexp::CexpError> {
    let mut r = rng::stream(seed, k);
    let focus_side = k % 2 == 0;
    if focus_side {
        let x0 = rng::point_in_box(&mut r, &cost.omega.lo, &cost.omega.hi);
        let x = rng::point_in_box(&mut r, &cost.omega.lo, &cost.omega.hi);
        let xbar0 = rng::point_in_box(&mut r, &cost.omega_bar.lo, &cost.omega_bar.hi);
        let xbar1 = rng::point_in_box(&mut r, &cost.omega_bar.lo, &cost.omega_bar.hi);
        let seg = CSegment::with_respect_to(cost, &x0, Side::Target, &xbar0, &xbar1)?;
        Ok(SegmentSample { seg, observer: x, focus_side: true })
    } else {
        let xbar0 = rng::point_in_box(&mut r, &cost.omega_bar.lo, &cost.omega_bar.hi);
        let xbar = rng::point_in_box(&mut r, &cost.omega_bar.lo, &cost.omega_bar.hi);
        let x0 = rng::point_in_box(&mut r, &cost.omega.lo, &cost.omega.hi);
        let x1 = rng::point_in_box(&mut r, &cost.omega.lo, &cost.omega.hi);
        let seg = CSegment::with_respect_to(cost, &xbar0, Side::Source, &x0, &x1)?;
        Ok(SegmentSample { seg, observer: xbar, focus_side: false })
    }
}

/// Maximum principle along c-segments: `f(t) <= max(f(0), f(1))` on a
/// 21-point grid. Reports the worst slack `max(f(0), f(1)) - f(t)` (negative
/// means a violation).
pub fn check_glp(cost: &CostModel, n_samples: usize, seed: u64) -> ConditionReport {
    const STEPS: usize = 20;
    let mut worst_margin = f64::INFINITY;
    let mut witness = None;
    let mut discarded = 0usize;
    for k in 0..n_samples {
        let sample = match sample_segment(cost, seed, k as u64) {
            Ok(s) => s,
            Err(_) => {
                discarded += 1;
                continue;
            }
        };
        let Some(f) = sample.values(cost, STEPS) else {
            discarded += 1;
            continue;
        };
        let endpoint_max = f[0].max(f[STEPS]);
        for (i, &ft) in f.iter().enumerate() {
            let margin = endpoint_max - ft;
            if margin < worst_margin {
                worst_margin = margin;
                witness = Some(sample.witness().with("t", [i as f64 / STEPS as f64]));
            }
        }
    }
    ConditionReport {
        condition: format!("gLp({})", cost.kind.name()),
        verdict: if worst_margin >= -tol::SEGMENT_SLACK { Verdict::Pass } else { Verdict::Fail },
        extremal: worst_margin,
        witness,
        samples: n_samples,
        discarded,
        seed,
        tolerance: tol::SEGMENT_SLACK,
        notes: Vec::new(),
    }
}

/// Outcome of the quasiconvexity-constant estimation.
#[derive(Debug, Clone)]
pub struct QConvEstimate {
    pub m_hat: f64,
    pub violations: usize,
    pub report: ConditionReport,
}

/// Smallest constant M with `f(t) - f(0) <= M t (f(1) - f(0))_+` over the
/// sampled segments (both orientations), clamped below at one. Samples with
/// a nonpositive right-hand factor but a positive interior increment are
/// quasiconvexity violations and fail the check.
pub fn estimate_qconv_m(cost: &CostModel, n_samples: usize, seed: u64) -> QConvEstimate {
    const STEPS: usize = 20;
    let mut m_hat = 1.0f64;
    let mut violations = 0usize;
    let mut worst_violation = 0.0f64;
    let mut witness = None;
    let mut discarded = 0usize;

    for k in 0..n_samples {
        let sample = match sample_segment(cost, seed, k as u64) {
            Ok(s) => s,
            Err(_) => {
                discarded += 1;
                continue;
            }
        };
        let Some(f) = sample.values(cost, STEPS) else {
            discarded += 1;
            continue;
        };
        let rhs = f[STEPS] - f[0];
        if rhs > tol::RATIO_FLOOR {
            for (i, &ft) in f.iter().enumerate().skip(1) {
                let t = i as f64 / STEPS as f64;
                let ratio = (ft - f[0]) / (t * rhs);
                if ratio > m_hat {
                    m_hat = ratio;
                    witness = Some(sample.witness().with("t", [t]));
                }
            }
        } else {
            // Endpoint increment nonpositive: no interior rise allowed.
            for &ft in f.iter().skip(1) {
                let excess = ft - f[0];
                if excess > tol::SEGMENT_SLACK {
                    violations += 1;
                    if excess > worst_violation {
                        worst_violation = excess;
                        witness = Some(sample.witness());
                    }
                    break;
                }
            }
        }
    }

    let report = ConditionReport {
        condition: format!("QConv({})", cost.kind.name()),
        verdict: if violations == 0 { Verdict::Pass } else { Verdict::Fail },
        extremal: m_hat,
        witness,
        samples: n_samples,
        discarded,
        seed,
        tolerance: tol::SEGMENT_SLACK,
        notes: if violations > 0 {
            vec![format!("{violations} quasiconvexity violations, worst excess {worst_violation:.3e}")]
        } else {
            Vec::new()
        },
    };
    QConvEstimate { m_hat, violations, report }
}

/// Outcome of the second-derivative-constant estimation.
#[derive(Debug, Clone)]
pub struct FppEstimate {
    pub c_hat: f64,
    pub report: ConditionReport,
}

/// Largest observed `(-f'')_+ / |f'|` along the same sampled segments on a
/// 201-point grid. Points where the second difference is below its own
/// truncation-noise estimate, or where the first derivative is negligible,
/// are excluded; an exactly affine `f` therefore reports zero.
pub fn estimate_fpp_constant(cost: &CostModel, n_samples: usize, seed: u64) -> FppEstimate {
    const STEPS: usize = 200;
    let dt = 1.0 / STEPS as f64;
    let mut c_hat = 0.0f64;
    let mut witness = None;
    let mut discarded = 0usize;
    let mut unstable = 0usize;

    for k in 0..n_samples {
        let sample = match sample_segment(cost, seed, k as u64) {
            Ok(s) => s,
            Err(_) => {
                discarded += 1;
                continue;
            }
        };
        let Some(f) = sample.values(cost, STEPS) else {
            discarded += 1;
            continue;
        };

        // Noise floor for the second difference: fourth-difference estimate
        // of the truncation error plus a rounding floor.
        let fscale = f.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let mut max4 = 0.0f64;
        for i in 2..f.len() - 2 {
            let d4 = (f[i - 2] - 4.0 * f[i - 1] + 6.0 * f[i] - 4.0 * f[i + 1] + f[i + 2])
                / dt.powi(4);
            max4 = max4.max(d4.abs());
        }
        let fpp_floor = (0.5 * dt * dt * max4).max(1e-9 * (1.0 + fscale));
        let fp_scale = {
            let mut m = 0.0f64;
            for i in 1..f.len() - 1 {
                m = m.max(((f[i + 1] - f[i - 1]) / (2.0 * dt)).abs());
            }
            m
        };
        let fp_floor = (1e-6 * (1.0 + fp_scale)).max(1e-9);
        if max4 * dt.powi(4) > 1.0 {
            // Catastrophic cancellation; the grid cannot resolve f''.
            unstable += 1;
            continue;
        }

        for i in 1..f.len() - 1 {
            let fp = (f[i + 1] - f[i - 1]) / (2.0 * dt);
            let fpp = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (dt * dt);
            let neg = (-fpp).max(0.0);
            if neg > fpp_floor && fp.abs() > fp_floor {
                let ratio = neg / fp.abs();
                if ratio > c_hat {
                    c_hat = ratio;
                    witness = Some(sample.witness().with("t", [i as f64 * dt]));
                }
            }
        }
    }

    let mut notes = Vec::new();
    if unstable > 0 {
        notes.push(format!("{unstable} segments dropped as FD-unstable"));
    }
    let report = ConditionReport {
        condition: format!("fpp-constant({})", cost.kind.name()),
        verdict: Verdict::Pass,
        extremal: c_hat,
        witness,
        samples: n_samples,
        discarded: discarded + unstable,
        seed,
        tolerance: tol::RATIO_FLOOR,
        notes,
    };
    FppEstimate { c_hat, report }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CostKind;

#[test]
fn probe_tensor_alignments() {
    use crate::cost::CostModel;
    use crate::Vector;
    let v2 = |a: f64, b: f64| Vector::from_vec(vec![a, b]);
    for (name, cost) in [
        ("invsq", CostModel::separated(CostKind::InverseSquare, 2)),
        ("pow-1", CostModel::separated(CostKind::Power { p: -1.0 }, 2)),
        ("pow-1.5", CostModel::separated(CostKind::Power { p: -1.5 }, 2)),
        ("pow0.5", CostModel::separated(CostKind::Power { p: 0.5 }, 2)),
    ] {
        for (x, xb) in [(v2(0.5,0.5), v2(3.5,3.5)), (v2(0.1,0.9), v2(3.9,3.1)), (v2(0.9,0.9), v2(3.1,3.1))] {
            let dhat = (&x - &xb).normalize();
            let dperp = v2(-dhat[1], dhat[0]);
            let r = (&x - &xb).norm();
            // Orthogonal sweep: V at angle theta to dhat, eta = V rotated 90.
            let mut min_orth = f64::INFINITY; let mut argmin = 0.0;
            for k in 0..=36 {
                let th = std::f64::consts::PI * k as f64 / 36.0;
                let vv = &dhat * th.cos() + &dperp * th.sin();
                let ee = &dhat * -th.sin() + &dperp * th.cos();
                let q = MTWQuery { x: x.clone(), xbar: xb.clone(), v: vv, eta: ee };
                if let Ok(val) = mtw_value(&cost, &q) {
                    if val.value < min_orth { min_orth = val.value; argmin = th; }
                }
            }
            // NNCC sweep: independent angles.
            let mut min_nncc = f64::INFINITY; let mut arg2 = (0.0, 0.0);
            for a in 0..=18 {
                for b in 0..=18 {
                    let ta = std::f64::consts::PI * a as f64 / 18.0;
                    let tb = std::f64::consts::PI * b as f64 / 18.0;
                    let vv = &dhat * ta.cos() + &dperp * ta.sin();
                    let ee = &dhat * tb.cos() + &dperp * tb.sin();
                    let q = MTWQuery { x: x.clone(), xbar: xb.clone(), v: vv, eta: ee };
                    if let Ok(val) = mtw_value(&cost, &q) {
                        if val.value < min_nncc { min_nncc = val.value; arg2 = (ta, tb); }
                    }
                }
            }
            println!("{name:8} r={r:.2}: min_orth={min_orth:+.4e} @th={argmin:.3}  min_nncc={min_nncc:+.4e} @{arg2:.2?}");
        }
    }
}

    #[test]
    fn flat_kinds_have_zero_tensor() {
        for kind in [CostKind::Bilinear, CostKind::Quadratic] {
            let cost = CostModel::flat(kind, 2);
            for k in 0..200u64 {
                let mut r = rng::stream(3, k);
                let x = rng::point_in_box(&mut r, &cost.omega.lo, &cost.omega.hi);
                let y = rng::point_in_box(&mut r, &cost.omega_bar.lo, &cost.omega_bar.hi);
                let v = rng::unit_vector(&mut r, 2);
                let eta = rng::unit_vector(&mut r, 2);
                let q = MTWQuery::normalized(x, y, v, eta, false).unwrap();
                let val = mtw_value(&cost, &q).unwrap();
                assert!(val.value.abs() < 1e-6, "{} tensor {}", cost.kind.name(), val.value);
            }
        }
    }

    #[test]
    fn tensor_is_even_and_quadratic_in_each_argument() {
        let cost = CostModel::separated(CostKind::InverseSquare, 2);
        for k in 0..30u64 {
            let mut r = rng::stream(8, k);
            let x = rng::point_in_box(&mut r, &cost.omega.lo, &cost.omega.hi);
            let y = rng::point_in_box(&mut r, &cost.omega_bar.lo, &cost.omega_bar.hi);
            let v = rng::unit_vector(&mut r, 2);
            let eta = rng::unit_vector(&mut r, 2);
            let base = MTWQuery { x: x.clone(), xbar: y.clone(), v: v.clone(), eta: eta.clone() };
            let s0 = mtw_value(&cost, &base).unwrap();
            let tol_here = 1e-4 * (1.0 + s0.value.abs()) + 10.0 * s0.fd_error;

            let flip_v =
                MTWQuery { x: x.clone(), xbar: y.clone(), v: -&v, eta: eta.clone() };
            assert!((mtw_value(&cost, &flip_v).unwrap().value - s0.value).abs() < tol_here);
            let flip_e = MTWQuery { x: x.clone(), xbar: y.clone(), v: v.clone(), eta: -&eta };
            assert!((mtw_value(&cost, &flip_e).unwrap().value - s0.value).abs() < tol_here);

            let double_v = MTWQuery { x: x.clone(), xbar: y.clone(), v: &v * 2.0, eta };
            let s2 = mtw_value(&cost, &double_v).unwrap();
            assert!(
                (s2.value - 4.0 * s0.value).abs() < 4.0 * tol_here,
                "quadratic scaling in V: {} vs {}",
                s2.value,
                4.0 * s0.value
            );
        }
    }

    #[test]
    fn power_in_range_is_strictly_positive_on_orthogonal_pairs() {
        let cost = CostModel::separated(CostKind::Power { p: -1.0 }, 2);
        let rep = check_condition(&cost, ConditionKind::A3s, 200, 5, Default::default());
        assert!(rep.passed(), "A3s should hold for p=-1: {rep:?}");
    }

    #[test]
    fn inverse_square_classification() {
        let cost = CostModel::separated(CostKind::InverseSquare, 2);
        let th = ConditionThresholds::default();
        assert!(check_condition(&cost, ConditionKind::A3w, 300, 5, th).passed());
        assert!(!check_condition(&cost, ConditionKind::A3s, 300, 5, th).passed());
        assert!(!check_condition(&cost, ConditionKind::Nncc, 300, 5, th).passed());
    }

    #[test]
    fn glp_flat_kinds_pass() {
        for kind in [CostKind::Bilinear, CostKind::Quadratic] {
            let cost = CostModel::flat(kind, 2);
            let rep = check_glp(&cost, 100, 9);
            assert!(rep.passed(), "{rep:?}");
        }
    }

    #[test]
    fn glp_inverse_square_passes() {
        let cost = CostModel::separated(CostKind::InverseSquare, 2);
        let rep = check_glp(&cost, 100, 9);
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn qconv_m_is_one_for_flat_kinds() {
        for kind in [CostKind::Bilinear, CostKind::Quadratic] {
            let cost = CostModel::flat(kind, 2);
            let est = estimate_qconv_m(&cost, 100, 13);
            assert_eq!(est.violations, 0);
            assert!((est.m_hat - 1.0).abs() < 1e-6, "M_hat = {}", est.m_hat);
        }
    }

    #[test]
    fn fpp_constant_zero_for_flat_kinds() {
        for kind in [CostKind::Bilinear, CostKind::Quadratic] {
            let cost = CostModel::flat(kind, 2);
            let est = estimate_fpp_constant(&cost, 100, 13);
            assert!(est.c_hat <= 1e-6, "C_hat = {}", est.c_hat);
        }
    }

    #[test]
    fn redux_chain_inverse_square() {
        // Same seed for both estimators: identical segment samples.
        let cost = CostModel::separated(CostKind::InverseSquare, 2);
        let q = estimate_qconv_m(&cost, 150, 21);
        let f = estimate_fpp_constant(&cost, 150, 21);
        assert_eq!(q.violations, 0, "{:?}", q.report.notes);
        assert!(q.m_hat >= 1.0);
        assert!(
            q.m_hat <= f.c_hat.exp() * 1.05,
            "M_hat {} vs e^C_hat {}",
            q.m_hat,
            f.c_hat.exp()
        );
    }

    #[test]
    fn quasiconvexity_remark_holds_on_grids() {
        // Whenever f exceeds f(0) somewhere, f(1) > f(0).
        for cost in [
            CostModel::separated(CostKind::InverseSquare, 2),
            CostModel::separated(CostKind::Power { p: -1.0 }, 2),
        ] {
            for k in 0..100u64 {
                let Ok(sample) = sample_segment(&cost, 31, k) else { continue };
                let Some(f) = sample.values(&cost, 20) else { continue };
                let rises = f.iter().any(|&ft| ft > f[0] + tol::SEGMENT_SLACK);
                if rises {
                    assert!(
                        f[20] > f[0] - tol::SEGMENT_SLACK,
                        "interior rise without endpoint rise: {f:?}"
                    );
                }
            }
        }
    }
}
