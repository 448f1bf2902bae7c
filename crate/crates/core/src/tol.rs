//! Centralized numerical tolerances.
//!
//! Every tolerance used by the library is defined here together with the
//! reason for its value. Operations take these as defaults; the few that are
//! experiment-level knobs (grid resolutions, verdict thresholds) live in the
//! run configuration instead.

/// Membership slack for polytope facet inequalities.
///
/// Vertices of a hull satisfy their own facets to ~1e-14; 1e-9 absorbs the
/// accumulated rounding of downstream affine maps without admitting
/// geometrically distinct points.
pub const FACET: f64 = 1e-9;

/// A point is reported outside a polytope when it violates a facet by more
/// than this.
pub const POINT_OUTSIDE: f64 = 1e-7;

/// Symmetry check for ellipsoid shape matrices.
pub const ELLIPSOID_SYM: f64 = 1e-12;

/// Duality-gap stop for the minimum-volume enclosing ellipsoid iteration.
///
/// The double inclusion is verified to `JOHN_INCLUSION`; near-simplex bodies
/// have a tight inner inclusion, so the iteration must run roughly two
/// orders of magnitude below the verification tolerance.
pub const MVEE_GAP: f64 = 1e-9;

/// Default iteration cap for the enclosing-ellipsoid computation.
pub const MVEE_MAX_ITER: usize = 10_000;

/// Verification tolerance for the John ellipsoid double inclusion.
pub const JOHN_INCLUSION: f64 = 1e-7;

/// Newton convergence: the residual of the momentum equation.
pub const NEWTON_RESIDUAL: f64 = 1e-10;

/// Maximum Newton iterations per c-exponential solve.
pub const NEWTON_MAX_ITER: usize = 100;

/// Damped continuation retries when a plain Newton solve fails.
pub const NEWTON_RETRIES: usize = 10;

/// Round-trip accuracy of the c-exponential (momentum of the result vs the
/// requested momentum).
pub const CEXP_ROUNDTRIP: f64 = 1e-8;

/// Slack for "converged point lies in the opposite domain box".
pub const DOMAIN_MEMBERSHIP: f64 = 1e-7;

/// Relative agreement required between analytic derivatives and
/// Richardson-extrapolated central differences.
pub const DERIV_FD_REL: f64 = 1e-6;

/// A cross-Hessian with |det| below this is treated as degenerate.
pub const CROSS_DET_MIN: f64 = 1e-12;

/// Two potential pieces are both considered active when their values agree
/// to this absolute tolerance.
pub const ACTIVE_PIECE: f64 = 1e-9;

/// Width of the cell-boundary band in which the transport map is reported
/// non-differentiable.
pub const CELL_BOUNDARY_BAND: f64 = 1e-7;

/// Contact-set band: `u = m` is read as `|u - m| <= CONTACT_BAND`.
pub const CONTACT_BAND: f64 = 1e-7;

/// Slack granted when checking inequalities along sampled c-segments.
pub const SEGMENT_SLACK: f64 = 1e-7;

/// Denominators below this are excluded from empirical ratio constants.
pub const RATIO_FLOOR: f64 = 1e-9;

/// Mass normalization accuracy for discrete measures.
pub const MASS_NORMALIZATION: f64 = 1e-12;

/// Base finite-difference step for first and second derivatives of costs.
pub const FD_STEP: f64 = 1e-4;

/// Step for the nested fourth-order difference in the curvature tensor.
///
/// A 3x3 second-difference stencil divides by h^4, so rounding costs about
/// 16 eps / h^4 while the Richardson-extrapolated truncation is O(h^4).
/// h = 1.5e-2 keeps the rounding term near 1e-7 on O(1) costs, well inside
/// the zero-tensor tolerance for the flat kinds and the verdict margins for
/// the curved ones; the naive eps^(1/6) choice would leave 1e-4 of noise.
pub fn mtw_fd_step(scale: f64) -> f64 {
    1.5e-2 * scale.max(1e-3)
}
