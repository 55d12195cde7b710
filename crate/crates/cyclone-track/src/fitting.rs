//! Three-point parameter estimation and forecasting.
//!
//! Writing the closed-form trajectory at the second and third point of a
//! window (anchored at the first) gives four linear equations for the
//! initial velocity and the two forcing amplitudes, with the equilibrium
//! rotation `b0` left free. Candidate `b0` values are the roots of the two
//! matching conditions "fitted initial velocity component equals the
//! first-leg mean velocity"; a window is accepted when both conditions
//! have roots, the roots agree within `epsilon`, and their mean is taken
//! as the vorticity estimate.
//!
//! A three-point window alone never pins `b0`: every candidate value
//! interpolates all three points exactly, so the matching conditions add a
//! shape constraint rather than new data. Windows of a track that does not
//! meet that constraint are rejected, which is the common outcome on real
//! tracks; one slides the window forward until a definite value appears.

use crate::error::{Error, Result};
use crate::geo::{self, Track};
use crate::linalg;
use crate::params;
use crate::trajectory::{closed_form_coefficients, RESONANCE_GUARD};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

const HOUR: f64 = 3600.0;
const KM: f64 = 1000.0;

/// Condition numbers beyond this mark the window as degenerate.
pub const CONDITION_LIMIT: f64 = 1e12;

// Root refinement width. Tighter than the documented 1e-12 so that
// windows differing only by float noise (e.g. translated coordinates)
// refit to indistinguishable parameters.
const ROOT_XTOL: f64 = 1e-14;

/// A timestamped position in the local tangent plane.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PlanePoint {
    /// Seconds since the track epoch.
    pub t: f64,
    /// East/north offsets from the plane origin, m.
    pub pos: [f64; 2],
}

/// Search and acceptance configuration for [`find_b0`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FitConfig {
    /// Half-width of the scanned vorticity interval, 1/s.
    ///
    /// The physically argued magnitude bound is 1e-5, but historical fits
    /// land up to several 1e-5, so the default search covers 1e-4;
    /// [`FitConfig::strict`] restores the tight bound.
    pub bound: f64,
    /// Acceptance threshold on the disagreement of the two roots, 1/s.
    pub epsilon: f64,
    /// Number of scan nodes across `[-bound, bound]`.
    pub grid_points: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            bound: 1e-4,
            epsilon: 2e-6,
            grid_points: 4001,
        }
    }
}

impl FitConfig {
    /// The tight physical-magnitude regime: `|b0| <= 1e-5`.
    pub fn strict() -> Self {
        Self {
            bound: 1e-5,
            ..Self::default()
        }
    }
}

/// Outcome of fitting one three-point window.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FitResult {
    /// Fitted initial eye velocity, m/s. Present only for accepted fits.
    pub v0: Option<[f64; 2]>,
    /// Fitted forcing amplitudes, m/s^2. Present only for accepted fits.
    pub mn: Option<[f64; 2]>,
    /// Accepted vorticity (mean of the two roots), 1/s.
    pub b0: Option<f64>,
    /// Root of the first matching condition, if any.
    pub b01: Option<f64>,
    /// Root of the second matching condition, if any.
    pub b02: Option<f64>,
    /// Acceptance verdict.
    pub accepted: bool,
    /// Threshold the verdict was computed with, 1/s.
    pub epsilon_used: f64,
    /// The three anchor points of the window.
    pub window: [PlanePoint; 3],
    /// Condition number of the final linear solve, when one was performed.
    pub condition_number: Option<f64>,
}

impl FitResult {
    fn rejected(window: [PlanePoint; 3], epsilon: f64) -> Self {
        Self {
            v0: None,
            mn: None,
            b0: None,
            b01: None,
            b02: None,
            accepted: false,
            epsilon_used: epsilon,
            window,
            condition_number: None,
        }
    }
}

/// Solution of the four-equation linear fit at a fixed `b0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    /// Initial eye velocity, m/s.
    pub v0: [f64; 2],
    /// Forcing amplitudes, m/s^2.
    pub mn: [f64; 2],
    /// Infinity-norm condition number of the scaled system.
    pub condition_number: f64,
}

/// Closed-form basis row entries at elapsed time `tau` (working units).
fn basis(tau: f64, l: f64, b0: f64) -> [f64; 4] {
    let (sl, cl) = (l * tau).sin_cos();
    let (sb, cb) = (b0 * tau).sin_cos();
    let f1 = sl / l;
    let f2 = (1.0 - cl) / l;
    let gc = (1.0 - cl) / (l * (b0 - l)) - (1.0 - cb) / (b0 * (b0 - l));
    let gs = sl / (l * (b0 - l)) - sb / (b0 * (b0 - l));
    [f1, f2, gc, gs]
}

/// Solve the four linear trajectory equations through the window for the
/// initial velocity and forcing amplitudes, at a fixed vorticity `b0`.
///
/// The system is assembled in hours and kilometers: raw SI entries span
/// ten orders of magnitude and would make the condition number meaningless.
pub fn solve_linear_fit(
    p0: &PlanePoint,
    p1: &PlanePoint,
    p2: &PlanePoint,
    b0: f64,
    l: f64,
) -> Result<LinearFit> {
    if !(p0.t < p1.t && p1.t < p2.t) {
        return Err(Error::DegenerateWindow(format!(
            "window times must strictly increase, got {}, {}, {}",
            p0.t, p1.t, p2.t
        )));
    }
    if l.abs() <= RESONANCE_GUARD || b0.abs() <= RESONANCE_GUARD {
        return Err(Error::DegenerateFrequency(
            "frequency below the resonance guard".to_string(),
        ));
    }
    if (b0 - l).abs() <= RESONANCE_GUARD {
        return Err(Error::DegenerateFrequency(format!(
            "|b0 - l| = {:e} below the resonance guard",
            (b0 - l).abs()
        )));
    }
    let lh = l * HOUR;
    let b0h = b0 * HOUR;
    let mut a = [[0.0f64; 4]; 4];
    let mut rhs = [0.0f64; 4];
    for (idx, p) in [p1, p2].into_iter().enumerate() {
        let tau = (p.t - p0.t) / HOUR;
        let [f1, f2, gc, gs] = basis(tau, lh, b0h);
        a[2 * idx] = [f1, f2, gc, -gs];
        a[2 * idx + 1] = [-f2, f1, gs, gc];
        rhs[2 * idx] = (p.pos[0] - p0.pos[0]) / KM;
        rhs[2 * idx + 1] = (p.pos[1] - p0.pos[1]) / KM;
    }
    let solved = linalg::solve4(&a, &rhs).ok_or_else(|| {
        Error::DegenerateWindow("singular linear system for the window".to_string())
    })?;
    if solved.condition_number > CONDITION_LIMIT {
        return Err(Error::DegenerateWindow(format!(
            "condition number {:.3e} exceeds {CONDITION_LIMIT:e}",
            solved.condition_number
        )));
    }
    let [v1, v2, m, n] = solved.x;
    Ok(LinearFit {
        v0: [v1 * KM / HOUR, v2 * KM / HOUR],
        mn: [m * KM / (HOUR * HOUR), n * KM / (HOUR * HOUR)],
        condition_number: solved.condition_number,
    })
}

/// Forward-difference mean velocity between two track points.
pub fn finite_difference_velocity(p0: &PlanePoint, p1: &PlanePoint) -> Result<[f64; 2]> {
    if !(p1.t > p0.t) {
        return Err(Error::Domain(format!(
            "finite difference needs increasing times, got {} then {}",
            p0.t, p1.t
        )));
    }
    let dt = p1.t - p0.t;
    Ok([(p1.pos[0] - p0.pos[0]) / dt, (p1.pos[1] - p0.pos[1]) / dt])
}

fn map_collect<T: Send>(n: usize, par: bool, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    if par {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = par;
    (0..n).map(f).collect()
}

fn find_b0_impl(
    p0: &PlanePoint,
    p1: &PlanePoint,
    p2: &PlanePoint,
    l: f64,
    cfg: &FitConfig,
    par: bool,
) -> Result<FitResult> {
    if !(p0.t < p1.t && p1.t < p2.t) {
        return Err(Error::DegenerateWindow(format!(
            "window times must strictly increase, got {}, {}, {}",
            p0.t, p1.t, p2.t
        )));
    }
    if cfg.grid_points < 2 || !(cfg.bound > 0.0) {
        return Err(Error::Domain(
            "scan needs a positive bound and at least two grid points".to_string(),
        ));
    }
    let window = [*p0, *p1, *p2];
    let vbar = finite_difference_velocity(p0, p1)?;
    let valid = |b0: f64| b0.abs() > RESONANCE_GUARD && (b0 - l).abs() > RESONANCE_GUARD;
    let node = |j: usize| -cfg.bound + 2.0 * cfg.bound * j as f64 / (cfg.grid_points - 1) as f64;
    let g = |b0: f64| -> Option<[f64; 2]> {
        if !valid(b0) {
            return None;
        }
        solve_linear_fit(p0, p1, p2, b0, l)
            .ok()
            .map(|fit| [fit.v0[0] - vbar[0], fit.v0[1] - vbar[1]])
    };
    let values = map_collect(cfg.grid_points, par, |j| g(node(j)));
    if values.iter().all(Option::is_none) {
        return Err(Error::Domain(
            "the entire scan interval is excluded by the frequency guards".to_string(),
        ));
    }

    // Sign changes between consecutive valid nodes, refined by bisection.
    let mut roots: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for cond in 0..2 {
        for j in 0..cfg.grid_points - 1 {
            let (Some(gj), Some(gj1)) = (values[j], values[j + 1]) else {
                continue;
            };
            let (a, b) = (gj[cond], gj1[cond]);
            if a == 0.0 {
                if roots[cond].last().is_none_or(|r| *r != node(j)) {
                    roots[cond].push(node(j));
                }
                continue;
            }
            if b == 0.0 {
                continue; // captured as the left endpoint of the next cell
            }
            if a.signum() != b.signum() {
                let gi = |x: f64| g(x).map_or(f64::NAN, |v| v[cond]);
                if let Some(r) = crate::root::bisect(gi, node(j), node(j + 1), ROOT_XTOL, 200) {
                    roots[cond].push(r);
                }
            }
        }
    }

    let mut result = FitResult::rejected(window, cfg.epsilon);
    let (roots1, roots2) = (&roots[0], &roots[1]);
    if roots1.is_empty() || roots2.is_empty() {
        result.b01 = roots1.first().copied();
        result.b02 = roots2.first().copied();
        return Ok(result);
    }
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for &r1 in roots1 {
        for &r2 in roots2 {
            let d = (r1 - r2).abs();
            if d < best.0 {
                best = (d, r1, r2);
            }
        }
    }
    let (spread, b01, b02) = best;
    result.b01 = Some(b01);
    result.b02 = Some(b02);
    if spread < cfg.epsilon {
        let b0 = 0.5 * (b01 + b02);
        match solve_linear_fit(p0, p1, p2, b0, l) {
            Ok(fit) => {
                result.accepted = true;
                result.b0 = Some(b0);
                result.v0 = Some(fit.v0);
                result.mn = Some(fit.mn);
                result.condition_number = Some(fit.condition_number);
            }
            Err(_) => {
                // Mean landed inside a guard zone; keep the rejection.
            }
        }
    }
    Ok(result)
}

/// Scan the vorticity interval for roots of the two matching conditions
/// and apply the acceptance rule.
pub fn find_b0(
    p0: &PlanePoint,
    p1: &PlanePoint,
    p2: &PlanePoint,
    l: f64,
    cfg: &FitConfig,
) -> Result<FitResult> {
    find_b0_impl(p0, p1, p2, l, cfg, true)
}

/// Fully sequential variant of [`find_b0`]; the parallel build uses it as
/// the baseline in benchmarks.
pub fn find_b0_serial(
    p0: &PlanePoint,
    p1: &PlanePoint,
    p2: &PlanePoint,
    l: f64,
    cfg: &FitConfig,
) -> Result<FitResult> {
    find_b0_impl(p0, p1, p2, l, cfg, false)
}

/// Fit the window at an externally chosen vorticity (the historical-track
/// fitting mode). The result is marked accepted with both roots pinned to
/// the override.
pub fn fixed_b0_fit(
    p0: &PlanePoint,
    p1: &PlanePoint,
    p2: &PlanePoint,
    b0: f64,
    l: f64,
    epsilon: f64,
) -> Result<FitResult> {
    let fit = solve_linear_fit(p0, p1, p2, b0, l)?;
    Ok(FitResult {
        v0: Some(fit.v0),
        mn: Some(fit.mn),
        b0: Some(b0),
        b01: Some(b0),
        b02: Some(b0),
        accepted: true,
        epsilon_used: epsilon,
        window: [*p0, *p1, *p2],
        condition_number: Some(fit.condition_number),
    })
}

/// Exact vorticity root of the gradient-wind quadratic
/// `b0^2 - l b0 - 2 c0 A0 = 0` nearest zero, evaluated in the
/// cancellation-free product form.
pub fn b0_equilibrium_estimate(c0: f64, a0: f64, l: f64) -> Result<f64> {
    if l == 0.0 {
        return Err(Error::Domain(
            "the equilibrium estimate needs a nonzero Coriolis parameter".to_string(),
        ));
    }
    if !(c0 > 0.0) || !(a0 >= 0.0) {
        return Err(Error::Domain(format!(
            "needs c0 > 0 and A0 >= 0, got c0 = {c0}, A0 = {a0}"
        )));
    }
    let disc = (l * l + 8.0 * c0 * a0).sqrt();
    let big = 0.5 * (l + l.signum() * disc);
    Ok(-2.0 * c0 * a0 / big)
}

/// Leading-order form of [`b0_equilibrium_estimate`] for `c0 A0 << l^2`:
/// `-2 c0 A0 / l`.
pub fn b0_equilibrium_asymptotic(c0: f64, a0: f64, l: f64) -> Result<f64> {
    if l == 0.0 {
        return Err(Error::Domain(
            "the asymptotic estimate needs a nonzero Coriolis parameter".to_string(),
        ));
    }
    Ok(-2.0 * c0 * a0 / l)
}

/// Initial velocity that makes the closed-form trajectory's mean velocity
/// over its first `leg` seconds equal to the initial velocity itself.
///
/// Tracks synthesized with this velocity satisfy the matching conditions
/// exactly at the generating `b0`, which makes them recoverable by
/// [`find_b0`]; generic velocities are not, since a three-point window
/// carries no independent information about `b0`.
pub fn balanced_initial_velocity(mn: [f64; 2], b0: f64, l: f64, leg: f64) -> Result<[f64; 2]> {
    if l.abs() <= RESONANCE_GUARD
        || b0.abs() <= RESONANCE_GUARD
        || (b0 - l).abs() <= RESONANCE_GUARD
    {
        return Err(Error::DegenerateFrequency(
            "frequencies too close to zero or to each other".to_string(),
        ));
    }
    if !(leg > 0.0) {
        return Err(Error::Domain(format!("leg must be positive, got {leg}")));
    }
    let [f1, f2, gc, gs] = basis(leg, l, b0);
    let alpha = f1 - leg;
    let beta = f2;
    let det = alpha * alpha + beta * beta;
    if det == 0.0 {
        return Err(Error::DegenerateFrequency(
            "the balance system is singular for this leg".to_string(),
        ));
    }
    let r1 = -(mn[0] * gc - mn[1] * gs);
    let r2 = -(mn[0] * gs + mn[1] * gc);
    Ok([
        (alpha * r1 - beta * r2) / det,
        (beta * r1 + alpha * r2) / det,
    ])
}

/// Slide a three-point window over the track (stride one) and fit each.
///
/// Per-window projection uses the window's first point as the tangent
/// plane origin, and the Coriolis parameter is evaluated at that point's
/// latitude. Window failures are rejection verdicts, never errors; tracks
/// with fewer than three points yield an empty list.
pub fn sweep_track(track: &Track, cfg: &FitConfig) -> Vec<FitResult> {
    sweep_impl(track, cfg, true)
}

/// Fully sequential variant of [`sweep_track`] used as the benchmark
/// baseline.
pub fn sweep_track_serial(track: &Track, cfg: &FitConfig) -> Vec<FitResult> {
    sweep_impl(track, cfg, false)
}

fn sweep_impl(track: &Track, cfg: &FitConfig, par: bool) -> Vec<FitResult> {
    let pts = &track.points;
    if pts.len() < 3 {
        return Vec::new();
    }
    let n_windows = pts.len() - 2;
    map_collect(n_windows, par, |i| {
        let origin = (pts[i].lat, pts[i].lon);
        let window: Vec<PlanePoint> = (i..i + 3)
            .map(|j| PlanePoint {
                t: pts[j].t,
                pos: geo::project((pts[j].lat, pts[j].lon), origin)
                    .expect("track latitudes are validated"),
            })
            .collect();
        let l = params::coriolis_parameter(pts[i].lat).expect("track latitudes are validated");
        match find_b0_impl(&window[0], &window[1], &window[2], l, cfg, false) {
            Ok(fit) => fit,
            Err(_) => FitResult::rejected([window[0], window[1], window[2]], cfg.epsilon),
        }
    })
}

/// Evaluate the accepted fit's closed form from the window's first point.
///
/// Returns plane points at `window_start + k * step` for
/// `k = 0..=round(horizon/step)`; the anchor points of the window are
/// reproduced to solver accuracy wherever the step lands on them.
pub fn forecast(fit: &FitResult, l: f64, horizon: f64, step: f64) -> Result<Vec<PlanePoint>> {
    if !fit.accepted {
        return Err(Error::UnacceptedFit);
    }
    if !(step > 0.0) || !(horizon >= 0.0) {
        return Err(Error::Domain(format!(
            "horizon and step must be positive, got horizon {horizon}, step {step}"
        )));
    }
    let (b0, v0, mn) = (
        fit.b0.expect("accepted fit carries b0"),
        fit.v0.expect("accepted fit carries v0"),
        fit.mn.expect("accepted fit carries mn"),
    );
    let anchor = fit.window[0];
    let coeffs = closed_form_coefficients(anchor.pos, v0, mn, l, b0)?;
    let n = (horizon / step).round() as usize;
    Ok((0..=n)
        .map(|k| {
            let tau = k as f64 * step;
            PlanePoint {
                t: anchor.t + tau,
                pos: coeffs.position(tau),
            }
        })
        .collect())
}
