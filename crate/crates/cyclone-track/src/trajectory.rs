//! Closed-form eye trajectory at the vortex equilibrium.
//!
//! When the velocity-profile coefficients sit at the center (`div = 0`,
//! constant rotation `b0`), the eye-velocity equations become a driven
//! rotation and integrate in closed form: the track is a constant center
//! plus two circular motions, one with period `2 pi / l` (the inertial
//! circle) and one with period `2 pi / b0` (the vorticity circle).
//! Superpositions of the two produce loops, kinks and sudden turns.

use crate::error::{Error, Result};

/// Frequencies closer than this (1/s) to zero or to each other are treated
/// as degenerate; about a 200-year period, far outside the physical range.
pub const RESONANCE_GUARD: f64 = 1e-9;

/// Precomputed closed-form trajectory.
///
/// `amp_l` holds the inertial-circle amplitude pair (P, Q), `amp_b` the
/// vorticity-circle pair (S, T); evaluation uses the numerically stable
/// arrangement anchored at the initial position, so `position(0.0)`
/// reproduces `origin` bit-for-bit.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrajectoryCoefficients {
    /// Initial eye position (m).
    pub origin: [f64; 2],
    /// Initial eye velocity (m/s).
    pub v0: [f64; 2],
    /// Pressure-gradient forcing amplitudes (m/s^2): the products of the
    /// pressure coupling with the initial gradient coefficients.
    pub mn: [f64; 2],
    /// Coriolis parameter l (1/s).
    pub coriolis: f64,
    /// Equilibrium rotation coefficient b0 (1/s).
    pub b0: f64,
    /// Drift-free center of the superposition (m).
    pub center: [f64; 2],
    /// Inertial-circle amplitudes (P, Q), m.
    pub amp_l: [f64; 2],
    /// Vorticity-circle amplitudes (S, T), m.
    pub amp_b: [f64; 2],
}

/// One circular component of the decomposition.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Circle {
    /// Circle radius, m.
    pub radius: f64,
    /// Signed angular frequency, 1/s.
    pub frequency: f64,
    /// Initial phase, rad.
    pub phase: f64,
}

impl Circle {
    /// Period `2 pi / |frequency|`, s.
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.frequency.abs()
    }

    /// Displacement contributed by this circle at time `t`.
    pub fn displacement(&self, t: f64) -> [f64; 2] {
        let (s, c) = (self.frequency * t + self.phase).sin_cos();
        [self.radius * s, self.radius * c]
    }
}

/// Two-circle decomposition of a closed-form trajectory.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Decomposition {
    /// Constant center of the superposition, m.
    pub center: [f64; 2],
    /// Component with period `2 pi / l`.
    pub inertial_circle: Circle,
    /// Component with period `2 pi / b0`.
    pub vorticity_circle: Circle,
}

impl Decomposition {
    /// Re-synthesize the trajectory position from the components.
    pub fn position(&self, t: f64) -> [f64; 2] {
        let a = self.inertial_circle.displacement(t);
        let b = self.vorticity_circle.displacement(t);
        [self.center[0] + a[0] + b[0], self.center[1] + a[1] + b[1]]
    }
}

fn guard_frequencies(coriolis: f64, b0: f64) -> Result<()> {
    if coriolis.abs() <= RESONANCE_GUARD {
        return Err(Error::DegenerateFrequency(format!(
            "|l| = {:e} is below the guard {RESONANCE_GUARD:e}",
            coriolis.abs()
        )));
    }
    if b0.abs() <= RESONANCE_GUARD {
        return Err(Error::DegenerateFrequency(format!(
            "|b0| = {:e} is below the guard {RESONANCE_GUARD:e}",
            b0.abs()
        )));
    }
    if (b0 - coriolis).abs() <= RESONANCE_GUARD {
        return Err(Error::DegenerateFrequency(format!(
            "|b0 - l| = {:e} is below the guard {RESONANCE_GUARD:e} (resonant frequencies)",
            (b0 - coriolis).abs()
        )));
    }
    Ok(())
}

/// Build the closed-form coefficients from initial position, velocity,
/// forcing amplitudes and the two frequencies.
pub fn closed_form_coefficients(
    origin: [f64; 2],
    v0: [f64; 2],
    mn: [f64; 2],
    coriolis: f64,
    b0: f64,
) -> Result<TrajectoryCoefficients> {
    guard_frequencies(coriolis, b0)?;
    let l = coriolis;
    let (m, n) = (mn[0], mn[1]);
    let p = v0[0] / l - n / (l * (b0 - l));
    let q = v0[1] / l + m / (l * (b0 - l));
    let s = n / (b0 * (b0 - l));
    let t = m / (b0 * (b0 - l));
    let center = [origin[0] + q - t, origin[1] - p - s];
    Ok(TrajectoryCoefficients {
        origin,
        v0,
        mn,
        coriolis,
        b0,
        center,
        amp_l: [p, q],
        amp_b: [s, t],
    })
}

impl TrajectoryCoefficients {
    /// Eye position at time `t` (seconds from the trajectory origin).
    ///
    /// Evaluated in the anchored form
    /// `origin + P sin(lt) + Q (1 - cos(lt)) + S sin(b0 t) - T (1 - cos(b0 t))`
    /// (and its x2 counterpart), which is algebraically identical to the
    /// center-plus-circles form but returns `origin` exactly at `t = 0`
    /// instead of relying on cancellation of large near-resonant terms.
    pub fn position(&self, t: f64) -> [f64; 2] {
        let [p, q] = self.amp_l;
        let [s, tt] = self.amp_b;
        let (sl, cl) = (self.coriolis * t).sin_cos();
        let (sb, cb) = (self.b0 * t).sin_cos();
        [
            self.origin[0] + p * sl + q * (1.0 - cl) + s * sb - tt * (1.0 - cb),
            self.origin[1] + q * sl - p * (1.0 - cl) - tt * sb - s * (1.0 - cb),
        ]
    }

    /// Eye velocity at time `t`.
    pub fn velocity(&self, t: f64) -> [f64; 2] {
        let [p, q] = self.amp_l;
        let [s, tt] = self.amp_b;
        let l = self.coriolis;
        let (sl, cl) = (l * t).sin_cos();
        let (sb, cb) = (self.b0 * t).sin_cos();
        [
            l * (p * cl + q * sl) + self.b0 * (s * cb - tt * sb),
            l * (q * cl - p * sl) - self.b0 * (s * sb + tt * cb),
        ]
    }

    /// Eye acceleration at time `t`.
    pub fn acceleration(&self, t: f64) -> [f64; 2] {
        let [p, q] = self.amp_l;
        let [s, tt] = self.amp_b;
        let l2 = self.coriolis * self.coriolis;
        let b2 = self.b0 * self.b0;
        let (sl, cl) = (self.coriolis * t).sin_cos();
        let (sb, cb) = (self.b0 * t).sin_cos();
        [
            l2 * (q * cl - p * sl) - b2 * (s * sb + tt * cb),
            -l2 * (p * cl + q * sl) - b2 * (s * cb - tt * sb),
        ]
    }

    /// The rotating pressure-gradient forcing consistent with this
    /// trajectory: the equilibrium solution of the gradient equations,
    /// scaled by the pressure coupling.
    pub fn forcing(&self, t: f64) -> [f64; 2] {
        let (sb, cb) = (self.b0 * t).sin_cos();
        [
            self.mn[0] * cb + self.mn[1] * sb,
            self.mn[1] * cb - self.mn[0] * sb,
        ]
    }

    /// Split into the constant center and the two circular components.
    pub fn decompose(&self) -> Decomposition {
        let [p, q] = self.amp_l;
        let [s, t] = self.amp_b;
        Decomposition {
            center: self.center,
            inertial_circle: Circle {
                radius: p.hypot(q),
                frequency: self.coriolis,
                phase: (-q).atan2(p),
            },
            vorticity_circle: Circle {
                radius: s.hypot(t),
                frequency: self.b0,
                phase: t.atan2(s),
            },
        }
    }
}

/// Indices `(i, j)` of the first pair of non-adjacent path segments that
/// intersect, scanning in order, or `None` when the polyline is simple.
/// Segment `i` joins `path[i]` to `path[i + 1]`.
pub fn first_self_intersection(path: &[[f64; 2]]) -> Option<(usize, usize)> {
    fn orient(a: &[f64; 2], b: &[f64; 2], c: &[f64; 2]) -> f64 {
        (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    }
    fn on_segment(a: &[f64; 2], b: &[f64; 2], c: &[f64; 2]) -> bool {
        c[0] >= a[0].min(b[0])
            && c[0] <= a[0].max(b[0])
            && c[1] >= a[1].min(b[1])
            && c[1] <= a[1].max(b[1])
    }
    fn segments_intersect(p1: &[f64; 2], p2: &[f64; 2], q1: &[f64; 2], q2: &[f64; 2]) -> bool {
        let d1 = orient(q1, q2, p1);
        let d2 = orient(q1, q2, p2);
        let d3 = orient(p1, p2, q1);
        let d4 = orient(p1, p2, q2);
        if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
            && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
        {
            return true;
        }
        (d1 == 0.0 && on_segment(q1, q2, p1))
            || (d2 == 0.0 && on_segment(q1, q2, p2))
            || (d3 == 0.0 && on_segment(p1, p2, q1))
            || (d4 == 0.0 && on_segment(p1, p2, q2))
    }
    if path.len() < 4 {
        return None;
    }
    for j in 2..path.len() - 1 {
        // Segments (i, j) with i < j - 1 are non-adjacent.
        for i in 0..j - 1 {
            if i == 0 && j == path.len() - 2 && path[0] == path[path.len() - 1] {
                continue; // closed path endpoints touching is not a crossing
            }
            if segments_intersect(&path[i], &path[i + 1], &path[j], &path[j + 1]) {
                return Some((i, j));
            }
        }
    }
    None
}
