//! Fixed-step classical Runge-Kutta integration.
//!
//! The coefficient systems integrated here are smooth and non-stiff at
//! physical parameter scales, so a fixed-step 4th-order scheme at the
//! default step keeps invariant drift far below every tolerance used by the
//! test suites. No adaptive control is provided on purpose.

use crate::error::{Error, Result};

/// Default integration step, seconds.
pub const DEFAULT_DT: f64 = 60.0;

/// A fixed-step time series produced by [`integrate`].
#[derive(Debug, Clone)]
pub struct Series<const D: usize> {
    /// Time of the first state, seconds.
    pub t0: f64,
    /// Step between consecutive states, seconds.
    pub dt: f64,
    /// States at `t0 + k * dt`.
    pub states: Vec<[f64; D]>,
}

impl<const D: usize> Series<D> {
    /// Time of the `i`-th state.
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    /// Time of the last state.
    pub fn end_time(&self) -> f64 {
        self.time(self.states.len().saturating_sub(1))
    }

    /// Iterator over `(t, state)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, &[f64; D])> {
        self.states
            .iter()
            .enumerate()
            .map(move |(i, s)| (self.time(i), s))
    }
}

fn rk4_step<const D: usize>(
    rhs: &impl Fn(f64, &[f64; D]) -> [f64; D],
    t: f64,
    y: &[f64; D],
    dt: f64,
) -> [f64; D] {
    let k1 = rhs(t, y);
    let mut ym = [0.0; D];
    for i in 0..D {
        ym[i] = y[i] + 0.5 * dt * k1[i];
    }
    let k2 = rhs(t + 0.5 * dt, &ym);
    for i in 0..D {
        ym[i] = y[i] + 0.5 * dt * k2[i];
    }
    let k3 = rhs(t + 0.5 * dt, &ym);
    for i in 0..D {
        ym[i] = y[i] + dt * k3[i];
    }
    let k4 = rhs(t + dt, &ym);
    let mut out = [0.0; D];
    for i in 0..D {
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Integrate `dy/dt = rhs(t, y)` from `t0` to `t_end` with step `dt`,
/// returning states at `t0, t0 + dt, ..`.
///
/// `guard` is checked after every step in addition to finiteness; a `false`
/// verdict aborts the run with [`Error::Blowup`] carrying the last valid
/// time. The number of steps is `round((t_end - t0)/dt)`, so a `t_end` that
/// is an exact multiple of `dt` lands exactly.
pub fn integrate<const D: usize>(
    rhs: impl Fn(f64, &[f64; D]) -> [f64; D],
    guard: impl Fn(&[f64; D]) -> bool,
    y0: [f64; D],
    t0: f64,
    dt: f64,
    t_end: f64,
) -> Result<Series<D>> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("step must be positive, got {dt}")));
    }
    if t_end < t0 {
        return Err(Error::Domain(format!(
            "end time {t_end} precedes start time {t0}"
        )));
    }
    if !(y0.iter().all(|v| v.is_finite()) && guard(&y0)) {
        return Err(Error::Blowup {
            last_valid_time: t0,
        });
    }
    let n_steps = ((t_end - t0) / dt).round() as usize;
    let mut states = Vec::with_capacity(n_steps + 1);
    states.push(y0);
    let mut y = y0;
    for k in 0..n_steps {
        let t = t0 + k as f64 * dt;
        y = rk4_step(&rhs, t, &y, dt);
        if !(y.iter().all(|v| v.is_finite()) && guard(&y)) {
            return Err(Error::Blowup { last_valid_time: t });
        }
        states.push(y);
    }
    Ok(Series { t0, dt, states })
}
