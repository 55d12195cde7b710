//! Surface friction and vortex collapse.
//!
//! Linear damping of the velocity-profile coefficients destroys every
//! equilibrium with nonzero curvature: a stationary state would need
//! `div = 0`, then `rot = 0`, but then the divergence equation leaves the
//! bare pressure term `-2 c0 A != 0`. The damped system therefore cannot
//! hold a low-pressure core; runs show the phase-curve relation breaking
//! down while the motion turns convergent.

use crate::barotropic::{damped_rhs, integration_constants, BarotropicState};
use crate::error::{Error, Result};
use crate::ode::{self, Series};
use crate::params::ModelParams;

/// Time derivative of the damped system: the frictionless right-hand side
/// with `-k * div` and `-k * rot` added to the velocity-profile equations.
/// All other component equations are unchanged.
pub fn friction_rhs(s: &BarotropicState, p: &ModelParams) -> BarotropicState {
    damped_rhs(s, p, p.friction)
}

/// Outcome of a collapse run.
#[derive(Debug, Clone)]
pub struct Collapse {
    /// Full state series at the integration step.
    pub series: Vec<(f64, BarotropicState)>,
    /// Most negative divergence encountered (convergent inflow).
    pub min_div: f64,
    /// Largest rotation magnitude encountered.
    pub max_abs_rot: f64,
    /// Largest relative drift of the phase-curve constant away from its
    /// initial value; O(rounding) for `k = 0`, order one once friction
    /// destroys the invariant.
    pub invariant_drift: f64,
    /// Final state of the run.
    pub final_state: BarotropicState,
}

/// Integrate the damped system and report collapse diagnostics.
pub fn collapse_simulation(
    s0: &BarotropicState,
    p: &ModelParams,
    dt: f64,
    t_end: f64,
) -> Result<Collapse> {
    let friction = p.friction;
    let pc = *p;
    let series: Series<10> = ode::integrate(
        move |_, y| damped_rhs(&BarotropicState::from_array(y), &pc, friction).to_array(),
        |y| y[2] > 0.0 && y[5] > 0.0,
        s0.to_array(),
        0.0,
        dt,
        t_end,
    )?;
    let states: Vec<(f64, BarotropicState)> = series
        .iter()
        .map(|(t, y)| (t, BarotropicState::from_array(y)))
        .collect();
    let reference = integration_constants(s0, p)?;
    let mut min_div = f64::INFINITY;
    let mut max_abs_rot: f64 = 0.0;
    let mut invariant_drift: f64 = 0.0;
    for (_, s) in &states {
        min_div = min_div.min(s.div);
        max_abs_rot = max_abs_rot.max(s.rot.abs());
        let c = integration_constants(s, p)?;
        let drift =
            (c.phase_curve - reference.phase_curve).abs() / reference.phase_curve.abs().max(1e-300);
        invariant_drift = invariant_drift.max(drift);
    }
    let final_state = states
        .last()
        .map(|(_, s)| *s)
        .ok_or(Error::Domain("collapse run produced no states".to_string()))?;
    Ok(Collapse {
        series: states,
        min_div,
        max_abs_rot,
        invariant_drift,
        final_state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barotropic::barotropic_rhs;
    use crate::params::two_dim_gamma;

    /// Near-equilibrium anticyclonic state used by the damping runs.
    pub(crate) fn damped_reference() -> (BarotropicState, ModelParams) {
        let p = ModelParams::new(two_dim_gamma(1.4).unwrap(), 1e-4, 0.1).unwrap();
        let s = BarotropicState {
            div: 0.0,
            rot: -2e-6,
            curvature: 1e-9,
            grad: [0.0, 0.0],
            core: 1.0,
            vel: [0.0, 0.0],
            pos: [0.0, 0.0],
        };
        (s, p)
    }

    #[test]
    fn zero_friction_reduces_to_frictionless_rhs() {
        let (s, p) = damped_reference();
        let a = friction_rhs(&s, &p);
        let b = barotropic_rhs(&s, &p);
        assert_eq!(a, b);
    }

    #[test]
    fn damping_pushes_rotation_toward_zero() {
        let (mut s, p) = damped_reference();
        let p = p.with_friction(3e-5).unwrap();
        s.div = 0.0;
        let d = friction_rhs(&s, &p);
        // -k * rot = -3e-5 * (-2e-6) = +6e-11, toward zero from below.
        assert!((d.rot - 6e-11).abs() < 1e-24);
    }

    #[test]
    fn no_equilibrium_with_positive_curvature() {
        // At div = rot = 0 the divergence derivative is exactly -2 c0 A.
        let (mut s, p) = damped_reference();
        let p = p.with_friction(3e-5).unwrap();
        s.div = 0.0;
        s.rot = 0.0;
        for i in 0..1000 {
            let a = 1e-12 * 10f64.powf(6.0 * i as f64 / 999.0);
            s.curvature = a;
            let d = friction_rhs(&s, &p);
            let norm = (d.div * d.div + d.rot * d.rot + d.curvature * d.curvature).sqrt();
            assert!(norm >= 2.0 * p.c0 * a * (1.0 - 1e-9));
        }
    }

    #[test]
    fn frictionless_orbit_closes() {
        let (mut s, p) = damped_reference();
        s.div = 1e-8;
        // One small-oscillation period of the center.
        let c = integration_constants(&s, &p).unwrap();
        let (a_eq, _) = crate::barotropic::equilibrium(c.coupling, &p).unwrap();
        let omega_sq = 2.0
            * p.gamma
            * a_eq
            * ((2.0 / p.gamma) * c.coupling * c.coupling * a_eq.powf(2.0 / p.gamma - 1.0)
                - 2.0 * p.c0);
        let period = 2.0 * std::f64::consts::PI / omega_sq.sqrt();
        let dt = period / 4096.0;
        let run = collapse_simulation(&s, &p, dt, period).unwrap();
        let first = run.series.first().unwrap().1;
        let last = run.final_state;
        let rel = |a: f64, b: f64, scale: f64| (a - b).abs() / scale;
        assert!(rel(first.curvature, last.curvature, first.curvature) < 1e-4);
        assert!(rel(first.div, last.div, 1e-8) < 1e-4 * 10.0);
    }

    #[test]
    fn invariant_drift_grows_with_friction() {
        let (s, p) = damped_reference();
        let mut drifts = Vec::new();
        for k in [1e-6, 1e-5, 3e-5] {
            let pk = p.with_friction(k).unwrap();
            let run = collapse_simulation(&s, &pk, 60.0, 86_400.0).unwrap();
            drifts.push(run.invariant_drift);
        }
        assert!(drifts[0] < drifts[1] && drifts[1] < drifts[2], "{drifts:?}");
    }
}
