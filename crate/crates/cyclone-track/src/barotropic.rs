//! The pressure-based coefficient system.
//!
//! A linear velocity profile `u = div * r + rot * r_perp` together with a
//! quadratic renormalized-pressure profile closes the height-averaged
//! equations into a ten-component ODE system for the profile coefficients,
//! the eye velocity and the eye position. The reduced `(curvature, div)`
//! subsystem conserves an algebraic phase-curve relation and, for
//! `1 < gamma < 2`, has a single center-type equilibrium with positive
//! curvature.

use crate::error::{Error, Result};
use crate::ode::{self, Series};
use crate::params::ModelParams;
use crate::root;

/// Instantaneous coefficients of the vortex solution.
///
/// `div` and `rot` are the divergence and rotation parts of the linear
/// velocity profile (1/s). `curvature`, `grad` and `core` describe the
/// renormalized pressure surface `curvature * |r|^2 + grad . r + core`;
/// a positive `curvature` is a low-pressure core and `core` stays positive
/// in the physical regime. `vel` and `pos` are the eye velocity (m/s) and
/// position (m) in the local tangent plane.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BarotropicState {
    pub div: f64,
    pub rot: f64,
    pub curvature: f64,
    pub grad: [f64; 2],
    pub core: f64,
    pub vel: [f64; 2],
    pub pos: [f64; 2],
}

impl BarotropicState {
    pub(crate) fn to_array(self) -> [f64; 10] {
        [
            self.div,
            self.rot,
            self.curvature,
            self.grad[0],
            self.grad[1],
            self.core,
            self.vel[0],
            self.vel[1],
            self.pos[0],
            self.pos[1],
        ]
    }

    pub(crate) fn from_array(y: &[f64; 10]) -> Self {
        Self {
            div: y[0],
            rot: y[1],
            curvature: y[2],
            grad: [y[3], y[4]],
            core: y[5],
            vel: [y[6], y[7]],
            pos: [y[8], y[9]],
        }
    }
}

/// Constants of motion of the pressure-based system.
///
/// `coupling` ties rotation to curvature, `core_scale` ties the central
/// pressure to curvature, and `phase_curve` fixes the algebraic phase curve
/// of the reduced `(curvature, div)` subsystem. All three are conserved
/// along exact frictionless orbits.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IntegrationConstants {
    pub coupling: f64,
    pub core_scale: f64,
    pub phase_curve: f64,
}

/// Time derivative of the full ten-component state.
pub fn barotropic_rhs(s: &BarotropicState, p: &ModelParams) -> BarotropicState {
    damped_rhs(s, p, 0.0)
}

/// Shared right-hand side; `friction` adds linear damping to the velocity
/// profile coefficients only.
pub(crate) fn damped_rhs(s: &BarotropicState, p: &ModelParams, friction: f64) -> BarotropicState {
    let l = p.coriolis;
    let g = p.gamma;
    let two_g_m1 = 2.0 * g - 1.0;
    BarotropicState {
        div: -s.div * s.div + s.rot * s.rot
            - l * s.rot
            - 2.0 * p.c0 * s.curvature
            - friction * s.div,
        rot: -2.0 * s.div * s.rot + l * s.div - friction * s.rot,
        curvature: -2.0 * g * s.div * s.curvature,
        grad: [
            -two_g_m1 * s.div * s.grad[0] + s.rot * s.grad[1],
            -two_g_m1 * s.div * s.grad[1] - s.rot * s.grad[0],
        ],
        core: -2.0 * (g - 1.0) * s.div * s.core,
        vel: [
            l * s.vel[1] - p.c0 * s.grad[0],
            -l * s.vel[0] - p.c0 * s.grad[1],
        ],
        pos: s.vel,
    }
}

/// The three constants of motion evaluated at a state.
///
/// The phase-curve constant is derived by quadrature from the reduced
/// subsystem: along exact orbits
///
/// `div^2 = phase_curve * A^(1/g) - coupling^2 * A^(2/g) - l^2/4 + 2 c0 A/(g-1)`
///
/// with `A` the curvature coefficient.
pub fn integration_constants(s: &BarotropicState, p: &ModelParams) -> Result<IntegrationConstants> {
    if !(s.curvature > 0.0) {
        return Err(Error::NonPositiveCurvature(s.curvature));
    }
    let g = p.gamma;
    let l = p.coriolis;
    let a = s.curvature;
    let coupling = (s.rot - 0.5 * l) * a.powf(-1.0 / g);
    let core_scale = s.core * a.powf(-(g - 1.0) / g);
    let phase_curve = (s.div * s.div + coupling * coupling * a.powf(2.0 / g) + 0.25 * l * l
        - 2.0 * p.c0 * a / (g - 1.0))
        * a.powf(-1.0 / g);
    Ok(IntegrationConstants {
        coupling,
        core_scale,
        phase_curve,
    })
}

/// Normalized residual of the phase-curve relation at a state, given
/// previously computed constants. Zero (to rounding) on exact solutions;
/// nonzero values signal that the state left the phase curve, e.g. under
/// surface friction.
pub fn phase_invariant_residual(
    s: &BarotropicState,
    p: &ModelParams,
    c: &IntegrationConstants,
) -> Result<f64> {
    if !(s.curvature > 0.0) {
        return Err(Error::NonPositiveCurvature(s.curvature));
    }
    let g = p.gamma;
    let l = p.coriolis;
    let a = s.curvature;
    let rhs =
        c.phase_curve * a.powf(1.0 / g) - c.coupling * c.coupling * a.powf(2.0 / g) - 0.25 * l * l
            + 2.0 * p.c0 * a / (g - 1.0);
    let scale = (s.div * s.div).max(l * l);
    Ok((s.div * s.div - rhs) / scale)
}

/// Equilibrium of the reduced subsystem for a given coupling constant:
/// the positive curvature root of
/// `-l^2/4 + coupling^2 A^(2/g) - 2 c0 A = 0` and the matching rotation
/// `rot0 = l/2 + coupling * A0^(1/g)`, which also solves the gradient-wind
/// quadratic `rot0^2 - l rot0 - 2 c0 A0 = 0`.
///
/// Bracketing bisection on `A in [1e-15, 1]`; 200 iterations pin the root
/// to far below every tolerance used downstream.
pub fn equilibrium(coupling: f64, p: &ModelParams) -> Result<(f64, f64)> {
    equilibrium_of(coupling, p.coriolis, 2.0 * p.c0, p.gamma)
}

/// Shared equilibrium solver: positive root of
/// `-l^2/4 + coupling^2 A^(2/g) - pressure_factor * A = 0`.
pub(crate) fn equilibrium_of(
    coupling: f64,
    l: f64,
    pressure_factor: f64,
    g: f64,
) -> Result<(f64, f64)> {
    if coupling == 0.0 {
        return Err(Error::NoEquilibrium);
    }
    let f = |a: f64| -0.25 * l * l + coupling * coupling * a.powf(2.0 / g) - pressure_factor * a;
    let (lo, hi) = (1e-15, 1.0);
    if f(lo) > 0.0 || f(hi) < 0.0 {
        return Err(Error::NoEquilibrium);
    }
    let a0 = root::bisect(f, lo, hi, 0.0, 200).ok_or(Error::NoEquilibrium)?;
    let rot0 = 0.5 * l + coupling * a0.powf(1.0 / g);
    Ok((a0, rot0))
}

/// Integrate the pressure-based system with the classical fixed-step
/// scheme, guarding curvature and core positivity.
pub fn simulate(
    s0: &BarotropicState,
    p: &ModelParams,
    dt: f64,
    t_end: f64,
) -> Result<Vec<(f64, BarotropicState)>> {
    let p = *p;
    let series: Series<10> = ode::integrate(
        move |_, y| damped_rhs(&BarotropicState::from_array(y), &p, 0.0).to_array(),
        |y| y[2] > 0.0 && y[5] > 0.0,
        s0.to_array(),
        0.0,
        dt,
        t_end,
    )?;
    Ok(series
        .iter()
        .map(|(t, y)| (t, BarotropicState::from_array(y)))
        .collect())
}
