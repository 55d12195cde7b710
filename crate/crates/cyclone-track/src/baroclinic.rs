//! The temperature-density coefficient system.
//!
//! Keeping temperature and height-integrated density as separate averaged
//! fields yields an eleven-component system with the same reduced
//! `(curvature, div)` structure as the pressure-based one; turbulent
//! viscosity and heat transfer enter only the central-temperature equation
//! and never feed back into the trajectory.

use crate::barotropic;
use crate::error::{Error, Result};
use crate::ode::{self, Series};
use crate::params::ModelParams;

/// Instantaneous coefficients of the temperature-density solution.
///
/// `curvature`, `grad` and `core_temp` describe the temperature surface
/// `curvature * |r|^2 + grad . r + core_temp` (K); `density` is the
/// height-integrated density (kg/m^2, > 0). Velocity-profile and eye
/// fields are as in [`barotropic::BarotropicState`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BaroclinicState {
    pub div: f64,
    pub rot: f64,
    pub curvature: f64,
    pub grad: [f64; 2],
    pub core_temp: f64,
    pub density: f64,
    pub vel: [f64; 2],
    pub pos: [f64; 2],
}

impl BaroclinicState {
    pub(crate) fn to_array(self) -> [f64; 11] {
        [
            self.div,
            self.rot,
            self.curvature,
            self.grad[0],
            self.grad[1],
            self.core_temp,
            self.density,
            self.vel[0],
            self.vel[1],
            self.pos[0],
            self.pos[1],
        ]
    }

    pub(crate) fn from_array(y: &[f64; 11]) -> Self {
        Self {
            div: y[0],
            rot: y[1],
            curvature: y[2],
            grad: [y[3], y[4]],
            core_temp: y[5],
            density: y[6],
            vel: [y[7], y[8]],
            pos: [y[9], y[10]],
        }
    }
}

/// Time derivative of the eleven-component state.
///
/// The density must be positive: the heat-conduction term divides by it.
pub fn baroclinic_rhs(s: &BaroclinicState, p: &ModelParams) -> Result<BaroclinicState> {
    if !(s.density > 0.0) {
        return Err(Error::Domain(format!(
            "height-integrated density must be positive, got {:e}",
            s.density
        )));
    }
    Ok(baroclinic_rhs_unchecked(s, p))
}

fn baroclinic_rhs_unchecked(s: &BaroclinicState, p: &ModelParams) -> BaroclinicState {
    let l = p.coriolis;
    let g = p.gamma;
    let r = p.gas_constant;
    let two_g_m1 = 2.0 * g - 1.0;
    BaroclinicState {
        div: -s.div * s.div + s.rot * s.rot - l * s.rot - 4.0 * r * s.curvature,
        rot: -2.0 * s.div * s.rot + l * s.div,
        curvature: -2.0 * g * s.div * s.curvature,
        grad: [
            -two_g_m1 * s.div * s.grad[0] + s.rot * s.grad[1],
            -two_g_m1 * s.div * s.grad[1] - s.rot * s.grad[0],
        ],
        core_temp: -2.0 * (g - 1.0) * s.div * s.core_temp
            + 2.0 * (g - 1.0) * (2.0 * p.viscosity + p.bulk_viscosity) * s.div * s.div / r
            + p.heat_conduction / s.density * (p.ocean_heat_flux - 4.0 * s.curvature),
        density: -2.0 * s.div * s.density,
        vel: [
            l * s.vel[1] - 2.0 * r * s.grad[0],
            -l * s.vel[0] - 2.0 * r * s.grad[1],
        ],
        pos: s.vel,
    }
}

/// Rotation-curvature coupling constant of the temperature system,
/// conserved along exact orbits: `(rot - l/2) * curvature^(-1/gamma)`.
pub fn baroclinic_coupling(s: &BaroclinicState, p: &ModelParams) -> Result<f64> {
    if !(s.curvature > 0.0) {
        return Err(Error::NonPositiveCurvature(s.curvature));
    }
    Ok((s.rot - 0.5 * p.coriolis) * s.curvature.powf(-1.0 / p.gamma))
}

/// Equilibrium of the reduced temperature subsystem: the positive
/// curvature root of `-l^2/4 + coupling^2 A^(2/g) - 4 R A = 0` with the
/// matching rotation. Identical to the pressure-based equilibrium with the
/// pressure factor `2 c0` replaced by `4 R`.
pub fn equilibrium_baroclinic(coupling: f64, p: &ModelParams) -> Result<(f64, f64)> {
    barotropic::equilibrium_of(coupling, p.coriolis, 4.0 * p.gas_constant, p.gamma)
}

/// Integrate the temperature-density system, guarding curvature and
/// density positivity.
pub fn simulate(
    s0: &BaroclinicState,
    p: &ModelParams,
    dt: f64,
    t_end: f64,
) -> Result<Vec<(f64, BaroclinicState)>> {
    if !(s0.density > 0.0) {
        return Err(Error::Domain(format!(
            "height-integrated density must be positive, got {:e}",
            s0.density
        )));
    }
    let p = *p;
    let series: Series<11> = ode::integrate(
        move |_, y| baroclinic_rhs_unchecked(&BaroclinicState::from_array(y), &p).to_array(),
        |y| y[2] > 0.0 && y[6] > 0.0,
        s0.to_array(),
        0.0,
        dt,
        t_end,
    )?;
    Ok(series
        .iter()
        .map(|(t, y)| (t, BaroclinicState::from_array(y)))
        .collect())
}
