//! Physical constants and model parameter sets.

use crate::error::{Error, Result};

/// Earth's angular speed in rad/s. Overridable through
/// [`coriolis_parameter_with_omega`].
pub const EARTH_ANGULAR_SPEED: f64 = 7.292_115_9e-5;

/// Specific gas constant of dry air, J/(kg K). Default for the
/// temperature-based momentum coupling; override with
/// [`ModelParams::with_gas_constant`] when a different working fluid or
/// normalization is wanted.
pub const DRY_AIR_GAS_CONSTANT: f64 = 287.0;

/// Height-averaging maps the usual adiabatic exponent onto a reduced
/// two-dimensional one: `(2g - 1)/g`. The result lies in (1, 2), which is
/// exactly the range where the reduced vortex system has a center-type
/// equilibrium.
pub fn two_dim_gamma(gamma3d: f64) -> Result<f64> {
    if !(gamma3d > 1.0) {
        return Err(Error::Domain(format!(
            "adiabatic exponent must exceed 1, got {gamma3d}"
        )));
    }
    Ok((2.0 * gamma3d - 1.0) / gamma3d)
}

/// Coriolis parameter `2 Ω sin(latitude)` at the given latitude in degrees.
pub fn coriolis_parameter(latitude_deg: f64) -> Result<f64> {
    coriolis_parameter_with_omega(latitude_deg, EARTH_ANGULAR_SPEED)
}

/// Coriolis parameter with an explicit planetary angular speed.
pub fn coriolis_parameter_with_omega(latitude_deg: f64, omega: f64) -> Result<f64> {
    if !(-90.0..=90.0).contains(&latitude_deg) {
        return Err(Error::Domain(format!(
            "latitude must lie in [-90, 90] degrees, got {latitude_deg}"
        )));
    }
    Ok(2.0 * omega * latitude_deg.to_radians().sin())
}

/// Constants shared by all dynamics variants.
///
/// All values are SI. The viscosity/heat quadruple only enters the central
/// temperature equation of the temperature-density system; the trajectory
/// itself never depends on it.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ModelParams {
    /// Two-dimensional adiabatic exponent, in (1, 2).
    pub gamma: f64,
    /// Coriolis parameter l, 1/s. May be 0 at the equator.
    pub coriolis: f64,
    /// Pressure-gradient coupling constant c0 (> 0), the prefactor of the
    /// renormalized pressure gradient in the momentum equation.
    pub c0: f64,
    /// Specific gas constant R, J/(kg K); used only by the
    /// temperature-density system.
    pub gas_constant: f64,
    /// Turbulent shear viscosity mu.
    pub viscosity: f64,
    /// Second (bulk) viscosity lambda.
    pub bulk_viscosity: f64,
    /// Heat conduction coefficient kappa.
    pub heat_conduction: f64,
    /// Constant heat inflow from the ocean surface xi.
    pub ocean_heat_flux: f64,
    /// Surface-friction damping rate k, 1/s (>= 0).
    pub friction: f64,
}

impl ModelParams {
    /// Parameter set with the given exponent, Coriolis parameter and
    /// pressure constant; everything else defaults (dry-air R, no
    /// viscosity, no friction).
    pub fn new(gamma: f64, coriolis: f64, c0: f64) -> Result<Self> {
        let params = Self {
            gamma,
            coriolis,
            c0,
            gas_constant: DRY_AIR_GAS_CONSTANT,
            viscosity: 0.0,
            bulk_viscosity: 0.0,
            heat_conduction: 0.0,
            ocean_heat_flux: 0.0,
            friction: 0.0,
        };
        params.validate()?;
        Ok(params)
    }

    /// Same parameters with a surface-friction rate.
    pub fn with_friction(mut self, friction: f64) -> Result<Self> {
        self.friction = friction;
        self.validate()?;
        Ok(self)
    }

    /// Same parameters with a different gas constant.
    pub fn with_gas_constant(mut self, gas_constant: f64) -> Result<Self> {
        self.gas_constant = gas_constant;
        self.validate()?;
        Ok(self)
    }

    /// Same parameters with turbulent viscosity and heat-transfer constants.
    pub fn with_heat_terms(
        mut self,
        viscosity: f64,
        bulk_viscosity: f64,
        heat_conduction: f64,
        ocean_heat_flux: f64,
    ) -> Result<Self> {
        self.viscosity = viscosity;
        self.bulk_viscosity = bulk_viscosity;
        self.heat_conduction = heat_conduction;
        self.ocean_heat_flux = ocean_heat_flux;
        self.validate()?;
        Ok(self)
    }

    /// Check every parameter invariant.
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 1.0 && self.gamma < 2.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must lie in (1, 2), got {}",
                self.gamma
            )));
        }
        if !self.coriolis.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "coriolis parameter must be finite, got {}",
                self.coriolis
            )));
        }
        if !(self.c0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "c0 must be positive, got {}",
                self.c0
            )));
        }
        if !(self.gas_constant > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gas constant must be positive, got {}",
                self.gas_constant
            )));
        }
        if !(self.friction >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "friction must be non-negative, got {}",
                self.friction
            )));
        }
        Ok(())
    }
}
