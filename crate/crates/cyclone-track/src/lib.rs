//! Height-averaged tropical-cyclone vortex model.
//!
//! The library builds on an exact solution family of the height-averaged
//! rotating compressible flow equations: a linear velocity profile around
//! the vortex eye with quadratic pressure (or temperature) surfaces. The
//! profile coefficients close into small ODE systems whose equilibrium
//! turns the eye track into a superposition of two circular motions, one
//! at the inertial period and one at the period of the averaged vorticity.
//!
//! Modules:
//!
//! - [`params`]: physical constants and parameter sets.
//! - [`ode`]: the fixed-step integrator shared by the dynamics modules.
//! - [`barotropic`]: the pressure-based coefficient system, its constants
//!   of motion and equilibrium analysis.
//! - [`baroclinic`]: the temperature-density variant with viscosity and
//!   heat-transfer terms.
//! - [`friction`]: surface-friction damping and vortex collapse.
//! - [`trajectory`]: the closed-form equilibrium track and its two-circle
//!   decomposition.
//! - [`fitting`]: three-point parameter estimation, vorticity search,
//!   track sweeps and forecasting.
//! - [`geo`]: geographic conversion, track CSV I/O and forecast scoring.
//!
//! The `parallel` feature (on by default) runs track sweeps and vorticity
//! scans on a rayon pool; results are identical to the sequential path.

// Validation guards are written `!(x > 0.0)` so that NaN inputs fail
// them too; the negated form is the point.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baroclinic;
pub mod barotropic;
mod error;
pub mod fitting;
pub mod friction;
pub mod geo;
mod linalg;
pub mod ode;
pub mod params;
mod root;
pub mod trajectory;

pub use error::{Error, Result};
pub use params::{coriolis_parameter, two_dim_gamma, ModelParams};
