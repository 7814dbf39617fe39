//! Magnon-squeezing-enhanced ground-state cooling in cavity magnomechanics.
//!
//! * [`model`]: closed-form magnon spectrum, scattering rates, the
//!   rate-equation phonon number and the Stokes-nulling squeezing.
//! * [`steady`]: driven mean fields and the effective coupling/squeezing.
//! * [`oracle`]: the full linearized Gaussian model (drift, diffusion,
//!   Lyapunov covariance, frequency-domain spectrum).
//! * [`sweep`], [`optimize`], [`figures`]: parameter sweeps, numeric
//!   squeezing optimization and figure datasets.
//! * [`verify`]: the acceptance checks, shared by tests and the CLI.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod figures;
pub mod model;
pub mod optimize;
pub mod oracle;
pub mod params;
pub mod steady;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    coupled_response, magnon_spectrum, natural_susceptibility, optimal_squeezing, scattering_rates,
    steady_phonon_number, thermal_occupancy, CoolingReport, ScatteringRates,
};
pub use params::{SqueezingParams, SystemParams};
