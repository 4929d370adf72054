//! Secrecy outage probability (SOP) of an underlay cognitive small-cell
//! network with unreliable wireless backhaul.
//!
//! A primary transmitter/receiver pair shares its spectrum with `K`
//! small-cell transmitters that reach their destination through Bernoulli
//! backhaul links while an eavesdropper listens in. All links are Rayleigh
//! faded. The secondary transmit SNR is the largest value that still meets
//! the primary network's outage-probability constraint, and the secrecy
//! outage probability of the selected small-cell link is computed three
//! independent ways:
//!
//! * [`analytic::sop_closed_form`] — exponential-integral closed form,
//! * [`analytic::sop_quadrature`] — adaptive quadrature of the defining
//!   integral over the eavesdropper SINR density,
//! * [`montecarlo::estimate_sop`] — direct channel simulation.
//!
//! The three routes agree to within quadrature tolerance / Monte Carlo
//! standard error; the test suites enforce exactly that.

// Guards of the form `!(x > 0.0)` are deliberate: they reject NaN along
// with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
mod dd;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod power;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
pub use model::{ChannelMeans, PrimaryParams, SecondaryParams, SystemParams};
pub use power::PowerAllocation;
