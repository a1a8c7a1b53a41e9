//! Performance analysis for NOMA-assisted semi-integrated sensing and
//! communication (Semi-ISaC) uplinks.
//!
//! A near communication transmitter and a far radar target share one
//! resource block. The base station decodes the transmitter first, the
//! target's uplink second, and the radar echo last. This crate evaluates:
//!
//! * outage probabilities of both uplinks, in closed form and as
//!   single-integral expressions ([`analytic`]),
//! * the ergodic radar estimation information rate (REIR) through three
//!   independent routes ([`analytic`]),
//! * a seeded, data-parallel Monte Carlo simulator used as ground truth for
//!   all of the above ([`montecarlo`]).
//!
//! The numerical building blocks (incomplete gamma, `K0`, `E_n`, adaptive
//! Gauss-Kronrod quadrature and the distribution of a product of two
//! Nakagami-m power gains) live in [`specfun`].
//!
//! With the default `parallel` feature, Monte Carlo blocks and sweep points
//! run on rayon; without it everything executes sequentially and produces
//! bit-identical results.

// Coefficient tables keep their published digits, and `!(x > 0.0)` is the
// idiom that also rejects NaN.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod channel;
mod error;
pub mod linkbudget;
pub mod montecarlo;
pub mod specfun;

pub use error::{Error, Result};

pub use channel::{FadingSpec, PathLossParams};
pub use linkbudget::{
    ChannelRealization, DerivedConstants, InterferenceMode, LinkBudget, SystemConfig,
};
pub use montecarlo::{EstimateWithCI, TrialPlan, Workers};
pub use specfun::QuadratureSpec;
