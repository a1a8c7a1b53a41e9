//! Closed-form and single-integral evaluators for the outage probabilities
//! and the ergodic REIR, plus the high-SNR slope of the latter.
//!
//! Every closed form has an independent integral representation so the two
//! can be checked against each other and against Monte Carlo.

mod outage;
mod reir;

use serde::Serialize;

use crate::specfun::{integrate_to_infinity, ln_gamma, Integral, QuadratureSpec};
use crate::{Error, Result};

pub use outage::{
    outage_comm_tx, outage_comm_tx_closed, outage_comm_tx_integral, outage_radar_comm,
    outage_radar_comm_closed, outage_radar_comm_integral,
};
pub use reir::{
    diversity_slope, ergodic_reir, ergodic_reir_integer_m, ergodic_reir_quadrature,
    ergodic_reir_rayleigh, reir_instant,
};

/// Slack allowed outside [0, 1] before a probability is treated as wrong.
pub const PROBABILITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutageMethod {
    ClosedForm,
    SemiIntegral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutageResult {
    pub probability: f64,
    pub method: OutageMethod,
    /// Quadrature error estimate; zero for the closed forms.
    pub error_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReirMethod {
    Quadrature,
    IntegerM,
    RayleighClosed,
    MonteCarlo,
}

/// An ergodic REIR in bits/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReirResult {
    pub rate: f64,
    pub method: ReirMethod,
    pub error_estimate: f64,
}

/// Requested evaluation route for the analytic metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    /// Series or special-function form; falls back to the integral when the
    /// series needs an integer shape that is not available.
    Closed,
    Integral,
}

fn clamp_probability(function: &'static str, p: f64) -> Result<f64> {
    if !p.is_finite() || !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p) {
        return Err(Error::ProbabilityOutOfRange { function, value: p });
    }
    Ok(p.clamp(0.0, 1.0))
}

fn require_integer_m(function: &'static str, m: f64) -> Result<u32> {
    if m >= 1.0 && m.fract() == 0.0 && m <= 1e6 {
        Ok(m as u32)
    } else {
        Err(Error::precondition(
            function,
            format!("the series needs an integer Nakagami shape, got m = {m}"),
        ))
    }
}

/// `∫_{lower}^∞ g(x) f(x) dx` for the Gamma(m, m) density `f`.
///
/// Integrated in `u = √x`, which turns `x^{m-1} dx` into `2u^{2m-1} du`
/// and removes the singularity at the origin for `m >= 1/2`.
fn gamma_expectation<G: Fn(f64) -> f64>(
    m: f64,
    lower: f64,
    g: G,
    quad: &QuadratureSpec,
) -> Result<Integral> {
    if lower.is_infinite() {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            subdivisions: 0,
        });
    }
    let log_norm = std::f64::consts::LN_2 + m * m.ln() - ln_gamma(m);
    integrate_to_infinity(
        |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            let x = u * u;
            let w = (log_norm + (2.0 * m - 1.0) * u.ln() - m * x).exp();
            if w == 0.0 {
                0.0
            } else {
                w * g(x)
            }
        },
        lower.sqrt(),
        quad,
    )
}
