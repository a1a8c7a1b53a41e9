//! Series approximations used to reduce the ergodic-rate expressions to
//! elementary terms. These reproduce the stated truncated forms verbatim;
//! accuracy is the caller's concern.

use super::gamma::{digamma_int, EULER_GAMMA};
use crate::{Error, Result};

/// Default number of `k` terms kept from the infinite `E_n` series.
pub const DEFAULT_EN_TERMS: usize = 30;

/// `E_1(z) ≈ -C - ln z + z`.
pub fn approx_e1(z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::domain("approx_e1", format!("z = {z} must be > 0")));
    }
    Ok(-EULER_GAMMA - z.ln() + z)
}

/// `E_n(z) ≈ (-z)^{n-1}/(n-1)! (ψ(n) - ln z) - sum_{k=0, k≠n-1}^{terms-1} (-z)^k / (k! (1 - n + k))`
/// for `n >= 2`.
pub fn approx_en(n: u32, z: f64, terms: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("approx_en", "series form requires n >= 2"));
    }
    if !(z > 0.0) {
        return Err(Error::domain("approx_en", format!("z = {z} must be > 0")));
    }
    let nm1 = (n - 1) as usize;
    let mut lead = 1.0;
    for k in 1..=nm1 {
        lead *= -z / k as f64;
    }
    let mut sum = 0.0;
    let mut power = 1.0; // (-z)^k / k!
    for k in 0..terms {
        if k > 0 {
            power *= -z / k as f64;
        }
        if k != nm1 {
            sum += power / (1.0 + k as f64 - n as f64);
        }
    }
    Ok(lead * (digamma_int(n) - z.ln()) - sum)
}

/// Finite series for integer shape:
/// `γ(m, t) = (m-1)! - e^{-t} sum_{k=0}^{m-1} (m-1)!/k! t^k`.
pub fn approx_lower_gamma(m: u32, t: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("approx_lower_gamma", "m must be >= 1"));
    }
    if !(t >= 0.0) {
        return Err(Error::domain(
            "approx_lower_gamma",
            format!("t = {t} must be >= 0"),
        ));
    }
    let fact: f64 = (1..m).map(f64::from).product();
    let mut term = fact; // (m-1)!/k! t^k at k = 0
    let mut sum = term;
    for k in 1..m {
        term *= t / f64::from(k);
        sum += term;
    }
    Ok(fact - (-t).exp() * sum)
}
