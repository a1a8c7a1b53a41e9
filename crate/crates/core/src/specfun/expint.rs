//! Generalized exponential integrals `E_n(z) = ∫_1^∞ e^{-zt} t^{-n} dt`.

use super::gamma::{digamma_int, EULER_GAMMA};
use crate::{Error, Result};

const MAX_ITER: usize = 500;

fn check(n: u32, z: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("expint_en", "order n must be >= 1"));
    }
    if !(z > 0.0) {
        return Err(Error::domain("expint_en", format!("z = {z} must be > 0")));
    }
    Ok(())
}

/// `E_n(z)` for `n >= 1`, `z > 0`.
pub fn expint_en(n: u32, z: f64) -> Result<f64> {
    check(n, z)?;
    if z.is_infinite() {
        return Ok(0.0);
    }
    if z > 1.0 {
        Ok(continued_fraction(n, z) * (-z).exp())
    } else {
        Ok(series(n, z))
    }
}

/// `e^z E_n(z)`. Stays finite for large `z`, where `e^z` alone overflows and
/// `E_n(z)` underflows.
pub fn expint_en_scaled(n: u32, z: f64) -> Result<f64> {
    check(n, z)?;
    if z.is_infinite() {
        return Ok(0.0);
    }
    if z > 1.0 {
        Ok(continued_fraction(n, z))
    } else {
        Ok(series(n, z) * z.exp())
    }
}

// Lentz evaluation of e^z E_n(z) = 1/(z+n- 1·n/(z+n+2- 2(n+1)/(z+n+4- ...)))
fn continued_fraction(n: u32, z: f64) -> f64 {
    let tiny = 1e-300;
    let nm1 = (n - 1) as f64;
    let mut b = z + n as f64;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let a = -(i as f64) * (nm1 + i as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < f64::EPSILON {
            break;
        }
    }
    h
}

fn series(n: u32, z: f64) -> f64 {
    let nm1 = n - 1;
    let mut ans = if nm1 != 0 {
        1.0 / nm1 as f64
    } else {
        -z.ln() - EULER_GAMMA
    };
    let mut fact = 1.0;
    for i in 1..MAX_ITER as u32 {
        fact *= -z / i as f64;
        let del = if i != nm1 {
            -fact / (i as f64 - nm1 as f64)
        } else {
            fact * (-z.ln() + digamma_int(n))
        };
        ans += del;
        if del.abs() < ans.abs() * f64::EPSILON {
            break;
        }
    }
    ans
}
