use super::{
    clamp_probability, gamma_expectation, require_integer_m, OutageMethod, OutageResult, Route,
};
use crate::linkbudget::{DerivedConstants, SystemConfig};
use crate::specfun::{gamma_p, ln_gamma, ln_upper_inc_gamma, QuadratureSpec};
use crate::Result;

// e * ln(base), with base^0 = 1 even for base = 0.
fn ln_pow(base: f64, e: u32) -> f64 {
    if e == 0 {
        0.0
    } else {
        e as f64 * base.ln()
    }
}

fn ln_binomial(n: u32, k: u32) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

fn closed(probability: f64) -> OutageResult {
    OutageResult {
        probability,
        method: OutageMethod::ClosedForm,
        error_estimate: 0.0,
    }
}

fn semi(probability: f64, error_estimate: f64) -> OutageResult {
    OutageResult {
        probability,
        method: OutageMethod::SemiIntegral,
        error_estimate,
    }
}

/// Outage of the communication transmitter, decoded first with the radar
/// target's uplink and the mean echo as interference. Double finite series;
/// requires integer `m`.
///
/// Terms are assembled in log space because at low transmit SNR the
/// exponential factor underflows while the polynomial factors overflow.
pub fn outage_comm_tx_closed(k: &DerivedConstants, cfg: &SystemConfig) -> Result<OutageResult> {
    let m = require_integer_m("outage_comm_tx_closed", cfg.m())?;
    let (g, pc, pr) = (cfg.gamma_th, cfg.p_c, cfg.p_r);
    if g == 0.0 {
        return Ok(closed(0.0));
    }
    if pc == 0.0 {
        return Ok(closed(1.0));
    }
    let mf = m as f64;
    let a12 = k.a1 + k.a2;
    let exponent = -mf * g * a12 / pc;
    let ln_c = (g * k.a3 * pr / pc).ln_1p();
    let ln_fact_m1 = ln_gamma(mf);

    let mut success = 0.0;
    for p in 0..m {
        for r in 0..=p {
            let shape = (m + p - r) as f64;
            let ln_term =
                ln_binomial(p, r) + r as f64 * mf.ln() + ln_pow(g, p) + ln_pow(pr * k.a3, p - r)
                    - ln_fact_m1
                    - ln_gamma(p as f64 + 1.0)
                    + ln_pow(a12, r)
                    - p as f64 * pc.ln()
                    + ln_gamma(shape)
                    - shape * ln_c
                    + exponent;
            success += ln_term.exp();
        }
    }
    Ok(closed(clamp_probability(
        "outage_comm_tx_closed",
        1.0 - success,
    )?))
}

/// The same outage as a single integral over the radar target's gain:
/// `∫ P(m, m Λ(x)) f(x) dx` with `Λ(x) = γ_th (a3 P_r x + a1 + a2) / P_c`.
/// Valid for any real `m >= 1/2`.
pub fn outage_comm_tx_integral(
    k: &DerivedConstants,
    cfg: &SystemConfig,
    quad: &QuadratureSpec,
) -> Result<OutageResult> {
    let (g, pc, pr, m) = (cfg.gamma_th, cfg.p_c, cfg.p_r, cfg.m());
    if g == 0.0 {
        return Ok(semi(0.0, 0.0));
    }
    if pc == 0.0 {
        return Ok(semi(1.0, 0.0));
    }
    let slope = g * k.a3 * pr / pc;
    let offset = g * (k.a1 + k.a2) / pc;
    if slope == 0.0 {
        return Ok(semi(gamma_p(m, m * offset)?, 0.0));
    }
    let integral = gamma_expectation(
        m,
        0.0,
        |x| gamma_p(m, m * (slope * x + offset)).unwrap_or(f64::NAN),
        quad,
    )?;
    Ok(semi(
        clamp_probability("outage_comm_tx_integral", integral.value)?,
        integral.error,
    ))
}

/// Outage of the radar target's uplink: either SIC of the transmitter fails
/// (`γ_c < γ_SIC`) or the target's own SINR misses `γ_th`, evaluated as one
/// joint event. Finite series with upper incomplete gamma factors; requires
/// integer `m`.
pub fn outage_radar_comm_closed(k: &DerivedConstants, cfg: &SystemConfig) -> Result<OutageResult> {
    let m = require_integer_m("outage_radar_comm_closed", cfg.m())?;
    let (gs, gt, pc, pr) = (cfg.gamma_sic, cfg.gamma_th, cfg.p_c, cfg.p_r);
    if pc == 0.0 || pr == 0.0 {
        return Ok(closed(1.0));
    }
    let mf = m as f64;
    let a12 = k.a1 + k.a2;
    let c = gs * k.a3 * pr / pc;
    let ln_c = c.ln_1p();
    let exponent = -mf * gs * a12 / pc;
    let tail_start = gt * mf * (k.a4 + k.a5) / pr * (c + 1.0);
    let ln_gamma_m = ln_gamma(mf);
    let ln_scale = (mf * gs / pc).ln();

    let mut success = 0.0;
    for p in 0..m {
        let ln_outer = -ln_gamma(p as f64 + 1.0) + if p == 0 { 0.0 } else { p as f64 * ln_scale };
        for r in 0..=p {
            let shape = (r + m) as f64;
            let ln_term = ln_outer + ln_binomial(p, r) + ln_pow(a12, p - r) + ln_pow(k.a3 * pr, r)
                - ln_gamma_m
                - r as f64 * mf.ln()
                + exponent
                - shape * ln_c
                + ln_upper_inc_gamma(shape, tail_start)?;
            success += ln_term.exp();
        }
    }
    Ok(closed(clamp_probability(
        "outage_radar_comm_closed",
        1.0 - success,
    )?))
}

/// The radar target's outage as `P(m, m x0) + ∫_{x0}^∞ f(x) P(m, y(x)) dx`,
/// where `x0 = γ_th (a4 + a5) / P_r` is the smallest gain that meets `γ_th`
/// and `y(x) = m γ_SIC (a3 P_r x + a1 + a2) / P_c`. Summing the two outage
/// parts directly avoids the cancellation of `1 - success` at high SNR.
pub fn outage_radar_comm_integral(
    k: &DerivedConstants,
    cfg: &SystemConfig,
    quad: &QuadratureSpec,
) -> Result<OutageResult> {
    let (gs, gt, pc, pr, m) = (cfg.gamma_sic, cfg.gamma_th, cfg.p_c, cfg.p_r, cfg.m());
    if pc == 0.0 || pr == 0.0 {
        return Ok(semi(1.0, 0.0));
    }
    let x0 = gt * (k.a4 + k.a5) / pr;
    let head = gamma_p(m, m * x0)?;
    let slope = m * gs * k.a3 * pr / pc;
    let offset = m * gs * (k.a1 + k.a2) / pc;
    let tail = gamma_expectation(
        m,
        x0,
        |x| gamma_p(m, slope * x + offset).unwrap_or(f64::NAN),
        quad,
    )?;
    Ok(semi(
        clamp_probability("outage_radar_comm_integral", head + tail.value)?,
        tail.error,
    ))
}

/// Dispatches on the route; a closed request with non-integer `m` is served
/// by the integral.
pub fn outage_comm_tx(
    k: &DerivedConstants,
    cfg: &SystemConfig,
    route: Route,
    quad: &QuadratureSpec,
) -> Result<OutageResult> {
    match route {
        Route::Closed if cfg.fading.integer_m().is_some() => outage_comm_tx_closed(k, cfg),
        _ => outage_comm_tx_integral(k, cfg, quad),
    }
}

pub fn outage_radar_comm(
    k: &DerivedConstants,
    cfg: &SystemConfig,
    route: Route,
    quad: &QuadratureSpec,
) -> Result<OutageResult> {
    match route {
        Route::Closed if cfg.fading.integer_m().is_some() => outage_radar_comm_closed(k, cfg),
        _ => outage_radar_comm_integral(k, cfg, quad),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::FadingSpec;
    use crate::Error;

    fn tight() -> QuadratureSpec {
        QuadratureSpec::new(1e-12, 1e-300, 2000).unwrap()
    }

    fn config(m: f64, rho_c: f64, rho_r: f64, rho_bs: f64) -> SystemConfig {
        SystemConfig {
            fading: FadingSpec { m },
            ..SystemConfig::default()
        }
        .with_rho_c_db(rho_c)
        .with_rho_r_db(rho_r)
        .with_rho_bs_db(rho_bs)
    }

    fn rel(a: f64, b: f64) -> f64 {
        if a == b {
            0.0
        } else {
            ((a - b) / b).abs()
        }
    }

    #[test]
    fn rayleigh_comm_outage_has_elementary_form() {
        // m = 1: 1 - e^{-γ A / P_c} / (1 + γ a3 P_r / P_c)
        let cfg = config(1.0, 115.0, 110.0, 200.0);
        let k = DerivedConstants::new(&cfg).unwrap();
        let g = cfg.gamma_th;
        let expect =
            1.0 - (-g * (k.a1 + k.a2) / cfg.p_c).exp() / (1.0 + g * k.a3 * cfg.p_r / cfg.p_c);
        let got = outage_comm_tx_closed(&k, &cfg).unwrap().probability;
        assert!(rel(got, expect) < 1e-12, "{got} vs {expect}");
    }

    #[test]
    fn closed_and_integral_agree() {
        for &m in &[1.0, 2.0, 3.0] {
            for &(rc, rr, rb) in &[
                (110.0, 105.0, 200.0),
                (125.0, 112.0, 230.0),
                (140.0, 120.0, 150.0),
            ] {
                let cfg = config(m, rc, rr, rb);
                let k = DerivedConstants::new(&cfg).unwrap();
                let a = outage_comm_tx_closed(&k, &cfg).unwrap().probability;
                let b = outage_comm_tx_integral(&k, &cfg, &tight())
                    .unwrap()
                    .probability;
                assert!(rel(a, b) < 1e-8, "m={m} rc={rc}: {a} vs {b}");
                let a = outage_radar_comm_closed(&k, &cfg).unwrap().probability;
                let b = outage_radar_comm_integral(&k, &cfg, &tight())
                    .unwrap()
                    .probability;
                assert!(rel(a, b) < 1e-8, "m={m} rc={rc}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn zero_threshold_and_zero_power_limits() {
        let cfg = SystemConfig {
            gamma_th: 0.0,
            gamma_sic: 0.0,
            ..config(3.0, 120.0, 110.0, 200.0)
        };
        let k = DerivedConstants::new(&cfg).unwrap();
        assert_eq!(outage_comm_tx_closed(&k, &cfg).unwrap().probability, 0.0);
        assert!(outage_radar_comm_closed(&k, &cfg).unwrap().probability < 1e-15);

        let silent = SystemConfig {
            p_c: 0.0,
            ..config(3.0, 0.0, 110.0, 200.0)
        };
        let k = DerivedConstants::new(&silent).unwrap();
        assert_eq!(outage_comm_tx_closed(&k, &silent).unwrap().probability, 1.0);
    }

    #[test]
    fn no_target_uplink_factorizes() {
        let cfg = SystemConfig {
            p_r: 0.0,
            ..config(3.0, 120.0, 0.0, 200.0)
        };
        let k = DerivedConstants::new(&cfg).unwrap();
        let expect = gamma_p(3.0, 3.0 * cfg.gamma_th * (k.a1 + k.a2) / cfg.p_c).unwrap();
        let got = outage_comm_tx_integral(&k, &cfg, &tight())
            .unwrap()
            .probability;
        assert_eq!(got, expect);
    }

    #[test]
    fn non_integer_shape() {
        let cfg = config(2.5, 120.0, 110.0, 200.0);
        let k = DerivedConstants::new(&cfg).unwrap();
        assert!(matches!(
            outage_comm_tx_closed(&k, &cfg),
            Err(Error::Precondition { .. })
        ));
        let r = outage_comm_tx(&k, &cfg, Route::Closed, &tight()).unwrap();
        assert_eq!(r.method, OutageMethod::SemiIntegral);
        let lo = outage_comm_tx_integral(&k, &config(2.0, 120.0, 110.0, 200.0), &tight()).unwrap();
        let hi = outage_comm_tx_integral(&k, &config(3.0, 120.0, 110.0, 200.0), &tight()).unwrap();
        let (a, b) = (
            lo.probability.min(hi.probability),
            lo.probability.max(hi.probability),
        );
        assert!(r.probability > 0.5 * a && r.probability < 2.0 * b);
    }

    #[test]
    fn low_snr_is_certain_outage() {
        let cfg = config(3.0, 0.0, 0.0, 0.0);
        let k = DerivedConstants::new(&cfg).unwrap();
        assert_eq!(outage_comm_tx_closed(&k, &cfg).unwrap().probability, 1.0);
        assert_eq!(outage_radar_comm_closed(&k, &cfg).unwrap().probability, 1.0);
        assert_eq!(
            outage_radar_comm_integral(&k, &cfg, &tight())
                .unwrap()
                .probability,
            1.0
        );
    }
}
