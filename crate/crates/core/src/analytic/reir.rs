use std::f64::consts::LN_2;

use super::{gamma_expectation, require_integer_m, ReirMethod, ReirResult, Route};
use crate::linkbudget::{DerivedConstants, SystemConfig};
use crate::specfun::{
    bessel_k0, expint_en_scaled, integrate, integrate_to_infinity, sf_product_gamma, QuadratureSpec,
};
use crate::{Error, Result};

/// Instantaneous REIR bound `δ/(2T) log2(1 + 2TβB γ_echo)` in bits/s.
///
/// `echo_snr` must be non-negative.
pub fn reir_instant(echo_snr: f64, cfg: &SystemConfig) -> f64 {
    let gain = 2.0 * cfg.t_pulse * cfg.beta_semi * cfg.bandwidth_b;
    cfg.delta_duty / (2.0 * cfg.t_pulse) * (gain * echo_snr).ln_1p() / LN_2
}

// The ergodic REIR is δ/(2T ln 2) E[ln(1 + aZ)] with Z the cascaded gain and
// a = Ξ d_r^{-α_r}.
fn echo_scale(cfg: &SystemConfig) -> Result<f64> {
    let k = DerivedConstants::new(cfg)?;
    Ok(k.xi_r1 * cfg.d_r.powf(-cfg.pathloss.alpha_r))
}

fn prefactor(cfg: &SystemConfig) -> f64 {
    cfg.delta_duty / (2.0 * cfg.t_pulse * LN_2)
}

fn zero(method: ReirMethod) -> ReirResult {
    ReirResult {
        rate: 0.0,
        method,
        error_estimate: 0.0,
    }
}

// Integrals below are normalised by ln(1 + a), the order of magnitude of
// E[ln(1 + aZ)], so that tolerances act relative to the answer whether a is
// 1e-20 or 1e20.
fn finish(
    cfg: &SystemConfig,
    scale: f64,
    value: f64,
    error: f64,
    method: ReirMethod,
) -> ReirResult {
    let c = prefactor(cfg) * scale;
    ReirResult {
        rate: (c * value).max(0.0),
        method,
        error_estimate: c * error,
    }
}

/// Smallest `y` (to within a factor 1.01) with `Pr{Z > y} < threshold`.
fn survival_cutoff(m: f64, threshold: f64, quad: &QuadratureSpec) -> Result<f64> {
    let mut hi = 1.0;
    let mut doublings = 0;
    while sf_product_gamma(m, hi, quad)? >= threshold {
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::precondition(
                "ergodic_reir_quadrature",
                "survival function does not decay",
            ));
        }
    }
    let mut lo = hi / 2.0;
    while hi / lo > 1.01 {
        let mid = (lo * hi).sqrt();
        if sf_product_gamma(m, mid, quad)? >= threshold {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Ergodic REIR from the survival function of the cascaded gain:
/// `δ/(2T ln2) ∫_0^∞ 1/(1+z) Pr{Z > z d_r^{α_r} / Ξ} dz`, for any real `m`.
///
/// Integrated over `ln z`. The range is cut below at `1e-15 min(1, a)` and
/// above where the survival function drops under `1e-3` of the relative
/// tolerance.
pub fn ergodic_reir_quadrature(cfg: &SystemConfig, quad: &QuadratureSpec) -> Result<ReirResult> {
    let a = echo_scale(cfg)?;
    if a == 0.0 {
        return Ok(zero(ReirMethod::Quadrature));
    }
    let m = cfg.m();
    let inner = quad.tightened(0.1);
    let threshold = (quad.relative_tolerance * 1e-3).max(1e-290);
    let y_hi = survival_cutoff(m, threshold, &inner)?;
    let scale = a.ln_1p();

    let s_lo = (1e-15 * a.min(1.0)).ln();
    let s_hi = (a * y_hi).ln();
    let r = integrate(
        |s: f64| {
            let z = s.exp();
            let sf = sf_product_gamma(m, z / a, &inner).unwrap_or(f64::NAN);
            z / (1.0 + z) * sf / scale
        },
        s_lo,
        s_hi,
        quad,
    )?;
    Ok(finish(cfg, scale, r.value, r.error, ReirMethod::Quadrature))
}

/// Ergodic REIR for integer `m`: averaging over one of the two gains in
/// closed form leaves `Σ_{k<m} e^μ E_{k+1}(μ)`, `μ = m / (a x)`, which is
/// integrated against the density of the other gain.
pub fn ergodic_reir_integer_m(cfg: &SystemConfig, quad: &QuadratureSpec) -> Result<ReirResult> {
    let m = require_integer_m("ergodic_reir_integer_m", cfg.m())?;
    let a = echo_scale(cfg)?;
    if a == 0.0 {
        return Ok(zero(ReirMethod::IntegerM));
    }
    let mf = m as f64;
    let scale = a.ln_1p();
    let r = gamma_expectation(
        mf,
        0.0,
        |x| {
            let mu = mf / (a * x);
            (1..=m)
                .map(|n| expint_en_scaled(n, mu).unwrap_or(f64::NAN))
                .sum::<f64>()
                / scale
        },
        quad,
    )?;
    Ok(finish(cfg, scale, r.value, r.error, ReirMethod::IntegerM))
}

/// Ergodic REIR under Rayleigh fading (`m = 1`), where the cascaded gain
/// has density `2 K0(2√z)`: `E[ln(1 + aZ)] = ∫_0^∞ ln(1 + a u²) 4u K0(2u) du`.
pub fn ergodic_reir_rayleigh(cfg: &SystemConfig, quad: &QuadratureSpec) -> Result<ReirResult> {
    if cfg.m() != 1.0 {
        return Err(Error::precondition(
            "ergodic_reir_rayleigh",
            format!("requires m = 1, got m = {}", cfg.m()),
        ));
    }
    let a = echo_scale(cfg)?;
    if a == 0.0 {
        return Ok(zero(ReirMethod::RayleighClosed));
    }
    let scale = a.ln_1p();
    let r = integrate_to_infinity(
        |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            let k0 = bessel_k0(2.0 * u).unwrap_or(f64::NAN);
            if k0 == 0.0 {
                return 0.0;
            }
            (a * u * u).ln_1p() * 4.0 * u * k0 / scale
        },
        0.0,
        quad,
    )?;
    Ok(finish(
        cfg,
        scale,
        r.value,
        r.error,
        ReirMethod::RayleighClosed,
    ))
}

/// Dispatches on the route. The closed route uses the Rayleigh form at
/// `m = 1`, the integer-`m` form otherwise, and the survival-function
/// integral for non-integer `m`.
pub fn ergodic_reir(cfg: &SystemConfig, route: Route, quad: &QuadratureSpec) -> Result<ReirResult> {
    match (route, cfg.fading.integer_m()) {
        (Route::Closed, Some(1)) => ergodic_reir_rayleigh(cfg, quad),
        (Route::Closed, Some(_)) => ergodic_reir_integer_m(cfg, quad),
        _ => ergodic_reir_quadrature(cfg, quad),
    }
}

/// Least-squares slope of the ergodic REIR against `log2(P_BS)` over the
/// top decade of an ascending grid of base-station powers spanning at least
/// three decades. Tends to `δ / (2T)` as the echo SNR grows.
pub fn diversity_slope(
    cfg: &SystemConfig,
    p_bs_grid: &[f64],
    quad: &QuadratureSpec,
) -> Result<f64> {
    if p_bs_grid.iter().any(|p| !(*p > 0.0) || !p.is_finite())
        || p_bs_grid.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::precondition(
            "diversity_slope",
            "grid must be positive, finite and strictly ascending",
        ));
    }
    let (first, last) = match (p_bs_grid.first(), p_bs_grid.last()) {
        (Some(f), Some(l)) => (*f, *l),
        _ => return Err(Error::precondition("diversity_slope", "empty grid")),
    };
    if last / first < 1e3 * (1.0 - 1e-12) {
        return Err(Error::precondition(
            "diversity_slope",
            format!(
                "grid spans {:.2} decades, need at least 3",
                (last / first).log10()
            ),
        ));
    }
    let top: Vec<f64> = p_bs_grid
        .iter()
        .copied()
        .filter(|p| *p >= last / 10.0 * (1.0 - 1e-12))
        .collect();
    if top.len() < 2 {
        return Err(Error::precondition(
            "diversity_slope",
            "need at least two grid points in the top decade",
        ));
    }

    let eval = |p: &f64| -> Result<(f64, f64)> {
        let c = SystemConfig { p_bs: *p, ..*cfg };
        Ok((p.log2(), ergodic_reir_quadrature(&c, quad)?.rate))
    };
    #[cfg(feature = "parallel")]
    let points: Vec<(f64, f64)> = {
        use rayon::prelude::*;
        top.par_iter().map(eval).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let points: Vec<(f64, f64)> = top.iter().map(eval).collect::<Result<_>>()?;

    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::FadingSpec;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn config(m: f64, rho_bs: f64) -> SystemConfig {
        SystemConfig {
            fading: FadingSpec { m },
            ..SystemConfig::default()
        }
        .with_rho_bs_db(rho_bs)
    }

    #[test]
    fn instant_rate_arithmetic() {
        let cfg = SystemConfig {
            beta_semi: 1.0,
            ..SystemConfig::default()
        };
        assert_eq!(reir_instant(0.0, &cfg), 0.0);
        for &s in &[1e-3_f64, 0.5, 7.0] {
            let expect = 5000.0 * (1.0 + 20.0 * s).log2();
            assert!(rel(reir_instant(s, &cfg), expect) < 1e-14);
        }
        let doubled = SystemConfig {
            delta_duty: 0.02,
            ..cfg
        };
        assert!(rel(reir_instant(0.3, &doubled), 2.0 * reir_instant(0.3, &cfg)) < 1e-15);
    }

    #[test]
    fn three_routes_agree() {
        let q = QuadratureSpec::new(1e-10, 1e-300, 1000).unwrap();
        for &rho in &[150.0, 200.0, 240.0] {
            let c1 = config(1.0, rho);
            let t = ergodic_reir_quadrature(&c1, &q).unwrap().rate;
            let r = ergodic_reir_rayleigh(&c1, &q).unwrap().rate;
            let i = ergodic_reir_integer_m(&c1, &q).unwrap().rate;
            assert!(rel(r, t) < 1e-7, "rho={rho}: {r} vs {t}");
            assert!(rel(i, t) < 1e-7, "rho={rho}: {i} vs {t}");

            let c3 = config(3.0, rho);
            let t = ergodic_reir_quadrature(&c3, &q).unwrap().rate;
            let i = ergodic_reir_integer_m(&c3, &q).unwrap().rate;
            assert!(rel(i, t) < 1e-7, "rho={rho}: {i} vs {t}");
        }
    }

    #[test]
    fn small_scale_limit_is_linear() {
        // ln(1 + aZ) ≈ aZ and E[Z] = 1
        let cfg = config(1.0, 40.0);
        let a = echo_scale(&cfg).unwrap();
        let r = ergodic_reir_rayleigh(&cfg, &QuadratureSpec::default())
            .unwrap()
            .rate;
        assert!(rel(r, prefactor(&cfg) * a) < 1e-8);
    }

    #[test]
    fn vanishes_without_radar_power() {
        let cfg = SystemConfig {
            p_bs: 0.0,
            fading: FadingSpec { m: 1.0 },
            ..SystemConfig::default()
        };
        let q = QuadratureSpec::default();
        assert_eq!(ergodic_reir_quadrature(&cfg, &q).unwrap().rate, 0.0);
        assert_eq!(ergodic_reir_integer_m(&cfg, &q).unwrap().rate, 0.0);
        assert_eq!(ergodic_reir_rayleigh(&cfg, &q).unwrap().rate, 0.0);
    }

    #[test]
    fn rayleigh_route_rejects_other_shapes() {
        assert!(ergodic_reir_rayleigh(&config(3.0, 100.0), &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn slope_approaches_prelog() {
        let cfg = SystemConfig::default();
        let grid: Vec<f64> = (0..=10)
            .map(|i| cfg.power_from_rho_db(260.0 + 4.0 * i as f64))
            .collect();
        let s = diversity_slope(&cfg, &grid, &QuadratureSpec::default()).unwrap();
        let target = cfg.delta_duty / (2.0 * cfg.t_pulse);
        assert!(rel(s, target) < 0.05, "{s} vs {target}");
    }

    #[test]
    fn slope_needs_three_decades() {
        let cfg = SystemConfig::default();
        let err = diversity_slope(&cfg, &[1.0, 10.0, 100.0], &QuadratureSpec::default());
        assert!(err.is_err());
    }
}
