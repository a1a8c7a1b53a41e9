//! Small-scale fading (unit-mean Nakagami-m power gains and the cascaded
//! radar gain) and the two large-scale path-loss laws.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::specfun::{self, QuadratureSpec};
use crate::{Error, Result};

/// Speed of light used for the carrier wavelength, m/s.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Reference distance of both path-loss laws, m.
pub const REFERENCE_DISTANCE: f64 = 1.0;

/// Nakagami-m fading with unit mean power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingSpec {
    pub m: f64,
}

impl Default for FadingSpec {
    fn default() -> Self {
        Self { m: 3.0 }
    }
}

impl FadingSpec {
    pub const MEAN_POWER: f64 = 1.0;

    pub fn new(m: f64) -> Result<Self> {
        let spec = Self { m };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m >= 0.5) || !self.m.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "Nakagami shape m = {} must be >= 0.5",
                self.m
            )));
        }
        Ok(())
    }

    /// The integer value of `m`, if it is one.
    pub fn integer_m(&self) -> Option<u32> {
        (self.m.fract() == 0.0 && self.m >= 1.0 && self.m <= u32::MAX as f64)
            .then_some(self.m as u32)
    }

    pub fn sampler(&self) -> PowerGainSampler {
        PowerGainSampler::new(*self)
    }
}

/// Draws `|h|^2 ~ Gamma(shape m, rate m)`.
#[derive(Debug, Clone, Copy)]
pub struct PowerGainSampler {
    gamma: Gamma<f64>,
}

impl PowerGainSampler {
    pub fn new(spec: FadingSpec) -> Self {
        let gamma = Gamma::new(spec.m, 1.0 / spec.m).expect("validated Nakagami shape");
        Self { gamma }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.gamma.sample(rng)
    }
}

/// One draw of a unit-mean power gain.
pub fn sample_power_gain<R: Rng + ?Sized>(spec: &FadingSpec, rng: &mut R) -> f64 {
    spec.sampler().sample(rng)
}

fn check_density_args(function: &'static str, m: f64, x: f64) -> Result<()> {
    if !(m > 0.0) {
        return Err(Error::domain(function, format!("m = {m} must be > 0")));
    }
    if !(x >= 0.0) {
        return Err(Error::domain(function, format!("x = {x} must be >= 0")));
    }
    Ok(())
}

/// `f(x) = m^m / Γ(m) x^{m-1} e^{-mx}`.
pub fn pdf_power_gain(m: f64, x: f64) -> Result<f64> {
    check_density_args("pdf_power_gain", m, x)?;
    if x == 0.0 {
        return Ok(match m.partial_cmp(&1.0) {
            Some(std::cmp::Ordering::Less) => f64::INFINITY,
            Some(std::cmp::Ordering::Equal) => 1.0,
            _ => 0.0,
        });
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok((m * m.ln() - specfun::ln_gamma(m) + (m - 1.0) * x.ln() - m * x).exp())
}

/// `F(x) = γ(m, mx) / Γ(m)`.
pub fn cdf_power_gain(m: f64, x: f64) -> Result<f64> {
    check_density_args("cdf_power_gain", m, x)?;
    specfun::gamma_p(m, m * x)
}

/// Density of the cascaded radar gain `|h_{r,d}|^2 |h_{r,u}|^2`.
pub fn pdf_equivalent(m: f64, z: f64) -> Result<f64> {
    specfun::pdf_product_gamma(m, z)
}

/// CDF of the cascaded radar gain.
pub fn cdf_equivalent(m: f64, z: f64, quad: &QuadratureSpec) -> Result<f64> {
    specfun::cdf_product_gamma(m, z, quad)
}

/// Survival function of the cascaded radar gain.
pub fn sf_equivalent(m: f64, z: f64, quad: &QuadratureSpec) -> Result<f64> {
    specfun::sf_product_gamma(m, z, quad)
}

/// Large-scale propagation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossParams {
    /// Communication path-loss exponent.
    pub alpha_c: f64,
    /// Radar (round-trip) path-loss exponent.
    pub alpha_r: f64,
    /// Carrier frequency, Hz.
    pub f_c: f64,
    /// Radar cross section, m^2.
    pub sigma_rcs: f64,
}

impl Default for PathLossParams {
    fn default() -> Self {
        Self {
            alpha_c: 2.5,
            alpha_r: 4.5,
            f_c: 1.0e9,
            sigma_rcs: 0.1,
        }
    }
}

impl PathLossParams {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("alpha_c", self.alpha_c),
            ("alpha_r", self.alpha_r),
            ("f_c", self.f_c),
            ("sigma_rcs", self.sigma_rcs),
        ];
        for (name, v) in checks {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} = {v} must be > 0")));
            }
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.f_c
    }

    /// Communication intercept `C_c = (c / (4π f_c))^2`.
    pub fn c_c(&self) -> f64 {
        (SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * self.f_c)).powi(2)
    }

    /// Radar intercept `C_r = σ_RCS λ^2 / (4π)^3`.
    pub fn c_r(&self) -> f64 {
        self.sigma_rcs * self.wavelength().powi(2) / (4.0 * std::f64::consts::PI).powi(3)
    }
}

fn check_distance(function: &'static str, d: f64) -> Result<()> {
    if !(d >= REFERENCE_DISTANCE) || !d.is_finite() {
        return Err(Error::domain(
            function,
            format!("distance {d} m is below the 1 m reference distance"),
        ));
    }
    Ok(())
}

/// `C_c d^{-α_c}`.
pub fn path_loss_comm(d: f64, p: &PathLossParams) -> Result<f64> {
    check_distance("path_loss_comm", d)?;
    Ok(p.c_c() * d.powf(-p.alpha_c))
}

/// `C_r d^{-α_r}`.
pub fn path_loss_radar(d: f64, p: &PathLossParams) -> Result<f64> {
    check_distance("path_loss_radar", d)?;
    Ok(p.c_r() * d.powf(-p.alpha_r))
}
