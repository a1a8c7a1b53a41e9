//! Deployment parameters, derived constants and instantaneous SINRs.
//!
//! The base station decodes in a fixed order: the near communication
//! transmitter first (everything else is interference), then the far radar
//! target's uplink after SIC, and the radar echo last with both
//! communication signals removed. The echo that survives range-prediction
//! subtraction carries residual energy `E_TD = γ² β² B² σ_τ²`.

use serde::{Deserialize, Serialize};

use crate::channel::{path_loss_comm, path_loss_radar, FadingSpec, PathLossParams};
use crate::{Error, Result};

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Spectral-shape factor `γ² = (2π)² / 12` of a flat spectrum.
pub const FLAT_SPECTRUM_GAMMA2: f64 = 4.0 * std::f64::consts::PI * std::f64::consts::PI / 12.0;

/// All physical and protocol parameters of one deployment, in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Communication transmitter power, W.
    pub p_c: f64,
    /// Radar target uplink power, W.
    pub p_r: f64,
    /// Base-station radar power, W.
    pub p_bs: f64,
    /// Distance of the communication transmitter, m.
    pub d_c: f64,
    /// Distance of the radar target, m.
    pub d_r: f64,
    /// Fraction of the band shared by sensing and communication.
    pub beta_semi: f64,
    /// Total bandwidth B, Hz.
    pub bandwidth_b: f64,
    /// Receiver temperature, K.
    pub t_temp: f64,
    /// Standard deviation of the time-delay fluctuation, s.
    pub sigma_tau: f64,
    /// Decoding SINR threshold.
    pub gamma_th: f64,
    /// SIC SINR threshold.
    pub gamma_sic: f64,
    /// Radar duty factor.
    pub delta_duty: f64,
    /// Radar pulse duration T, s.
    pub t_pulse: f64,
    /// Communication link gain (multiplies the communication path loss).
    pub g_c: f64,
    /// Radar link gain (multiplies the radar path loss).
    pub g_r: f64,
    pub fading: FadingSpec,
    pub pathloss: PathLossParams,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            p_c: 1.0,
            p_r: 1.0,
            p_bs: 10.0,
            d_c: 800.0,
            d_r: 1300.0,
            beta_semi: 0.5,
            bandwidth_b: 10.0e6,
            t_temp: 724.0,
            sigma_tau: 10.0e-9,
            gamma_th: 1.0,
            gamma_sic: 0.4,
            delta_duty: 0.01,
            t_pulse: 1.0e-6,
            g_c: 1.0,
            g_r: 1.0,
            fading: FadingSpec::default(),
            pathloss: PathLossParams::default(),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidConfig(format!("{name} = {v} must be > 0")));
    }
    Ok(())
}

fn nonnegative(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(Error::InvalidConfig(format!("{name} = {v} must be >= 0")));
    }
    Ok(())
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        nonnegative("p_c", self.p_c)?;
        nonnegative("p_r", self.p_r)?;
        nonnegative("p_bs", self.p_bs)?;
        for (name, d) in [("d_c", self.d_c), ("d_r", self.d_r)] {
            if !(d >= 1.0) || !d.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "{name} = {d} m must be >= 1 m (reference distance)"
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.beta_semi) {
            return Err(Error::InvalidConfig(format!(
                "beta_semi = {} must lie in [0, 1]",
                self.beta_semi
            )));
        }
        positive("bandwidth_b", self.bandwidth_b)?;
        positive("t_temp", self.t_temp)?;
        nonnegative("sigma_tau", self.sigma_tau)?;
        nonnegative("gamma_th", self.gamma_th)?;
        nonnegative("gamma_sic", self.gamma_sic)?;
        if self.gamma_sic > self.gamma_th {
            return Err(Error::InvalidConfig(format!(
                "gamma_sic = {} must not exceed gamma_th = {}",
                self.gamma_sic, self.gamma_th
            )));
        }
        if !(self.delta_duty > 0.0 && self.delta_duty <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "delta_duty = {} must lie in (0, 1]",
                self.delta_duty
            )));
        }
        positive("t_pulse", self.t_pulse)?;
        positive("g_c", self.g_c)?;
        positive("g_r", self.g_r)?;
        self.fading.validate()?;
        self.pathloss.validate()
    }

    /// `σ² = k_B T_temp B`.
    pub fn noise_power(&self) -> f64 {
        BOLTZMANN * self.t_temp * self.bandwidth_b
    }

    /// Power, in W, that corresponds to a transmit SNR `P / σ²` given in dB.
    pub fn power_from_rho_db(&self, rho_db: f64) -> f64 {
        self.noise_power() * 10f64.powf(rho_db / 10.0)
    }

    pub fn rho_db(&self, power: f64) -> f64 {
        10.0 * (power / self.noise_power()).log10()
    }

    pub fn with_rho_c_db(mut self, rho_db: f64) -> Self {
        self.p_c = self.power_from_rho_db(rho_db);
        self
    }

    pub fn with_rho_r_db(mut self, rho_db: f64) -> Self {
        self.p_r = self.power_from_rho_db(rho_db);
        self
    }

    pub fn with_rho_bs_db(mut self, rho_db: f64) -> Self {
        self.p_bs = self.power_from_rho_db(rho_db);
        self
    }

    pub fn m(&self) -> f64 {
        self.fading.m
    }
}

/// `σ² = k_B T_temp B`.
pub fn noise_power(bandwidth_b: f64, t_temp: f64) -> Result<f64> {
    nonnegative("bandwidth_b", bandwidth_b)?;
    nonnegative("t_temp", t_temp)?;
    Ok(BOLTZMANN * t_temp * bandwidth_b)
}

/// Residual echo energy after predicted-range subtraction,
/// `E_TD = γ² β² B² σ_τ²` for a flat spectrum.
pub fn time_delay_energy(beta_semi: f64, bandwidth_b: f64, sigma_tau: f64) -> f64 {
    FLAT_SPECTRUM_GAMMA2 * beta_semi.powi(2) * bandwidth_b.powi(2) * sigma_tau.powi(2)
}

/// Constants that appear throughout the closed-form expressions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedConstants {
    pub c_c: f64,
    pub c_r: f64,
    pub sigma2: f64,
    pub gamma2: f64,
    pub e_td: f64,
    /// Mean radar interference normalised by the transmitter's path loss.
    pub a1: f64,
    /// Noise normalised by the transmitter's path loss.
    pub a2: f64,
    /// Path-loss ratio of the target and the transmitter, `d_r^{-α_c} / d_c^{-α_c}`.
    pub a3: f64,
    /// Mean radar interference normalised by the target's path loss.
    pub a4: f64,
    /// Noise normalised by the target's path loss.
    pub a5: f64,
    /// Echo SNR scale: `2 T β B P_BS G_r C_r E_TD / σ²`, so that the
    /// processed echo SNR is `ξ d_r^{-α_r} |h_{r,d}|² |h_{r,u}|²`.
    pub xi_r1: f64,
}

impl DerivedConstants {
    pub fn new(cfg: &SystemConfig) -> Result<Self> {
        cfg.validate()?;
        derive_constants(cfg)
    }
}

pub fn derive_constants(cfg: &SystemConfig) -> Result<DerivedConstants> {
    let pl = &cfg.pathloss;
    let c_c = pl.c_c();
    let c_r = pl.c_r();
    let sigma2 = cfg.noise_power();
    let gamma2 = FLAT_SPECTRUM_GAMMA2;
    let e_td = time_delay_energy(cfg.beta_semi, cfg.bandwidth_b, cfg.sigma_tau);

    let radar = cfg.p_bs * cfg.g_r * c_r * cfg.d_r.powf(-pl.alpha_r) * e_td;
    let comm_c = cfg.g_c * c_c * cfg.d_c.powf(-pl.alpha_c);
    let comm_r = cfg.g_c * c_c * cfg.d_r.powf(-pl.alpha_c);
    if !(comm_c > 0.0 && comm_r > 0.0) {
        return Err(Error::InvalidConfig(
            "communication path loss underflows to zero".into(),
        ));
    }

    Ok(DerivedConstants {
        c_c,
        c_r,
        sigma2,
        gamma2,
        e_td,
        a1: radar / comm_c,
        a2: sigma2 / comm_c,
        a3: cfg.d_r.powf(-pl.alpha_c) / cfg.d_c.powf(-pl.alpha_c),
        a4: radar / comm_r,
        a5: sigma2 / comm_r,
        xi_r1: 2.0
            * cfg.t_pulse
            * cfg.beta_semi
            * cfg.bandwidth_b
            * cfg.p_bs
            * cfg.g_r
            * c_r
            * e_td
            / sigma2,
    })
}

/// Expected radar interference `E[I_R] = P_BS G_r ℙ_r(d_r) E_TD`; the
/// unit-mean fading gains average out.
pub fn mean_radar_interference(cfg: &SystemConfig) -> Result<f64> {
    let e_td = time_delay_energy(cfg.beta_semi, cfg.bandwidth_b, cfg.sigma_tau);
    Ok(cfg.p_bs * path_loss_radar(cfg.d_r, &cfg.pathloss)? * e_td * cfg.g_r)
}

/// How the echo interference enters the communication SINRs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterferenceMode {
    /// The realized `P_BS ℙ_r g_rd g_ru E_TD`.
    Instantaneous,
    /// Its expectation over the fading.
    Mean,
}

impl std::fmt::Display for InterferenceMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            InterferenceMode::Instantaneous => "instantaneous",
            InterferenceMode::Mean => "mean",
        })
    }
}

impl std::str::FromStr for InterferenceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "instantaneous" => Ok(InterferenceMode::Instantaneous),
            "mean" => Ok(InterferenceMode::Mean),
            other => Err(Error::InvalidConfig(format!(
                "unknown interference mode '{other}' (expected mean or instantaneous)"
            ))),
        }
    }
}

/// One joint draw of the four small-scale power gains.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChannelRealization {
    /// Communication transmitter uplink, `|h_c|²`.
    pub g_c_link: f64,
    /// Radar target uplink, `|h_r|²`.
    pub g_r_link: f64,
    /// BS to target radar path, `|h_{r,d}|²`.
    pub g_rd: f64,
    /// Target to BS echo path, `|h_{r,u}|²`.
    pub g_ru: f64,
}

impl ChannelRealization {
    pub fn unit() -> Self {
        Self {
            g_c_link: 1.0,
            g_r_link: 1.0,
            g_rd: 1.0,
            g_ru: 1.0,
        }
    }

    pub fn cascaded_radar(&self) -> f64 {
        self.g_rd * self.g_ru
    }
}

/// Mean received powers at the base station, before small-scale fading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// `P_c G_c ℙ_c(d_c)`.
    pub comm_tx: f64,
    /// `P_r G_c ℙ_c(d_r)`.
    pub radar_uplink: f64,
    /// `P_BS G_r ℙ_r(d_r) E_TD`.
    pub echo: f64,
    pub noise: f64,
    /// `2 T β B`, the time-bandwidth gain applied to the echo SNR.
    pub echo_processing_gain: f64,
    /// `δ / (2T)`, s⁻¹.
    pub rate_prefactor: f64,
}

impl LinkBudget {
    pub fn new(cfg: &SystemConfig) -> Result<Self> {
        cfg.validate()?;
        let pl = &cfg.pathloss;
        Ok(Self {
            comm_tx: cfg.p_c * cfg.g_c * path_loss_comm(cfg.d_c, pl)?,
            radar_uplink: cfg.p_r * cfg.g_c * path_loss_comm(cfg.d_r, pl)?,
            echo: mean_radar_interference(cfg)?,
            noise: cfg.noise_power(),
            echo_processing_gain: 2.0 * cfg.t_pulse * cfg.beta_semi * cfg.bandwidth_b,
            rate_prefactor: cfg.delta_duty / (2.0 * cfg.t_pulse),
        })
    }

    #[inline]
    fn interference(&self, r: &ChannelRealization, mode: InterferenceMode) -> f64 {
        match mode {
            InterferenceMode::Instantaneous => self.echo * r.g_rd * r.g_ru,
            InterferenceMode::Mean => self.echo,
        }
    }
}

/// SINR of the communication transmitter, decoded first.
#[inline]
pub fn sinr_comm_tx(r: &ChannelRealization, lb: &LinkBudget, mode: InterferenceMode) -> f64 {
    lb.comm_tx * r.g_c_link / (lb.radar_uplink * r.g_r_link + lb.interference(r, mode) + lb.noise)
}

/// SINR of the radar target's uplink after the transmitter is cancelled.
#[inline]
pub fn sinr_radar_comm(r: &ChannelRealization, lb: &LinkBudget, mode: InterferenceMode) -> f64 {
    lb.radar_uplink * r.g_r_link / (lb.interference(r, mode) + lb.noise)
}

/// SNR of the radar echo once both communication signals are cancelled.
#[inline]
pub fn snr_radar_echo(r: &ChannelRealization, lb: &LinkBudget) -> f64 {
    lb.echo * r.g_rd * r.g_ru / lb.noise
}
