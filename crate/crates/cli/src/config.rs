//! Flat JSON configuration files.
//!
//! Every key is optional and in SI units. Transmit powers may be given in
//! watts (`p_c`, `p_r`, `p_bs`) or as transmit SNR in dB (`rho_c_db`,
//! `rho_r_db`, `rho_bs_db`), never both for the same node.

use std::path::Path;

use serde_json::{Map, Value};

use semi_isac_core::SystemConfig;

use crate::CliError;

/// Keys that set one field directly, in application order.
pub const FIELD_KEYS: &[&str] = &[
    "p_c",
    "p_r",
    "p_bs",
    "d_c",
    "d_r",
    "beta_semi",
    "bandwidth_b",
    "t_temp",
    "sigma_tau",
    "gamma_th",
    "gamma_sic",
    "delta_duty",
    "t_pulse",
    "g_c",
    "g_r",
    "m",
    "alpha_c",
    "alpha_r",
    "f_c",
    "sigma_rcs",
];

/// Power keys in dB, applied after the noise power is known.
pub const RHO_KEYS: &[(&str, &str)] = &[
    ("rho_c_db", "p_c"),
    ("rho_r_db", "p_r"),
    ("rho_bs_db", "p_bs"),
];

/// Sets one key on `cfg`. `rho_*_db` keys use the noise power of `cfg` as it
/// stands, so they must be applied after `bandwidth_b` and `t_temp`.
pub fn set_key(cfg: &mut SystemConfig, key: &str, v: f64) -> Result<(), CliError> {
    match key {
        "p_c" => cfg.p_c = v,
        "p_r" => cfg.p_r = v,
        "p_bs" => cfg.p_bs = v,
        "rho_c_db" => cfg.p_c = cfg.power_from_rho_db(v),
        "rho_r_db" => cfg.p_r = cfg.power_from_rho_db(v),
        "rho_bs_db" => cfg.p_bs = cfg.power_from_rho_db(v),
        "d_c" => cfg.d_c = v,
        "d_r" => cfg.d_r = v,
        "beta_semi" => cfg.beta_semi = v,
        "bandwidth_b" => cfg.bandwidth_b = v,
        "t_temp" => cfg.t_temp = v,
        "sigma_tau" => cfg.sigma_tau = v,
        "gamma_th" => cfg.gamma_th = v,
        "gamma_sic" => cfg.gamma_sic = v,
        "delta_duty" => cfg.delta_duty = v,
        "t_pulse" => cfg.t_pulse = v,
        "g_c" => cfg.g_c = v,
        "g_r" => cfg.g_r = v,
        "m" => cfg.fading.m = v,
        "alpha_c" => cfg.pathloss.alpha_c = v,
        "alpha_r" => cfg.pathloss.alpha_r = v,
        "f_c" => cfg.pathloss.f_c = v,
        "sigma_rcs" => cfg.pathloss.sigma_rcs = v,
        other => {
            return Err(CliError::Config(format!(
                "unknown key '{other}'; valid keys are {}, {}",
                FIELD_KEYS.join(", "),
                RHO_KEYS.iter().map(|k| k.0).collect::<Vec<_>>().join(", ")
            )))
        }
    }
    Ok(())
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<SystemConfig, CliError> {
    let map: Map<String, Value> = if text.trim().is_empty() {
        Map::new()
    } else {
        serde_json::from_str(text).map_err(|e| {
            CliError::Config(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?
    };

    let mut numbers = Vec::with_capacity(map.len());
    for (key, value) in &map {
        let known = FIELD_KEYS.contains(&key.as_str()) || RHO_KEYS.iter().any(|k| k.0 == key);
        if !known {
            // set_key produces the message listing valid keys
            set_key(&mut SystemConfig::default(), key, 0.0)?;
        }
        let v = value.as_f64().ok_or_else(|| {
            CliError::Config(format!("key '{key}': expected a number, got {value}"))
        })?;
        numbers.push((key.as_str(), v));
    }
    for (rho, watts) in RHO_KEYS {
        if map.contains_key(*rho) && map.contains_key(*watts) {
            return Err(CliError::Config(format!(
                "both '{watts}' and '{rho}' are set; give the power one way only"
            )));
        }
    }

    let mut cfg = SystemConfig::default();
    for key in FIELD_KEYS {
        if let Some((_, v)) = numbers.iter().find(|(k, _)| k == key) {
            set_key(&mut cfg, key, *v)?;
        }
    }
    for (rho, _) in RHO_KEYS {
        if let Some((_, v)) = numbers.iter().find(|(k, _)| k == rho) {
            set_key(&mut cfg, rho, *v)?;
        }
    }

    let defaulted: Vec<&str> = FIELD_KEYS
        .iter()
        .copied()
        .filter(|k| {
            !map.contains_key(*k)
                && !RHO_KEYS
                    .iter()
                    .any(|(rho, watts)| watts == k && map.contains_key(*rho))
        })
        .collect();
    if !defaulted.is_empty() {
        log::info!("config: using defaults for {}", defaulted.join(", "));
    }

    cfg.validate()
        .map_err(|e| CliError::Config(format!("validation failed: {e}")))?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<SystemConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// The configuration as a flat JSON object with watts for all powers.
pub fn config_to_json(cfg: &SystemConfig) -> Value {
    let pairs: [(&str, f64); 20] = [
        ("p_c", cfg.p_c),
        ("p_r", cfg.p_r),
        ("p_bs", cfg.p_bs),
        ("d_c", cfg.d_c),
        ("d_r", cfg.d_r),
        ("beta_semi", cfg.beta_semi),
        ("bandwidth_b", cfg.bandwidth_b),
        ("t_temp", cfg.t_temp),
        ("sigma_tau", cfg.sigma_tau),
        ("gamma_th", cfg.gamma_th),
        ("gamma_sic", cfg.gamma_sic),
        ("delta_duty", cfg.delta_duty),
        ("t_pulse", cfg.t_pulse),
        ("g_c", cfg.g_c),
        ("g_r", cfg.g_r),
        ("m", cfg.fading.m),
        ("alpha_c", cfg.pathloss.alpha_c),
        ("alpha_r", cfg.pathloss.alpha_r),
        ("f_c", cfg.pathloss.f_c),
        ("sigma_rcs", cfg.pathloss.sigma_rcs),
    ];
    Value::Object(
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), Value::from(*v)))
            .collect(),
    )
}
