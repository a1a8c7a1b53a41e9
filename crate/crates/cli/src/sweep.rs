//! Parameter sweeps and the figure presets.

use std::fmt;
use std::str::FromStr;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use semi_isac_core::analytic::{
    ergodic_reir, ergodic_reir_quadrature, outage_comm_tx, outage_radar_comm, Route,
};
use semi_isac_core::montecarlo::{
    simulate_ergodic_reir, simulate_outage_comm_tx, simulate_outage_radar_comm,
};
use semi_isac_core::{
    DerivedConstants, EstimateWithCI, InterferenceMode, QuadratureSpec, SystemConfig, TrialPlan,
};

use crate::config::{config_to_json, set_key};
use crate::table::ResultTable;
use crate::CliError;

/// Monte Carlo trials per cell when none are requested.
pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Quadrature used for every analytic cell of a sweep.
pub fn sweep_quadrature() -> QuadratureSpec {
    QuadratureSpec::new(1e-10, 1e-300, 2000).expect("static quadrature spec")
}

macro_rules! named_enum {
    ($ty:ident { $($var:ident => $name:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum $ty { $($var),+ }

        impl $ty {
            pub const ALL: &'static [$ty] = &[$($ty::$var),+];

            pub fn name(self) -> &'static str {
                match self { $($ty::$var => $name),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $ty {
            type Err = CliError;

            fn from_str(s: &str) -> Result<Self, CliError> {
                Self::ALL.iter().copied().find(|v| v.name() == s).ok_or_else(|| {
                    let names: Vec<_> = Self::ALL.iter().map(|v| v.name()).collect();
                    CliError::Usage(format!(
                        "unknown {} '{s}'; expected one of {}",
                        stringify!($ty).to_lowercase(),
                        names.join(", ")
                    ))
                })
            }
        }
    };
}

named_enum!(Axis {
    RhoCDb => "rho_c_db",
    RhoBsDb => "rho_bs_db",
    BetaSemi => "beta_semi",
    GammaTh => "gamma_th",
    DeltaDuty => "delta_duty",
    TPulse => "t_pulse",
    DR => "d_r",
});

named_enum!(Metric {
    OutageCommTx => "outage_comm_tx",
    OutageRadarComm => "outage_radar_comm",
    ErgodicReir => "ergodic_reir",
});

named_enum!(Method {
    Closed => "closed",
    Integral => "integral",
    MonteCarlo => "monte_carlo",
});

impl Metric {
    /// Outage simulations match the averaged-interference assumption of the
    /// closed forms; the rate is exact with the instantaneous echo.
    pub fn default_mode(self) -> InterferenceMode {
        match self {
            Metric::ErgodicReir => InterferenceMode::Instantaneous,
            _ => InterferenceMode::Mean,
        }
    }
}

/// Parses `metric:method`.
pub fn parse_metric_pair(s: &str) -> Result<(Metric, Method), CliError> {
    let (m, k) = s
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("metric '{s}' must be written metric:method")))?;
    Ok((m.parse()?, k.parse()?))
}

/// A labelled set of key overrides applied before the axis value.
#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub label: String,
    pub overrides: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub axis: Axis,
    pub values: Vec<f64>,
    pub metrics: Vec<(Metric, Method)>,
    pub trials: Option<TrialPlan>,
    /// Interference mode for every simulated cell. `None` uses
    /// [`Metric::default_mode`].
    pub mode: Option<InterferenceMode>,
    /// Empty means one unlabelled series per metric.
    pub variants: Vec<Variant>,
}

/// Inclusive arithmetic grid. The end point is kept when it lies within a
/// millionth of a step of the last node.
pub fn grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(from.is_finite() && to.is_finite() && step.is_finite() && step > 0.0 && to >= from) {
        return Err(CliError::Usage(format!(
            "grid needs finite from <= to and step > 0, got {from}..{to} step {step}"
        )));
    }
    let n = ((to - from) / step + 1e-6).floor() as usize;
    Ok((0..=n).map(|i| from + step * i as f64).collect())
}

fn apply_axis(cfg: &SystemConfig, axis: Axis, v: f64) -> SystemConfig {
    let mut c = *cfg;
    match axis {
        Axis::RhoCDb => c.p_c = c.power_from_rho_db(v),
        Axis::RhoBsDb => c.p_bs = c.power_from_rho_db(v),
        Axis::BetaSemi => c.beta_semi = v,
        Axis::GammaTh => c.gamma_th = v,
        Axis::DeltaDuty => c.delta_duty = v,
        Axis::TPulse => c.t_pulse = v,
        Axis::DR => c.d_r = v,
    }
    c
}

impl SweepSpec {
    pub fn validate(&self, cfg: &SystemConfig) -> Result<(), CliError> {
        if self.values.is_empty() {
            return Err(CliError::Usage("sweep has no axis values".into()));
        }
        if self.values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(CliError::Usage(
                "axis values must be strictly ascending".into(),
            ));
        }
        if self.metrics.is_empty() {
            return Err(CliError::Usage("sweep has no metrics".into()));
        }
        if self.metrics.iter().any(|m| m.1 == Method::MonteCarlo) && self.trials.is_none() {
            return Err(CliError::Usage(
                "monte_carlo columns need a trial plan".into(),
            ));
        }
        for cfg in self.variant_configs(cfg)? {
            for &v in &self.values {
                apply_axis(&cfg.1, self.axis, v).validate().map_err(|e| {
                    CliError::Usage(format!("{}={v} is outside its domain: {e}", self.axis))
                })?;
            }
        }
        Ok(())
    }

    fn variant_configs(&self, cfg: &SystemConfig) -> Result<Vec<(String, SystemConfig)>, CliError> {
        if self.variants.is_empty() {
            return Ok(vec![(String::new(), *cfg)]);
        }
        self.variants
            .iter()
            .map(|v| {
                let mut c = *cfg;
                for (k, x) in &v.overrides {
                    set_key(&mut c, k, *x)?;
                }
                Ok((format!("@{}", v.label), c))
            })
            .collect()
    }

    /// Column names after the axis, in row order.
    pub fn columns(&self, cfg: &SystemConfig) -> Result<Vec<String>, CliError> {
        let mut cols = vec![self.axis.name().to_string()];
        for (suffix, _) in self.variant_configs(cfg)? {
            for (metric, method) in &self.metrics {
                let base = format!("{metric}_{method}");
                cols.push(format!("{base}{suffix}"));
                if *method == Method::MonteCarlo {
                    for ci in ["se", "ci_low", "ci_high"] {
                        cols.push(format!("{base}_{ci}{suffix}"));
                    }
                }
            }
        }
        Ok(cols)
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub table: ResultTable,
    /// One message per cell that could not be computed; those cells are NaN.
    pub failures: Vec<String>,
}

impl SweepOutcome {
    pub fn all_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

enum Cell {
    Value(f64),
    Estimate(EstimateWithCI),
}

fn eval_cell(
    cfg: &SystemConfig,
    metric: Metric,
    method: Method,
    plan: Option<TrialPlan>,
    mode: Option<InterferenceMode>,
) -> Result<Cell, CliError> {
    let quad = sweep_quadrature();
    let route = match method {
        Method::Closed => Route::Closed,
        _ => Route::Integral,
    };
    if method == Method::MonteCarlo {
        let plan = TrialPlan {
            interference_mode: mode.unwrap_or(metric.default_mode()),
            ..plan.ok_or_else(|| CliError::Usage("monte_carlo needs a trial plan".into()))?
        };
        let est = match metric {
            Metric::OutageCommTx => simulate_outage_comm_tx(cfg, &plan)?,
            Metric::OutageRadarComm => simulate_outage_radar_comm(cfg, &plan)?,
            Metric::ErgodicReir => simulate_ergodic_reir(cfg, &plan)?,
        };
        return Ok(Cell::Estimate(est));
    }
    let v = match metric {
        Metric::OutageCommTx => {
            outage_comm_tx(&DerivedConstants::new(cfg)?, cfg, route, &quad)?.probability
        }
        Metric::OutageRadarComm => {
            outage_radar_comm(&DerivedConstants::new(cfg)?, cfg, route, &quad)?.probability
        }
        Metric::ErgodicReir => match route {
            Route::Closed => ergodic_reir(cfg, route, &quad)?.rate,
            Route::Integral => ergodic_reir_quadrature(cfg, &quad)?.rate,
        },
    };
    Ok(Cell::Value(v))
}

fn eval_row(
    spec: &SweepSpec,
    variants: &[(String, SystemConfig)],
    x: f64,
) -> (Vec<f64>, Vec<String>) {
    let mut row = vec![x];
    let mut failures = Vec::new();
    for (suffix, base) in variants {
        let cfg = apply_axis(base, spec.axis, x);
        for &(metric, method) in &spec.metrics {
            let width = if method == Method::MonteCarlo { 4 } else { 1 };
            match eval_cell(&cfg, metric, method, spec.trials, spec.mode) {
                Ok(Cell::Value(v)) if v.is_finite() => row.push(v),
                Ok(Cell::Estimate(e)) if e.estimate.is_finite() => {
                    row.extend([e.estimate, e.std_error, e.ci95_low, e.ci95_high])
                }
                other => {
                    let why = match other {
                        Err(e) => e.to_string(),
                        _ => "non-finite result".to_string(),
                    };
                    failures.push(format!(
                        "{}={x}: {metric}_{method}{suffix}: {why}",
                        spec.axis
                    ));
                    row.extend(std::iter::repeat_n(f64::NAN, width));
                }
            }
        }
    }
    (row, failures)
}

fn mode_label(spec: &SweepSpec, metric: Metric) -> String {
    spec.mode.unwrap_or(metric.default_mode()).to_string()
}

/// Runs every cell of the sweep. Rows are independent and run in parallel;
/// per-cell failures become NaN cells listed in the outcome and the
/// table's metadata.
pub fn run_sweep(cfg: &SystemConfig, spec: &SweepSpec) -> Result<SweepOutcome, CliError> {
    cfg.validate()?;
    spec.validate(cfg)?;
    let variants = spec.variant_configs(cfg)?;
    let columns = spec.columns(cfg)?;

    #[cfg(feature = "parallel")]
    let evaluated: Vec<_> = spec
        .values
        .par_iter()
        .map(|x| eval_row(spec, &variants, *x))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let evaluated: Vec<_> = spec
        .values
        .iter()
        .map(|x| eval_row(spec, &variants, *x))
        .collect();

    let mut rows = Vec::with_capacity(evaluated.len());
    let mut failures = Vec::new();
    for (row, f) in evaluated {
        rows.push(row);
        failures.extend(f);
    }

    let mut metadata = vec![
        (
            "tool".to_string(),
            format!("semi-isac {}", env!("CARGO_PKG_VERSION")),
        ),
        ("sweep".to_string(), spec.name.clone()),
        ("axis".to_string(), spec.axis.to_string()),
        ("config".to_string(), config_to_json(cfg).to_string()),
    ];
    for v in &spec.variants {
        let o: Vec<String> = v
            .overrides
            .iter()
            .map(|(k, x)| format!("{k}={x}"))
            .collect();
        metadata.push((format!("variant.{}", v.label), o.join(",")));
    }
    if let Some(plan) = &spec.trials {
        metadata.push(("seed".into(), plan.base_seed.to_string()));
        metadata.push(("trials".into(), plan.n_trials.to_string()));
        for metric in Metric::ALL {
            if spec
                .metrics
                .iter()
                .any(|m| m.0 == *metric && m.1 == Method::MonteCarlo)
            {
                metadata.push((format!("mode.{metric}"), mode_label(spec, *metric)));
            }
        }
    }
    for (i, f) in failures.iter().enumerate() {
        metadata.push((format!("failure.{i}"), f.clone()));
    }

    Ok(SweepOutcome {
        table: ResultTable {
            columns,
            rows,
            metadata,
        },
        failures,
    })
}

fn all_methods(metric: Metric, methods: &[Method]) -> Vec<(Metric, Method)> {
    methods.iter().map(|m| (metric, *m)).collect()
}

/// Presets shaped like the published figures. `range` replaces the default
/// axis grid.
pub fn preset(
    name: &str,
    trials: Option<TrialPlan>,
    range: Option<(f64, f64, f64)>,
) -> Result<SweepSpec, CliError> {
    let (axis, default_range, metrics, variants) = match name {
        "fig1" => (
            Axis::RhoCDb,
            (0.0, 40.0, 5.0),
            [Metric::OutageCommTx, Metric::OutageRadarComm]
                .iter()
                .flat_map(|m| all_methods(*m, &[Method::Closed, Method::MonteCarlo]))
                .collect(),
            vec![],
        ),
        "fig2" => (
            Axis::RhoBsDb,
            (150.0, 250.0, 10.0),
            all_methods(
                Metric::ErgodicReir,
                &[Method::Closed, Method::Integral, Method::MonteCarlo],
            ),
            [800.0, 1300.0]
                .iter()
                .map(|d| Variant {
                    label: format!("d_r={d}"),
                    overrides: vec![("d_r".into(), *d)],
                })
                .collect(),
        ),
        "fig3" => (
            Axis::RhoBsDb,
            (160.0, 260.0, 10.0),
            all_methods(Metric::ErgodicReir, &[Method::Closed, Method::MonteCarlo]),
            [(0.02, 1e-6), (0.01, 1e-6), (0.01, 2e-6)]
                .iter()
                .map(|(d, t)| Variant {
                    label: format!("delta={d},T={}us", t * 1e6),
                    overrides: vec![("delta_duty".into(), *d), ("t_pulse".into(), *t)],
                })
                .collect(),
        ),
        other => {
            return Err(CliError::Usage(format!(
                "unknown preset '{other}'; expected fig1, fig2 or fig3"
            )))
        }
    };
    let (from, to, step) = range.unwrap_or(default_range);
    let trials = match trials {
        Some(t) => t,
        None => TrialPlan::new(DEFAULT_TRIALS, DEFAULT_SEED, InterferenceMode::Mean)?,
    };
    Ok(SweepSpec {
        name: name.to_string(),
        axis,
        values: grid(from, to, step)?,
        metrics,
        trials: Some(trials),
        mode: None,
        variants,
    })
}
