use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use semi_isac_cli::config::{config_to_json, load_config};
use semi_isac_cli::selftest::run_selftest;
use semi_isac_cli::sweep::{
    grid, parse_metric_pair, preset, run_sweep, Axis, Method, Metric, SweepOutcome, SweepSpec,
    Variant, DEFAULT_SEED, DEFAULT_TRIALS,
};
use semi_isac_cli::table::{emit_csv, emit_plot_script};
use semi_isac_cli::CliError;
use semi_isac_core::{InterferenceMode, SystemConfig, TrialPlan, Workers};

#[derive(Parser)]
#[command(
    name = "semi-isac",
    version,
    about = "Outage and radar-rate evaluation for uplink NOMA semi-ISaC"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Flat JSON configuration; missing keys take default values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV and plot script output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Monte Carlo trials per cell, e.g. 100000 or 1e6.
    #[arg(long, global = true, value_parser = parse_trials)]
    trials: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Interference model for simulated cells. Defaults to mean for outages
    /// and instantaneous for the ergodic rate.
    #[arg(long, global = true)]
    mode: Option<ModeArg>,
    #[arg(long, global = true, default_value = "csv")]
    format: Format,
    /// Worker threads; the results do not depend on it.
    #[arg(long, global = true, env = "SEMI_ISAC_WORKERS")]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Mean,
    Instantaneous,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Args, Clone, Copy)]
struct RangeOpts {
    #[arg(long, requires_all = ["to", "step"])]
    from: Option<f64>,
    #[arg(long, requires_all = ["from", "step"])]
    to: Option<f64>,
    #[arg(long, requires_all = ["from", "to"])]
    step: Option<f64>,
}

impl RangeOpts {
    fn get(self) -> Option<(f64, f64, f64)> {
        Some((self.from?, self.to?, self.step?))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every metric by every method for one configuration.
    Eval,
    /// Sweep one parameter, described by flags or by a JSON file.
    Sweep(SweepArgs),
    /// Outage probabilities versus the transmitter's SNR.
    Fig1(RangeOpts),
    /// Ergodic radar rate versus the BS SNR for two target distances.
    Fig2(RangeOpts),
    /// Ergodic radar rate versus the BS SNR for three (duty, pulse) pairs.
    Fig3(RangeOpts),
    /// Closed forms, integrals and Monte Carlo against each other.
    Selftest,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON sweep description; flags given alongside override its fields.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    axis: Option<String>,
    /// Comma-separated axis values.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["from", "to", "step"])]
    values: Option<Vec<f64>>,
    #[command(flatten)]
    range: RangeOpts,
    /// Comma-separated metric:method pairs, e.g. outage_comm_tx:closed.
    #[arg(long, value_delimiter = ',')]
    metrics: Option<Vec<String>>,
}

fn parse_trials(s: &str) -> Result<u64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("not a number: {s}"))?;
    if !(x >= 1.0 && x.fract() == 0.0 && x <= u64::MAX as f64) {
        return Err(format!("trial count must be a positive integer, got {s}"));
    }
    Ok(x as u64)
}

struct Session {
    cfg: SystemConfig,
    out: Option<PathBuf>,
    plan: TrialPlan,
    mode: Option<InterferenceMode>,
}

impl Session {
    fn new(g: &GlobalOpts) -> Result<Self, CliError> {
        let cfg = match &g.config {
            Some(p) => load_config(p)?,
            None => SystemConfig::default(),
        };
        let workers = match g.workers {
            Some(0) => return Err(CliError::Usage("worker count must be at least 1".into())),
            Some(n) => {
                #[cfg(feature = "parallel")]
                if let Err(e) = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                {
                    log::warn!("could not size the global pool: {e}");
                }
                Workers::Fixed(n)
            }
            None => Workers::Ambient,
        };
        let mode = g.mode.map(|m| match m {
            ModeArg::Mean => InterferenceMode::Mean,
            ModeArg::Instantaneous => InterferenceMode::Instantaneous,
        });
        let plan = TrialPlan::new(
            g.trials.unwrap_or(DEFAULT_TRIALS),
            g.seed.unwrap_or(DEFAULT_SEED),
            mode.unwrap_or(InterferenceMode::Mean),
        )?
        .with_workers(workers);
        Ok(Self {
            cfg,
            out: g.out.clone(),
            plan,
            mode,
        })
    }

    fn write(&self, outcome: &SweepOutcome, name: &str) -> Result<(), CliError> {
        let dir = self.out.clone().unwrap_or_else(|| PathBuf::from("results"));
        std::fs::create_dir_all(&dir)?;
        let csv = dir.join(format!("{name}.csv"));
        emit_csv(&outcome.table, &csv)?;
        emit_plot_script(&outcome.table, &csv, &dir.join(format!("{name}.gp")))?;
        eprintln!(
            "wrote {} ({} rows) and {name}.gp",
            csv.display(),
            outcome.table.rows.len()
        );
        Ok(())
    }
}

fn report(outcome: &SweepOutcome) -> ExitCode {
    for f in &outcome.failures {
        eprintln!("failed cell: {f}");
    }
    if outcome.all_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn eval(s: &Session) -> Result<ExitCode, CliError> {
    let spec = SweepSpec {
        name: "eval".into(),
        axis: Axis::RhoCDb,
        values: vec![s.cfg.rho_db(s.cfg.p_c)],
        metrics: Metric::ALL
            .iter()
            .flat_map(|m| Method::ALL.iter().map(move |k| (*m, *k)))
            .collect(),
        trials: Some(s.plan),
        mode: s.mode,
        variants: vec![],
    };
    let outcome = run_sweep(&s.cfg, &spec)?;
    for (c, v) in outcome.table.columns.iter().zip(&outcome.table.rows[0]) {
        println!("{c:<38} {v:.6e}");
    }
    if s.out.is_some() {
        s.write(&outcome, "eval")?;
    }
    Ok(report(&outcome))
}

fn number(v: &Value, what: &str) -> Result<f64, CliError> {
    v.as_f64()
        .ok_or_else(|| CliError::Usage(format!("sweep spec: {what} must be a number")))
}

/// Reads a sweep file: `name`, `axis`, `values` or `from`/`to`/`step`,
/// `metrics` as `"metric:method"` strings, and optional `variants` as
/// `[{"label": .., "overrides": {key: value}}]`.
fn spec_from_file(path: &Path, args: &mut SweepArgs) -> Result<Vec<Variant>, CliError> {
    let text = std::fs::read_to_string(path)?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| {
        CliError::Usage(format!(
            "{}: line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })?;
    let obj = doc
        .as_object()
        .ok_or_else(|| CliError::Usage("sweep spec must be a JSON object".into()))?;
    for key in obj.keys() {
        if ![
            "name", "axis", "values", "from", "to", "step", "metrics", "variants",
        ]
        .contains(&key.as_str())
        {
            return Err(CliError::Usage(format!("sweep spec: unknown key '{key}'")));
        }
    }
    let text_of = |k: &str| obj.get(k).and_then(Value::as_str).map(str::to_string);
    args.name = args.name.take().or(text_of("name"));
    args.axis = args.axis.take().or(text_of("axis"));
    if args.values.is_none() && args.range.get().is_none() {
        if let Some(vs) = obj.get("values").and_then(Value::as_array) {
            args.values = Some(
                vs.iter()
                    .map(|v| number(v, "values"))
                    .collect::<Result<_, _>>()?,
            );
        } else if let (Some(a), Some(b), Some(c)) =
            (obj.get("from"), obj.get("to"), obj.get("step"))
        {
            args.values = Some(grid(
                number(a, "from")?,
                number(b, "to")?,
                number(c, "step")?,
            )?);
        }
    }
    if args.metrics.is_none() {
        if let Some(ms) = obj.get("metrics").and_then(Value::as_array) {
            args.metrics = Some(
                ms.iter()
                    .filter_map(|m| m.as_str().map(str::to_string))
                    .collect(),
            );
        }
    }
    let mut variants = Vec::new();
    for v in obj
        .get("variants")
        .and_then(Value::as_array)
        .into_iter()
        .flatten()
    {
        let label = v
            .get("label")
            .and_then(Value::as_str)
            .ok_or_else(|| CliError::Usage("sweep spec: variant without label".into()))?;
        let overrides = v
            .get("overrides")
            .and_then(Value::as_object)
            .into_iter()
            .flatten()
            .map(|(k, x)| Ok((k.clone(), number(x, k)?)))
            .collect::<Result<_, CliError>>()?;
        variants.push(Variant {
            label: label.to_string(),
            overrides,
        });
    }
    Ok(variants)
}

fn sweep(s: &Session, mut args: SweepArgs) -> Result<ExitCode, CliError> {
    let variants = match args.spec.clone() {
        Some(p) => spec_from_file(&p, &mut args)?,
        None => vec![],
    };
    let axis: Axis = args
        .axis
        .as_deref()
        .ok_or_else(|| CliError::Usage("sweep needs --axis".into()))?
        .parse()?;
    let values = match (args.values, args.range.get()) {
        (Some(v), _) => v,
        (None, Some((a, b, c))) => grid(a, b, c)?,
        (None, None) => {
            return Err(CliError::Usage(
                "sweep needs --values or --from/--to/--step".into(),
            ))
        }
    };
    let metrics = args
        .metrics
        .ok_or_else(|| CliError::Usage("sweep needs --metrics".into()))?
        .iter()
        .map(|m| parse_metric_pair(m))
        .collect::<Result<Vec<_>, _>>()?;
    let name = args.name.unwrap_or_else(|| format!("sweep_{axis}"));
    let spec = SweepSpec {
        name: name.clone(),
        axis,
        values,
        metrics,
        trials: Some(s.plan),
        mode: s.mode,
        variants,
    };
    let outcome = run_sweep(&s.cfg, &spec)?;
    s.write(&outcome, &name)?;
    Ok(report(&outcome))
}

fn figure(s: &Session, name: &str, range: RangeOpts) -> Result<ExitCode, CliError> {
    let mut spec = preset(name, Some(s.plan), range.get())?;
    spec.mode = s.mode;
    let outcome = run_sweep(&s.cfg, &spec)?;
    s.write(&outcome, name)?;
    Ok(report(&outcome))
}

fn selftest(s: &Session) -> Result<ExitCode, CliError> {
    let checks = run_selftest(s.plan.n_trials, s.plan.base_seed, s.plan.workers)?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        println!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    println!(
        "{} of {} checks passed",
        checks.len() - failed,
        checks.len()
    );
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let s = Session::new(&cli.global)?;
    log::debug!("resolved config {}", config_to_json(&s.cfg));
    match cli.command {
        Command::Eval => eval(&s),
        Command::Sweep(args) => sweep(&s, args),
        Command::Fig1(r) => figure(&s, "fig1", r),
        Command::Fig2(r) => figure(&s, "fig2", r),
        Command::Fig3(r) => figure(&s, "fig3", r),
        Command::Selftest => selftest(&s),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let Format::Csv = cli.global.format;
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
