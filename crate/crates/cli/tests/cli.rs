use std::path::Path;
use std::process::{Command, Output};

use semi_isac_cli::config::parse_config;
use semi_isac_cli::table::parse_csv;
use semi_isac_core::montecarlo::simulate_outage_radar_comm;
use semi_isac_core::{InterferenceMode, TrialPlan};

fn semi_isac(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semi-isac"))
        .args(args)
        .current_dir(dir)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn presets_smoke() {
    let dir = tempfile::tempdir().unwrap();
    for (name, rows, series) in [("fig1", 9, 1), ("fig2", 11, 2), ("fig3", 11, 3)] {
        let o = semi_isac(&[name, "--trials", "1e3", "--out", "out"], dir.path());
        assert!(o.status.success(), "{name}: {}", stderr(&o));
        let t = parse_csv(&dir.path().join("out").join(format!("{name}.csv"))).unwrap();
        assert_eq!(t.rows.len(), rows);
        assert!(t.rows.iter().flatten().all(|x| x.is_finite()));
        let analytic = t.columns.iter().filter(|c| c.contains("_closed")).count();
        assert_eq!(analytic % series, 0, "{name}: {:?}", t.columns);
        let script =
            std::fs::read_to_string(dir.path().join("out").join(format!("{name}.gp"))).unwrap();
        assert!(script.contains(&format!("'{name}.csv'")));
    }
}

#[test]
fn preset_range_override() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "fig1", "--trials", "1e3", "--out", ".", "--from", "100", "--to", "150", "--step", "10",
    ];
    let o = semi_isac(&args, dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let t = parse_csv(&dir.path().join("fig1.csv")).unwrap();
    assert_eq!(
        t.column("rho_c_db").unwrap(),
        vec![100.0, 110.0, 120.0, 130.0, 140.0, 150.0]
    );
    let p = t.column("outage_comm_tx_closed").unwrap();
    assert!(p.windows(2).all(|w| w[1] < w[0]), "{p:?}");
}

#[test]
fn rows_rederive_from_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sweep",
        "--axis",
        "rho_c_db",
        "--values",
        "110,120,130",
        "--metrics",
        "outage_radar_comm:monte_carlo",
        "--trials",
        "5000",
        "--seed",
        "99",
        "--out",
        ".",
    ];
    let o = semi_isac(&args, dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let t = parse_csv(&dir.path().join("sweep_rho_c_db.csv")).unwrap();
    let cfg = parse_config(t.meta("config").unwrap()).unwrap();
    let seed: u64 = t.meta("seed").unwrap().parse().unwrap();
    let n: u64 = t.meta("trials").unwrap().parse().unwrap();
    assert_eq!(t.meta("mode.outage_radar_comm"), Some("mean"));
    let plan = TrialPlan::new(n, seed, InterferenceMode::Mean).unwrap();
    for row in &t.rows {
        let est = simulate_outage_radar_comm(&cfg.with_rho_c_db(row[0]), &plan).unwrap();
        assert_eq!(est.estimate.to_bits(), row[1].to_bits());
        assert_eq!(est.ci95_high.to_bits(), row[4].to_bits());
    }
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for w in ["1", "3"] {
        let o = Command::new(env!("CARGO_BIN_EXE_semi-isac"))
            .args(["fig3", "--trials", "20000", "--out", w])
            .current_dir(dir.path())
            .env("SEMI_ISAC_WORKERS", w)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push(std::fs::read(dir.path().join(w).join("fig3.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn sweep_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("spec.json"),
        r#"{"name": "duty", "axis": "delta_duty", "values": [0.01, 0.02, 0.05],
            "metrics": ["ergodic_reir:closed", "ergodic_reir:integral"],
            "variants": [{"label": "near", "overrides": {"d_r": 800}}]}"#,
    )
    .unwrap();
    let o = semi_isac(&["sweep", "--spec", "spec.json", "--out", "."], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let t = parse_csv(&dir.path().join("duty.csv")).unwrap();
    assert_eq!(
        t.columns,
        [
            "delta_duty",
            "ergodic_reir_closed@near",
            "ergodic_reir_integral@near"
        ]
    );
    let r = t.column("ergodic_reir_closed@near").unwrap();
    assert!((r[1] / r[0] - 2.0).abs() < 1e-12 && (r[2] / r[0] - 5.0).abs() < 1e-12);
}

#[test]
fn config_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), r#"{"beta_semi": 1.5}"#).unwrap();
    let o = semi_isac(&["eval", "--config", "bad.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("beta_semi"), "{}", stderr(&o));

    std::fs::write(dir.path().join("typo.json"), r#"{"detla_duty": 0.1}"#).unwrap();
    let o = semi_isac(&["eval", "--config", "typo.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("detla_duty"));

    let o = semi_isac(
        &["sweep", "--axis", "rho_c_db", "--values", "1,2"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    let o = semi_isac(&["fig1", "--trials", "0"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eval_with_shipped_defaults() {
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/default.json");
    assert_eq!(
        parse_config(&std::fs::read_to_string(config).unwrap()).unwrap(),
        semi_isac_core::SystemConfig::default()
    );
    let dir = tempfile::tempdir().unwrap();
    let o = semi_isac(&["eval", "--config", config, "--trials", "1e4"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.contains("ergodic_reir_monte_carlo_ci_high"));
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = semi_isac(&["selftest"], dir.path());
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(o.status.success(), "{out}");
    assert!(!out.contains("FAIL"));
}
