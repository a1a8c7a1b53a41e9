//! Acceptance suite. Prints one PASS/FAIL line per criterion, with indented
//! detail lines underneath.
//!
//! Criteria listed in `EXPECTED_FAILURES` cannot hold for the reference
//! configuration (see the README); they still print FAIL. The process exits
//! nonzero when any other criterion fails or when an expected failure
//! starts passing, so the list cannot go stale.

use std::time::{Duration, Instant};

use semi_isac_cli::sweep::{preset, run_sweep, SweepOutcome};
use semi_isac_cli::table::ResultTable;
use semi_isac_core::analytic::*;
use semi_isac_core::channel::{cdf_equivalent, pdf_equivalent, sf_equivalent};
use semi_isac_core::linkbudget::{mean_radar_interference, time_delay_energy};
use semi_isac_core::montecarlo::*;
use semi_isac_core::specfun::integrate_to_infinity;
use semi_isac_core::{
    DerivedConstants, FadingSpec, InterferenceMode, QuadratureSpec, SystemConfig, TrialPlan,
};

const SEED: u64 = 0x5EED_1CA5;
const TRIALS: u64 = 1_000_000;
const BUDGET: Duration = Duration::from_secs(120);

/// The fig1 grid of 0..40 dB transmit SNR is more than 90 dB below where
/// either outage leaves 1 under the reference link budget.
const EXPECTED_FAILURES: &[u32] = &[4];

struct Verdict {
    passed: bool,
    summary: String,
    details: Vec<String>,
}

impl Verdict {
    fn new(summary: &str) -> Self {
        Self {
            passed: true,
            summary: summary.to_string(),
            details: Vec::new(),
        }
    }

    /// Records a check that counts toward the verdict.
    fn check(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.details
            .push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }

    /// Records context that does not count toward the verdict.
    fn note(&mut self, line: String) {
        self.details.push(format!("info {line}"));
    }
}

fn tight() -> QuadratureSpec {
    QuadratureSpec::new(1e-12, 1e-300, 4000).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        ((a - b) / b).abs()
    }
}

fn with_m(m: f64) -> SystemConfig {
    SystemConfig {
        fading: FadingSpec { m },
        ..SystemConfig::default()
    }
}

fn binomial_sigmas(p: f64, est: &EstimateWithCI) -> f64 {
    let se = (p * (1.0 - p) / est.n_trials as f64).sqrt();
    match (se > 0.0, est.estimate == p) {
        (true, _) => (est.estimate - p).abs() / se,
        (false, true) => 0.0,
        (false, false) => f64::INFINITY,
    }
}

fn plan(mode: InterferenceMode) -> TrialPlan {
    TrialPlan::new(TRIALS, SEED, mode).unwrap()
}

/// Closed form vs integral vs simulation for both outage events at one point.
fn outage_triple(v: &mut Verdict, cfg: &SystemConfig, tag: &str) {
    let k = DerivedConstants::new(cfg).unwrap();
    let sim = plan(InterferenceMode::Mean);
    let rows = [
        (
            "transmitter",
            outage_comm_tx_closed(&k, cfg).unwrap().probability,
            outage_comm_tx_integral(&k, cfg, &tight())
                .unwrap()
                .probability,
            simulate_outage_comm_tx(cfg, &sim).unwrap(),
        ),
        (
            "target     ",
            outage_radar_comm_closed(&k, cfg).unwrap().probability,
            outage_radar_comm_integral(&k, cfg, &tight())
                .unwrap()
                .probability,
            simulate_outage_radar_comm(cfg, &sim).unwrap(),
        ),
    ];
    for (who, closed, integral, mc) in rows {
        let r = rel(closed, integral);
        let s = binomial_sigmas(closed, &mc);
        v.check(
            r < 1e-8 && s < 3.0,
            format!(
                "{tag} {who}: closed {closed:.6e}, integral rel diff {r:.1e}, monte carlo {:.6e} ({s:.2} SE)",
                mc.estimate
            ),
        );
    }
}

fn criterion_1() -> Verdict {
    let mut v = Verdict::new("three-way outage agreement");
    let start = Instant::now();
    for rho_c in [0.0, 10.0, 20.0, 30.0, 40.0] {
        let cfg = SystemConfig::default().with_rho_c_db(rho_c);
        outage_triple(&mut v, &cfg, &format!("rho_c={rho_c:>3}dB"));
    }
    v.note(
        "both outages are exactly 1 on that grid; the points below exercise 1e-6 < p < 1".into(),
    );
    for rho_c in [110.0, 115.0, 120.0, 125.0, 130.0] {
        let cfg = SystemConfig::default()
            .with_rho_r_db(115.0)
            .with_rho_c_db(rho_c);
        outage_triple(&mut v, &cfg, &format!("rho_c={rho_c}dB rho_r=115dB"));
    }
    v.note("echo interference comparable to or above the noise floor:".into());
    for (rho_bs, rho_c, rho_r) in [
        (215.0, 120.0, 115.0),
        (215.0, 130.0, 120.0),
        (225.0, 125.0, 120.0),
    ] {
        let cfg = SystemConfig::default()
            .with_rho_bs_db(rho_bs)
            .with_rho_r_db(rho_r)
            .with_rho_c_db(rho_c);
        outage_triple(
            &mut v,
            &cfg,
            &format!("rho_c={rho_c}dB rho_r={rho_r}dB rho_bs={rho_bs}dB"),
        );
    }
    let t = start.elapsed();
    v.check(t < BUDGET, format!("runtime {:.1}s", t.as_secs_f64()));
    v
}

fn criterion_2() -> Verdict {
    let mut v = Verdict::new("ergodic REIR agreement");
    let start = Instant::now();
    let q = QuadratureSpec::default();
    let sim = plan(InterferenceMode::Instantaneous);
    for m in [1.0, 3.0] {
        for rho_bs in [20.0, 40.0, 60.0, 200.0, 230.0] {
            let cfg = with_m(m).with_rho_bs_db(rho_bs);
            let r = ergodic_reir_quadrature(&cfg, &q).unwrap().rate;
            let mc = simulate_ergodic_reir(&cfg, &sim).unwrap();
            let d = rel(mc.estimate, r);
            let line = format!(
                "m={m} rho_bs={rho_bs}dB: quadrature {r:.6e} bit/s, monte carlo {:.6e} (rel {d:.2e})",
                mc.estimate
            );
            if rho_bs <= 60.0 {
                v.check(d < 0.01, line);
            } else {
                v.check(d < 0.01, format!("{line} [extra point]"));
            }
            let (name, alt, tol) = if m == 3.0 {
                (
                    "series",
                    ergodic_reir_integer_m(&cfg, &q).unwrap().rate,
                    5e-3,
                )
            } else {
                (
                    "rayleigh",
                    ergodic_reir_rayleigh(&cfg, &q).unwrap().rate,
                    1e-6,
                )
            };
            let d = rel(alt, r);
            v.check(
                d < tol,
                format!("m={m} rho_bs={rho_bs}dB: {name} form rel diff {d:.1e} (tol {tol:.0e})"),
            );
        }
    }
    let t = start.elapsed();
    v.check(t < BUDGET, format!("runtime {:.1}s", t.as_secs_f64()));
    v
}

fn criterion_3() -> Verdict {
    let mut v = Verdict::new("cascaded gain distribution");
    let quad = QuadratureSpec::default();
    // 0.99 quantile of chi-square with 39 degrees of freedom
    let chi2_crit = 62.428_121_016_184_9;
    for m in [1.0, 3.0] {
        let cfg = with_m(m);
        let p = TrialPlan::new(TRIALS, SEED + m as u64, InterferenceMode::Instantaneous).unwrap();
        let mut xs = sample_values(&cfg, &p, Which::CascadedRadar).unwrap();
        xs.sort_by(f64::total_cmp);
        let points: Vec<f64> = (1..2000).map(|i| xs[i * xs.len() / 2000]).collect();
        let cdf: Vec<f64> = points
            .iter()
            .map(|x| cdf_equivalent(m, *x, &quad).unwrap())
            .collect();
        let d = ks_distance_on_grid(&xs, &points, &cdf);
        let mut gap = cdf[0].max(1.0 - cdf[cdf.len() - 1]);
        for w in cdf.windows(2) {
            gap = gap.max(w[1] - w[0]);
        }
        v.check(
            d + gap < 0.005,
            format!("m={m}: KS distance <= {:.2e}", d + gap),
        );

        let spec = HistogramSpec {
            lo: 0.0,
            hi: 3.9,
            bins: 39,
        };
        let h = empirical_distribution(&cfg, &p, Which::CascadedRadar, spec).unwrap();
        let n = TRIALS as f64;
        let edges: Vec<f64> = h
            .edges
            .iter()
            .map(|e| cdf_equivalent(m, *e, &quad).unwrap())
            .collect();
        let mut expected: Vec<f64> = edges.windows(2).map(|w| n * (w[1] - w[0])).collect();
        let mut observed = h.counts.clone();
        expected.push(n * sf_equivalent(m, spec.hi, &quad).unwrap());
        observed.push(h.above + h.below);
        let stat = chi_square(&observed, &expected);
        v.check(
            stat < chi2_crit,
            format!("m={m}: chi-square {stat:.2} < {chi2_crit:.2} (40 cells)"),
        );

        let tq = tight();
        let mass = integrate_to_infinity(|z| pdf_equivalent(m, z).unwrap(), 0.0, &tq)
            .unwrap()
            .value;
        let mean = integrate_to_infinity(|z| z * pdf_equivalent(m, z).unwrap(), 0.0, &tq)
            .unwrap()
            .value;
        v.check(
            (mass - 1.0).abs() < 1e-8,
            format!("m={m}: pdf mass 1{:+.1e}", mass - 1.0),
        );
        v.check(
            (mean - 1.0).abs() < 1e-6,
            format!("m={m}: pdf mean 1{:+.1e}", mean - 1.0),
        );
    }
    v
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

fn fig1_checks(v: &mut Verdict, t: &ResultTable, counts: bool) {
    let tx = t.column("outage_comm_tx_closed").unwrap();
    let tg = t.column("outage_radar_comm_closed").unwrap();
    let x = t.column("rho_c_db").unwrap();
    let at = |target: f64| x.iter().position(|r| (r - target).abs() < 1e-9);
    let (i_lo, i_hi) = (at(x[x.len() - 1] - 5.0).unwrap(), x.len() - 1);
    let floor = (tg[i_hi], rel(tg[i_lo], tg[i_hi]));
    let lines = [
        (
            strictly_decreasing(&tx),
            format!(
                "transmitter outage strictly decreasing: {:.3e} .. {:.3e}",
                tx[0], tx[i_hi]
            ),
        ),
        (
            strictly_decreasing(&tg),
            format!(
                "target outage strictly decreasing: {:.3e} .. {:.3e}",
                tg[0], tg[i_hi]
            ),
        ),
        (
            floor.0 > 0.0 && floor.1 < 0.01,
            format!(
                "target floor {:.5e} at {}dB, change from {}dB {:.2e}",
                floor.0, x[i_hi], x[i_lo], floor.1
            ),
        ),
    ];
    for (ok, line) in lines {
        if counts {
            v.check(ok, line);
        } else {
            v.note(format!("{} {line}", if ok { "holds:" } else { "fails:" }));
        }
    }
    let worst = ["outage_comm_tx", "outage_radar_comm"]
        .iter()
        .flat_map(|m| {
            let c = t.column(&format!("{m}_closed")).unwrap();
            let s = t.column(&format!("{m}_monte_carlo")).unwrap();
            let n = t.meta("trials").unwrap().parse::<f64>().unwrap();
            c.into_iter().zip(s).map(move |(p, e)| {
                let se = (p * (1.0 - p) / n).sqrt();
                if se > 0.0 {
                    (e - p).abs() / se
                } else if e == p {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
        })
        .fold(0.0, f64::max);
    v.note(format!("closed vs monte carlo, worst row {worst:.2} SE"));
}

fn fig1_at(cfg: &SystemConfig, range: Option<(f64, f64, f64)>) -> SweepOutcome {
    let plan = TrialPlan::new(TRIALS, SEED, InterferenceMode::Mean).unwrap();
    run_sweep(cfg, &preset("fig1", Some(plan), range).unwrap()).unwrap()
}

fn fig3() -> SweepOutcome {
    let plan = TrialPlan::new(100_000, SEED, InterferenceMode::Instantaneous).unwrap();
    run_sweep(
        &SystemConfig::default(),
        &preset("fig3", Some(plan), None).unwrap(),
    )
    .unwrap()
}

fn criterion_4() -> Verdict {
    let mut v = Verdict::new("figure trends");
    let f1 = fig1_at(&SystemConfig::default(), None);
    v.check(
        f1.all_ok(),
        format!("fig1 preset computed ({} failed cells)", f1.failures.len()),
    );
    fig1_checks(&mut v, &f1.table, true);

    v.note(
        "fig1 preset over rho_c 100..150 dB with rho_r = 115 dB, where the outages leave 1:".into(),
    );
    let shifted = fig1_at(
        &SystemConfig::default().with_rho_r_db(115.0),
        Some((100.0, 150.0, 5.0)),
    );
    fig1_checks(&mut v, &shifted.table, false);

    let f3 = fig3();
    v.check(
        f3.all_ok(),
        format!("fig3 preset computed ({} failed cells)", f3.failures.len()),
    );
    let t = &f3.table;
    let series: Vec<(String, Vec<f64>)> = t
        .columns
        .iter()
        .filter(|c| c.starts_with("ergodic_reir_closed@"))
        .map(|c| (c.clone(), t.column(c).unwrap()))
        .collect();
    let labels: Vec<&str> = series
        .iter()
        .map(|s| s.0.trim_start_matches("ergodic_reir_closed@"))
        .collect();
    let ordered = (0..t.rows.len()).all(|i| series.windows(2).all(|w| w[0].1[i] > w[1].1[i]));
    v.check(
        series.len() == 3 && ordered,
        format!(
            "fig3 ordering {} at all {} rows",
            labels.join(" > "),
            t.rows.len()
        ),
    );
    let mc_ordered = (0..t.rows.len()).all(|i| {
        let s: Vec<f64> = labels
            .iter()
            .map(|l| t.column(&format!("ergodic_reir_monte_carlo@{l}")).unwrap()[i])
            .collect();
        s[0] > s[1] && s[1] > s[2]
    });
    v.note(format!(
        "same ordering in the monte carlo columns: {mc_ordered}"
    ));
    v
}

fn criterion_5() -> Verdict {
    let mut v = Verdict::new("diversity slope");
    let q = QuadratureSpec::default();
    let base = SystemConfig::default();
    let target = base.delta_duty / (2.0 * base.t_pulse);
    let powers = |lo: f64, hi: f64| -> Vec<f64> {
        semi_isac_cli::sweep::grid(lo, hi, 2.5)
            .unwrap()
            .iter()
            .map(|r| base.power_from_rho_db(*r))
            .collect()
    };
    let mut slopes = Vec::new();
    for d_r in [800.0, 1300.0] {
        let cfg = SystemConfig { d_r, ..base };
        let s = diversity_slope(&cfg, &powers(260.0, 300.0), &q).unwrap();
        let d = rel(s, target);
        v.check(
            d < 0.05,
            format!("d_r={d_r}m: slope {s:.1} bit/s per doubling vs {target:.1} (rel {d:.2e})"),
        );
        let low = diversity_slope(&cfg, &powers(200.0, 240.0), &q).unwrap();
        v.note(format!("d_r={d_r}m: slope over 230..240 dB is {low:.1}"));
        slopes.push(s);
    }
    let d = rel(slopes[1], slopes[0]);
    v.check(
        d < 0.05,
        format!("slope change from d_r 800 to 1300 m: {d:.2e}"),
    );
    v.note("slopes use the top decade of a 260..300 dB grid of rho_bs".into());
    v
}

fn bits(t: &ResultTable) -> Vec<u64> {
    t.rows.iter().flatten().map(|x| x.to_bits()).collect()
}

fn criterion_6() -> Verdict {
    let mut v = Verdict::new("determinism");
    let cfg = SystemConfig::default()
        .with_rho_r_db(115.0)
        .with_rho_c_db(120.0)
        .with_rho_bs_db(200.0);
    let sims = |w: Workers| {
        let mean = plan(InterferenceMode::Mean).with_workers(w);
        let inst = plan(InterferenceMode::Instantaneous).with_workers(w);
        let e = [
            simulate_outage_comm_tx(&cfg, &mean).unwrap(),
            simulate_outage_radar_comm(&cfg, &mean).unwrap(),
            simulate_ergodic_reir(&cfg, &inst).unwrap(),
        ];
        e.iter()
            .flat_map(|x| [x.estimate, x.std_error, x.ci95_low, x.ci95_high])
            .map(f64::to_bits)
            .collect::<Vec<_>>()
    };
    let reference = sims(Workers::Ambient);
    v.check(
        reference == sims(Workers::Ambient),
        "1e6-trial estimates repeat bit for bit".into(),
    );
    for n in [1, 2, 5, 16] {
        v.check(
            reference == sims(Workers::Fixed(n)),
            format!("{n} worker(s) match the ambient pool"),
        );
    }
    let a = bits(&fig3().table);
    v.check(
        a == bits(&fig3().table),
        "fig3 preset table repeats bit for bit".into(),
    );
    v
}

fn criterion_7() -> Verdict {
    let mut v = Verdict::new("no shared band limit");
    let cfg = SystemConfig {
        beta_semi: 0.0,
        ..SystemConfig::default()
    }
    .with_rho_bs_db(250.0);
    let k = DerivedConstants::new(&cfg).unwrap();
    let e_td = time_delay_energy(cfg.beta_semi, cfg.bandwidth_b, cfg.sigma_tau);
    v.check(
        e_td == 0.0 && k.e_td == 0.0,
        format!("time-delay energy {e_td}"),
    );
    let i_r = mean_radar_interference(&cfg).unwrap();
    v.check(
        i_r == 0.0 && k.a1 == 0.0 && k.a4 == 0.0,
        format!("mean radar interference {i_r}"),
    );
    let q = QuadratureSpec::default();
    let rates = [
        ergodic_reir_quadrature(&cfg, &q).unwrap().rate,
        ergodic_reir(&cfg, Route::Closed, &q).unwrap().rate,
        simulate_ergodic_reir(&cfg, &plan(InterferenceMode::Instantaneous))
            .unwrap()
            .estimate,
    ];
    v.check(
        rates == [0.0; 3],
        format!("ergodic REIR (quadrature, series, monte carlo) = {rates:?}"),
    );

    // With no radar interference the instantaneous and averaged models
    // coincide, so both simulation modes must hit the same closed form.
    for (rc, rr) in [(110.0, 115.0), (125.0, 130.0), (135.0, 115.0)] {
        let c = cfg.with_rho_c_db(rc).with_rho_r_db(rr);
        let k = DerivedConstants::new(&c).unwrap();
        let closed = [
            outage_comm_tx_closed(&k, &c).unwrap().probability,
            outage_radar_comm_closed(&k, &c).unwrap().probability,
        ];
        for mode in [InterferenceMode::Mean, InterferenceMode::Instantaneous] {
            let p = plan(mode);
            let mc = [
                simulate_outage_comm_tx(&c, &p).unwrap(),
                simulate_outage_radar_comm(&c, &p).unwrap(),
            ];
            let s = [
                binomial_sigmas(closed[0], &mc[0]),
                binomial_sigmas(closed[1], &mc[1]),
            ];
            v.check(
                s[0] < 3.0 && s[1] < 3.0,
                format!(
                    "rho_c={rc} rho_r={rr} {mode}: outages {:.4e}, {:.4e} vs simulated ({:.2}, {:.2} SE)",
                    closed[0], closed[1], s[0], s[1]
                ),
            );
        }
    }
    v
}

fn main() {
    let criteria: [(u32, fn() -> Verdict); 7] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
    ];
    let mut failed = Vec::new();
    for (n, run) in criteria {
        let start = Instant::now();
        let v = run();
        let expected = EXPECTED_FAILURES.contains(&n);
        println!(
            "criterion {n}: {} {} ({:.1}s){}",
            if v.passed { "PASS" } else { "FAIL" },
            v.summary,
            start.elapsed().as_secs_f64(),
            if expected && !v.passed {
                " [expected failure]"
            } else {
                ""
            }
        );
        for d in &v.details {
            println!("    {d}");
        }
        if !v.passed {
            failed.push(n);
        }
    }
    let unexpected: Vec<u32> = failed
        .iter()
        .copied()
        .filter(|n| !EXPECTED_FAILURES.contains(n))
        .collect();
    let fixed: Vec<u32> = EXPECTED_FAILURES
        .iter()
        .copied()
        .filter(|n| !failed.contains(n))
        .collect();
    println!(
        "acceptance: {} of 7 criteria passed; failed {failed:?}, expected to fail {EXPECTED_FAILURES:?}",
        7 - failed.len()
    );
    if !unexpected.is_empty() || !fixed.is_empty() {
        println!("acceptance: unexpected failures {unexpected:?}, unexpected passes {fixed:?}");
        std::process::exit(1);
    }
}
