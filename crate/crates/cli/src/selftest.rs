//! Three-way agreement at a reduced trial count: closed forms against their
//! integrals and both against Monte Carlo.

use semi_isac_core::analytic::{
    ergodic_reir, ergodic_reir_quadrature, outage_comm_tx_closed, outage_comm_tx_integral,
    outage_radar_comm_closed, outage_radar_comm_integral, Route,
};
use semi_isac_core::montecarlo::{
    simulate_ergodic_reir, simulate_outage_comm_tx, simulate_outage_radar_comm,
};
use semi_isac_core::{
    DerivedConstants, EstimateWithCI, FadingSpec, InterferenceMode, QuadratureSpec, SystemConfig,
    TrialPlan, Workers,
};

use crate::CliError;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        ((a - b) / b).abs()
    }
}

/// |estimate − p| in binomial standard errors at `p`.
fn binomial_sigmas(p: f64, est: &EstimateWithCI) -> f64 {
    let se = (p * (1.0 - p) / est.n_trials as f64).sqrt();
    match (se > 0.0, est.estimate == p) {
        (true, _) => (est.estimate - p).abs() / se,
        (false, true) => 0.0,
        (false, false) => f64::INFINITY,
    }
}

fn check(name: String, passed: bool, detail: String) -> Check {
    Check {
        name,
        passed,
        detail,
    }
}

pub fn run_selftest(trials: u64, seed: u64, workers: Workers) -> Result<Vec<Check>, CliError> {
    let quad = QuadratureSpec::new(1e-12, 1e-300, 4000)?;
    let outage_plan = TrialPlan::new(trials, seed, InterferenceMode::Mean)?.with_workers(workers);
    let rate_plan = TrialPlan {
        interference_mode: InterferenceMode::Instantaneous,
        ..outage_plan
    };
    let mut checks = Vec::new();

    for m in [1.0, 2.0, 3.0] {
        for (rc, rr) in [(110.0, 115.0), (125.0, 130.0)] {
            let cfg = SystemConfig {
                fading: FadingSpec { m },
                ..SystemConfig::default()
            }
            .with_rho_c_db(rc)
            .with_rho_r_db(rr);
            let k = DerivedConstants::new(&cfg)?;
            let tag = format!("m={m} rho_c={rc}dB rho_r={rr}dB");

            let pairs = [
                (
                    "outage_comm_tx",
                    outage_comm_tx_closed(&k, &cfg)?.probability,
                    outage_comm_tx_integral(&k, &cfg, &quad)?.probability,
                    simulate_outage_comm_tx(&cfg, &outage_plan)?,
                ),
                (
                    "outage_radar_comm",
                    outage_radar_comm_closed(&k, &cfg)?.probability,
                    outage_radar_comm_integral(&k, &cfg, &quad)?.probability,
                    simulate_outage_radar_comm(&cfg, &outage_plan)?,
                ),
            ];
            for (metric, closed, integral, sim) in pairs {
                let r = rel(closed, integral);
                checks.push(check(
                    format!("{metric} closed vs integral, {tag}"),
                    r < 1e-8,
                    format!("{closed:.10e} vs {integral:.10e} (rel {r:.1e})"),
                ));
                let s = binomial_sigmas(closed, &sim);
                checks.push(check(
                    format!("{metric} closed vs monte carlo, {tag}"),
                    s < 3.0,
                    format!("{closed:.6e} vs {:.6e} ({s:.2} sigma)", sim.estimate),
                ));
            }
        }
    }

    for m in [1.0, 3.0] {
        for rho_bs in [60.0, 200.0] {
            let cfg = SystemConfig {
                fading: FadingSpec { m },
                ..SystemConfig::default()
            }
            .with_rho_bs_db(rho_bs);
            let tag = format!("m={m} rho_bs={rho_bs}dB");
            let q = ergodic_reir_quadrature(&cfg, &quad)?.rate;
            let c = ergodic_reir(&cfg, Route::Closed, &quad)?.rate;
            let sim = simulate_ergodic_reir(&cfg, &rate_plan)?;
            checks.push(check(
                format!("ergodic_reir closed vs integral, {tag}"),
                rel(c, q) < 1e-6,
                format!("{c:.10e} vs {q:.10e}"),
            ));
            let s = (sim.estimate - q).abs() / sim.std_error;
            checks.push(check(
                format!("ergodic_reir integral vs monte carlo, {tag}"),
                s < 3.0,
                format!("{q:.6e} vs {:.6e} ({s:.2} standard errors)", sim.estimate),
            ));
        }
    }
    Ok(checks)
}
