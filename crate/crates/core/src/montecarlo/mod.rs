//! Seeded Monte Carlo estimation of the outage probabilities and the
//! ergodic REIR.
//!
//! Trials are grouped in fixed-size blocks. Block `b` draws from
//! `ChaCha8(base_seed)` on stream `b`, and every trial consumes its four
//! fading gains in the same order, so a block's output does not depend on
//! which thread runs it. Block results are merged in block order, which
//! makes every estimate bit-identical for any worker count.

mod stats;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::reir_instant;
use crate::channel::PowerGainSampler;
use crate::linkbudget::{
    sinr_comm_tx, sinr_radar_comm, snr_radar_echo, ChannelRealization, InterferenceMode,
    LinkBudget, SystemConfig,
};
use crate::{Error, Result};

pub use stats::{chi_square, ks_distance_on_grid, EstimateWithCI, Histogram, Moments, Z95};

/// Trials per RNG stream.
pub const BLOCK_TRIALS: u64 = 8192;

/// How many threads run the blocks. Has no effect on the numbers produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Workers {
    /// The global rayon pool.
    #[default]
    Ambient,
    /// A dedicated pool of this many threads; 1 runs on the calling thread.
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialPlan {
    pub n_trials: u64,
    pub base_seed: u64,
    pub workers: Workers,
    pub interference_mode: InterferenceMode,
}

impl TrialPlan {
    pub fn new(n_trials: u64, base_seed: u64, interference_mode: InterferenceMode) -> Result<Self> {
        if n_trials == 0 {
            return Err(Error::EmptyPlan);
        }
        Ok(Self {
            n_trials,
            base_seed,
            workers: Workers::Ambient,
            interference_mode,
        })
    }

    pub fn with_workers(self, workers: Workers) -> Self {
        Self { workers, ..self }
    }

    fn blocks(&self) -> u64 {
        self.n_trials.div_ceil(BLOCK_TRIALS)
    }

    fn block_len(&self, block: u64) -> u64 {
        BLOCK_TRIALS.min(self.n_trials - block * BLOCK_TRIALS)
    }
}

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Draws one realization; the draw order is part of the reproducibility
/// contract.
#[inline]
fn draw(sampler: &PowerGainSampler, rng: &mut ChaCha8Rng) -> ChannelRealization {
    let g_c_link = sampler.sample(rng);
    let g_r_link = sampler.sample(rng);
    let g_rd = sampler.sample(rng);
    let g_ru = sampler.sample(rng);
    ChannelRealization {
        g_c_link,
        g_r_link,
        g_rd,
        g_ru,
    }
}

/// Runs `f` on every block and returns the per-block results in block order.
fn run_blocks<A, F>(plan: &TrialPlan, f: F) -> Result<Vec<A>>
where
    A: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> A + Sync,
{
    if plan.n_trials == 0 {
        return Err(Error::EmptyPlan);
    }
    let job = |b: u64| f(&mut block_rng(plan.base_seed, b), plan.block_len(b));

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let par = || (0..plan.blocks()).into_par_iter().map(job).collect();
        match plan.workers {
            Workers::Fixed(0) => Err(Error::InvalidConfig("worker count must be >= 1".into())),
            Workers::Fixed(1) => Ok((0..plan.blocks()).map(job).collect()),
            Workers::Ambient => Ok(par()),
            Workers::Fixed(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
                Ok(pool.install(par))
            }
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        if plan.workers == Workers::Fixed(0) {
            return Err(Error::InvalidConfig("worker count must be >= 1".into()));
        }
        Ok((0..plan.blocks()).map(job).collect())
    }
}

fn count_events<P>(cfg: &SystemConfig, plan: &TrialPlan, event: P) -> Result<EstimateWithCI>
where
    P: Fn(&ChannelRealization, &LinkBudget) -> bool + Sync,
{
    let lb = LinkBudget::new(cfg)?;
    let sampler = cfg.fading.sampler();
    let hits = run_blocks(plan, |rng, n| {
        (0..n).filter(|_| event(&draw(&sampler, rng), &lb)).count() as u64
    })?;
    Ok(EstimateWithCI::from_counts(
        hits.iter().sum(),
        plan.n_trials,
    ))
}

/// Fraction of trials in which the transmitter's SINR is below `γ_th`.
pub fn simulate_outage_comm_tx(cfg: &SystemConfig, plan: &TrialPlan) -> Result<EstimateWithCI> {
    let (mode, th) = (plan.interference_mode, cfg.gamma_th);
    count_events(cfg, plan, |r, lb| sinr_comm_tx(r, lb, mode) < th)
}

/// Fraction of trials in which the radar target's uplink fails: SIC of the
/// transmitter fails, or the target's own SINR is below `γ_th`, on the same
/// realization.
pub fn simulate_outage_radar_comm(cfg: &SystemConfig, plan: &TrialPlan) -> Result<EstimateWithCI> {
    let (mode, sic, th) = (plan.interference_mode, cfg.gamma_sic, cfg.gamma_th);
    count_events(cfg, plan, |r, lb| {
        !(sinr_comm_tx(r, lb, mode) > sic && sinr_radar_comm(r, lb, mode) > th)
    })
}

/// Sample mean of the instantaneous REIR of the radar echo, bits/s.
pub fn simulate_ergodic_reir(cfg: &SystemConfig, plan: &TrialPlan) -> Result<EstimateWithCI> {
    let lb = LinkBudget::new(cfg)?;
    let sampler = cfg.fading.sampler();
    let blocks = run_blocks(plan, |rng, n| {
        let mut m = Moments::default();
        for _ in 0..n {
            m.push(reir_instant(snr_radar_echo(&draw(&sampler, rng), &lb), cfg));
        }
        m
    })?;
    let mut total = Moments::default();
    blocks.iter().for_each(|b| total.merge(b));
    Ok(EstimateWithCI::from_moments(&total))
}

/// Quantity tallied by [`empirical_distribution`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    GainComm,
    GainRadar,
    CascadedRadar,
    SinrComm,
    SinrRadar,
    EchoSnr,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramSpec {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

/// Fixed-bin histogram of one per-trial quantity, with its sample mean.
pub fn empirical_distribution(
    cfg: &SystemConfig,
    plan: &TrialPlan,
    which: Which,
    spec: HistogramSpec,
) -> Result<Histogram> {
    if plan.n_trials == 0 {
        return Err(Error::EmptyPlan);
    }
    if spec.bins == 0 || !(spec.hi > spec.lo) {
        return Err(Error::InvalidConfig(format!(
            "histogram needs bins >= 1 and hi > lo, got {spec:?}"
        )));
    }
    let lb = LinkBudget::new(cfg)?;
    let sampler = cfg.fading.sampler();
    let mode = plan.interference_mode;
    let value = |r: &ChannelRealization| match which {
        Which::GainComm => r.g_c_link,
        Which::GainRadar => r.g_r_link,
        Which::CascadedRadar => r.cascaded_radar(),
        Which::SinrComm => sinr_comm_tx(r, &lb, mode),
        Which::SinrRadar => sinr_radar_comm(r, &lb, mode),
        Which::EchoSnr => snr_radar_echo(r, &lb),
    };
    let blocks = run_blocks(plan, |rng, n| {
        let mut h = Histogram::empty(spec.lo, spec.hi, spec.bins);
        let mut m = Moments::default();
        for _ in 0..n {
            let x = value(&draw(&sampler, rng));
            h.push(x);
            m.push(x);
        }
        (h, m)
    })?;
    let mut hist = Histogram::empty(spec.lo, spec.hi, spec.bins);
    let mut moments = Moments::default();
    for (h, m) in &blocks {
        hist.merge_counts(h);
        moments.merge(m);
    }
    hist.mean = moments.mean;
    hist.n = moments.n;
    Ok(hist)
}

/// Raw per-trial samples of one quantity, in trial order.
pub fn sample_values(cfg: &SystemConfig, plan: &TrialPlan, which: Which) -> Result<Vec<f64>> {
    let lb = LinkBudget::new(cfg)?;
    let sampler = cfg.fading.sampler();
    let mode = plan.interference_mode;
    let blocks = run_blocks(plan, |rng, n| {
        (0..n)
            .map(|_| {
                let r = draw(&sampler, rng);
                match which {
                    Which::GainComm => r.g_c_link,
                    Which::GainRadar => r.g_r_link,
                    Which::CascadedRadar => r.cascaded_radar(),
                    Which::SinrComm => sinr_comm_tx(&r, &lb, mode),
                    Which::SinrRadar => sinr_radar_comm(&r, &lb, mode),
                    Which::EchoSnr => snr_radar_echo(&r, &lb),
                }
            })
            .collect::<Vec<f64>>()
    })?;
    Ok(blocks.concat())
}
