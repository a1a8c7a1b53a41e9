//! Streaming accumulators and interval estimates.

use serde::Serialize;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Point estimate with a standard error and a 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateWithCI {
    pub estimate: f64,
    pub std_error: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub n_trials: u64,
}

impl EstimateWithCI {
    /// Binomial proportion with a Wilson score interval, which stays
    /// sensible for proportions near 0 or 1.
    pub fn from_counts(hits: u64, n: u64) -> Self {
        let nf = n as f64;
        let p = hits as f64 / nf;
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / nf;
        let centre = (p + z2 / (2.0 * nf)) / denom;
        let half = Z95 / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
        Self {
            estimate: p,
            std_error: (p * (1.0 - p) / nf).sqrt(),
            ci95_low: (centre - half).max(0.0).min(p),
            ci95_high: (centre + half).min(1.0).max(p),
            n_trials: n,
        }
    }

    /// Sample mean with a CLT interval.
    pub fn from_moments(m: &Moments) -> Self {
        let se = (m.variance() / m.n as f64).sqrt();
        Self {
            estimate: m.mean,
            std_error: se,
            ci95_low: m.mean - Z95 * se,
            ci95_high: m.mean + Z95 * se,
            n_trials: m.n,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.ci95_low <= x && x <= self.ci95_high
    }
}

/// Welford running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Chan et al. pairwise combination. Not commutative in floating point,
    /// so callers merge in a fixed order.
    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        self.mean += d * w;
        self.m2 += other.m2 + d * d * self.n as f64 * w;
        self.n = n;
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }
}

/// Fixed-bin histogram over `[lo, hi)` with out-of-range tallies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub below: u64,
    pub above: u64,
    pub mean: f64,
    pub n: u64,
}

impl Histogram {
    pub fn empty(lo: f64, hi: f64, bins: usize) -> Self {
        let w = (hi - lo) / bins as f64;
        Self {
            edges: (0..=bins).map(|i| lo + w * i as f64).collect(),
            counts: vec![0; bins],
            below: 0,
            above: 0,
            mean: 0.0,
            n: 0,
        }
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        let lo = self.edges[0];
        let hi = self.edges[self.edges.len() - 1];
        if x < lo {
            self.below += 1;
        } else if x >= hi {
            self.above += 1;
        } else {
            let bins = self.counts.len();
            let i = (((x - lo) / (hi - lo)) * bins as f64) as usize;
            self.counts[i.min(bins - 1)] += 1;
        }
    }

    /// Adds `other`'s tallies; `mean` and `n` are maintained by the caller.
    pub fn merge_counts(&mut self, other: &Histogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.below += other.below;
        self.above += other.above;
    }
}

/// Pearson χ² statistic of observed counts against expected counts.
/// Cells with zero expectation are skipped.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> f64 {
    observed
        .iter()
        .zip(expected)
        .filter(|(_, e)| **e > 0.0)
        .map(|(o, e)| (*o as f64 - e).powi(2) / e)
        .sum()
}

/// Largest gap between the empirical CDF of `sorted` and a reference CDF
/// known only at `points` (ascending) with values `cdf`. Both one-sided
/// limits of the empirical CDF are compared at each point.
///
/// The supremum over all x is at most this value plus the largest
/// increment of `cdf` between neighbouring points.
pub fn ks_distance_on_grid(sorted: &[f64], points: &[f64], cdf: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (x, f) in points.iter().zip(cdf) {
        let below = sorted.partition_point(|s| s < x) as f64 / n;
        let at_or_below = sorted.partition_point(|s| s <= x) as f64 / n;
        d = d.max((below - f).abs()).max((at_or_below - f).abs());
    }
    d
}
