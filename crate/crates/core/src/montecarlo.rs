//! Monte Carlo null distributions of the laboratory-effect statistics.
//!
//! One replicate draws `M` independent count vectors from `MN(n; p)`,
//! assembles the table and evaluates the configured statistic. Replicate
//! `i` uses the stream [`Xoshiro256StarStar::for_replicate`]`(seed, i)`, so
//! the sorted result is identical however the replicates are spread over
//! worker threads.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{ContingencyTable, ProbabilityVector};
use crate::rng::{SplitMix64, Xoshiro256StarStar};
use crate::special::normal_cdf;
use crate::statistics::{statistic_ip, weighted_form, DofConvention};
use crate::variation::decompose;

pub const DEFAULT_DRAWS: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum McError {
    #[error("invalid simulation config: {0}")]
    Config(String),
    #[error("empty distribution")]
    Empty,
    #[error("tail probability {0} outside (0, 1)")]
    Alpha(f64),
    #[error("thread pool: {0}")]
    Pool(String),
}

/// Statistic evaluated on each simulated table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimStatistic {
    /// Ratio statistic `I_(P)`; tables without variation give `+inf`.
    Ip,
    /// Weighted-count `I_(N)` with the squared cumulative term at the
    /// simulation's null probabilities. Its null moments are exactly the
    /// `mu` and `sigma2` of [`crate::approx::normal_params`].
    In,
    /// `I_(N) = h2_W + S2_B` computed from each table alone (plug-in
    /// cumulative frequencies). Bounded by one.
    InPlugin,
    /// Between-laboratory variation `S2_B`.
    S2b,
}

impl SimStatistic {
    pub fn name(self) -> &'static str {
        match self {
            Self::Ip => "ip",
            Self::In => "in",
            Self::InPlugin => "in-plugin",
            Self::S2b => "s2b",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub labs: usize,
    pub reps_per_lab: u64,
    pub probs: ProbabilityVector<f64>,
    pub draws: usize,
    pub seed: u64,
    pub statistic: SimStatistic,
    pub dof: DofConvention,
}

impl SimConfig {
    pub fn new(probs: ProbabilityVector<f64>, labs: usize, reps_per_lab: u64, statistic: SimStatistic) -> Self {
        Self { labs, reps_per_lab, probs, draws: DEFAULT_DRAWS, seed: 0, statistic, dof: DofConvention::Consistent }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_draws(mut self, draws: usize) -> Self {
        self.draws = draws;
        self
    }

    pub fn with_dof(mut self, dof: DofConvention) -> Self {
        self.dof = dof;
        self
    }

    pub fn validate(&self) -> Result<(), McError> {
        if self.draws < 1 {
            return Err(McError::Config("draws must be at least 1".into()));
        }
        if self.labs < 2 {
            return Err(McError::Config(format!("need at least 2 labs, got {}", self.labs)));
        }
        if self.reps_per_lab < 1 {
            return Err(McError::Config("need at least 1 result per lab".into()));
        }
        Ok(())
    }
}

/// Sorted Monte Carlo sample of a statistic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McDistribution {
    pub values: Vec<f64>,
    pub config: SimConfig,
}

/// Draws one multinomial count vector into `out` by inverse CDF: each of the
/// `n` observations lands in the smallest category `k` with `u < F_k`.
pub fn sample_multinomial(rng: &mut Xoshiro256StarStar, n: u64, p: &ProbabilityVector<f64>, out: &mut [u64]) {
    debug_assert_eq!(out.len(), p.categories());
    out.fill(0);
    let cumulative = p.cumulative();
    let last = cumulative.len() - 1;
    for _ in 0..n {
        let u = rng.next_f64();
        let k = cumulative.iter().position(|&f| u < f).unwrap_or(last);
        out[k] += 1;
    }
}

fn replicate(config: &SimConfig, index: u64) -> f64 {
    let k = config.probs.categories();
    let mut rng = Xoshiro256StarStar::for_replicate(config.seed, index);
    let mut counts = vec![0u64; config.labs * k];
    for row in counts.chunks_mut(k) {
        sample_multinomial(&mut rng, config.reps_per_lab, &config.probs, row);
    }
    match config.statistic {
        SimStatistic::In => {
            let weighted: u64 = counts
                .chunks(k)
                .map(|row| row[..k - 1].iter().enumerate().map(|(i, &c)| (k - 1 - i) as u64 * c).sum::<u64>())
                .sum();
            weighted_form(weighted, config.labs, config.reps_per_lab, &config.probs)
        }
        stat => {
            let table =
                ContingencyTable::from_flat_unchecked(vec![String::new(); config.labs], counts, k, config.reps_per_lab);
            match stat {
                SimStatistic::Ip => statistic_ip::<f64>(&table, config.dof).unwrap_or(f64::INFINITY),
                SimStatistic::InPlugin => {
                    let d = decompose::<f64>(&table);
                    d.h2_within + d.s2_between
                }
                SimStatistic::S2b => decompose::<f64>(&table).s2_between,
                SimStatistic::In => unreachable!(),
            }
        }
    }
}

/// Seed for the `stream`-th of several related simulations sharing one base
/// seed, e.g. the cells of a reproduction grid.
pub fn stream_seed(base: u64, stream: u64) -> u64 {
    SplitMix64::new(base ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)).next_u64()
}

/// Simulates the configured null distribution on the current rayon pool.
pub fn simulate_distribution(config: &SimConfig) -> Result<McDistribution, McError> {
    config.validate()?;
    let mut values: Vec<f64> = (0..config.draws as u64).into_par_iter().map(|i| replicate(config, i)).collect();
    values.sort_by(f64::total_cmp);
    Ok(McDistribution { values, config: config.clone() })
}

/// Same as [`simulate_distribution`] on a dedicated pool of `workers`
/// threads. The result does not depend on `workers`.
pub fn simulate_with_workers(config: &SimConfig, workers: usize) -> Result<McDistribution, McError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| McError::Pool(e.to_string()))?;
    pool.install(|| simulate_distribution(config))
}

impl McDistribution {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The `ceil(alpha * N)`-th largest draw.
    pub fn upper_percentile(&self, alpha: f64) -> Result<f64, McError> {
        upper_percentile(&self.values, alpha)
    }

    /// Fraction of draws `>= threshold`.
    pub fn tail_fraction(&self, threshold: f64) -> f64 {
        tail_fraction(&self.values, threshold)
    }

    pub fn ecdf_rows(&self) -> Vec<(f64, f64)> {
        ecdf_rows(&self.values)
    }

    /// Number of `+inf` draws (`I_(P)` on tables without variation).
    pub fn infinite_draws(&self) -> usize {
        self.values.iter().filter(|v| v.is_infinite()).count()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Population variance `1/N sum (x - mean)^2`.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / self.values.len() as f64
    }

    /// Kolmogorov-Smirnov distance to `N(mean, variance)`.
    pub fn ks_distance_normal(&self, mean: f64, variance: f64) -> f64 {
        ks_distance(&self.values, |x| normal_cdf(x, mean, variance))
    }

    /// Writes `value,cumulative_fraction` CSV.
    pub fn write_ecdf_csv<W: Write>(&self, out: W) -> io::Result<()> {
        write_ecdf_csv(&self.values, out)
    }
}

/// `ceil(alpha * N)`-th largest of ascending `sorted`.
pub fn upper_percentile(sorted: &[f64], alpha: f64) -> Result<f64, McError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(McError::Alpha(alpha));
    }
    if sorted.is_empty() {
        return Err(McError::Empty);
    }
    let n = sorted.len();
    let raw = alpha * n as f64;
    // alpha * N is often an integer spoiled by rounding (0.05 * 300)
    let rank = if (raw - raw.round()).abs() < 1e-9 { raw.round() } else { raw.ceil() };
    let rank = (rank as usize).clamp(1, n);
    Ok(sorted[n - rank])
}

pub fn tail_fraction(values: &[f64], threshold: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().filter(|&&v| v >= threshold).count() as f64 / values.len() as f64
}

/// One `(value, cumulative fraction)` row per distinct value of ascending
/// `sorted`.
pub fn ecdf_rows(sorted: &[f64]) -> Vec<(f64, f64)> {
    let n = sorted.len() as f64;
    let mut rows: Vec<(f64, f64)> = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        let frac = (i + 1) as f64 / n;
        match rows.last_mut() {
            Some(last) if last.0 == v => last.1 = frac,
            _ => rows.push((v, frac)),
        }
    }
    rows
}

/// Two-sided KS distance between ascending `sorted` and a continuous CDF.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut worst: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == v {
            j += 1;
        }
        let f = cdf(v);
        worst = worst.max((f - i as f64 / n).abs()).max((j as f64 / n - f).abs());
        i = j;
    }
    worst
}

pub fn write_ecdf_csv<W: Write>(sorted: &[f64], mut out: W) -> io::Result<()> {
    writeln!(out, "value,cumulative_fraction")?;
    for (v, f) in ecdf_rows(sorted) {
        writeln!(out, "{v},{f}")?;
    }
    Ok(())
}
