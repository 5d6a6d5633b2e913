//! Decision procedures for laboratory effects.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approx::{critical_value, normal_params, ApproxError};
use crate::ingest::{pooled_probabilities, ContingencyTable, ProbabilityVector};
use crate::montecarlo::{simulate_distribution, McError, SimConfig, SimStatistic};
use crate::special::{chi2_quantile, SpecialError};
use crate::statistics::{statistic_in, statistic_in_at_null, statistic_ip, DofConvention, StatisticError};
use crate::variation::decompose;

/// Smallest accepted bootstrap size.
pub const MIN_BOOTSTRAP_REPS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecideError {
    #[error("significance level {0} outside (0, 1)")]
    Alpha(f64),
    #[error("χ² approximation defined only for K=2 (table has K={0})")]
    NotBinary(usize),
    #[error("bootstrap needs at least {MIN_BOOTSTRAP_REPS} replicates, got {0}")]
    TooFewReps(usize),
    #[error(transparent)]
    Statistic(#[from] StatisticError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    MonteCarlo(#[from] McError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Reject,
    NoReject,
    Doubt,
    Degenerate,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Reject => "reject",
            Self::NoReject => "no-reject",
            Self::Doubt => "doubt",
            Self::Degenerate => "degenerate",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub statistic: f64,
    pub method: String,
    /// One critical value, or the pair `(1, 3)` for the heuristic rule.
    pub thresholds: Vec<f64>,
    pub alpha: Option<f64>,
    pub decision: Decision,
    pub notes: Vec<String>,
}

fn check_alpha(alpha: f64) -> Result<(), DecideError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(DecideError::Alpha(alpha))
    }
}

/// Normal-approximation test on `I_(N)`.
///
/// Without an explicit `null` the pooled table probabilities are plugged in.
/// The plug-in mean then equals the observed `I_(N)` exactly, so this
/// variant can never reject; the outcome says so in its notes.
pub fn test_in(
    table: &ContingencyTable,
    alpha: f64,
    null: Option<&ProbabilityVector<f64>>,
) -> Result<TestOutcome, DecideError> {
    check_alpha(alpha)?;
    let statistic = statistic_in::<f64>(table);
    let pooled;
    let (null, plug_in) = match null {
        Some(p) => {
            if p.categories() != table.categories() {
                return Err(StatisticError::CategoryMismatch { null: p.categories(), table: table.categories() }.into());
            }
            (p, false)
        }
        None => {
            pooled = pooled_probabilities::<f64>(table);
            (&pooled, true)
        }
    };
    let approx = normal_params(null, table.reps(), table.labs());
    let mut notes = Vec::new();
    let mut outcome = TestOutcome {
        statistic,
        method: if plug_in { "normal-approx-pooled-null" } else { "normal-approx-fixed-null" }.to_string(),
        thresholds: Vec::new(),
        alpha: Some(alpha),
        decision: Decision::Degenerate,
        notes: Vec::new(),
    };
    match critical_value(&approx, alpha) {
        Ok(threshold) => {
            outcome.thresholds.push(threshold);
            outcome.decision = if statistic > threshold { Decision::Reject } else { Decision::NoReject };
        }
        Err(ApproxError::DegenerateNull) => {
            notes.push("null distribution puts all mass in one category; sigma2 = 0".to_string());
        }
        Err(ApproxError::Special(e)) => return Err(e.into()),
    }
    if plug_in {
        notes.push(format!(
            "pooled plug-in null: mu = {:.6} equals the observed I_(N), so this test cannot reject; \
             use a fixed null or the bootstrap on S2_B to detect laboratory effects",
            approx.mu
        ));
    } else {
        let centered = statistic_in_at_null(table, null)?;
        notes.push(format!("weighted-count I_(N) centred at the fixed null: {centered:.6}"));
    }
    outcome.notes = notes;
    Ok(outcome)
}

/// Heuristic rule: reject above 3, no-reject at or below 1, doubt between.
pub fn constant3_decision(value: f64) -> Decision {
    if value > 3.0 {
        Decision::Reject
    } else if value <= 1.0 {
        Decision::NoReject
    } else {
        Decision::Doubt
    }
}

pub fn test_ip_constant3(table: &ContingencyTable, dof: DofConvention) -> Result<TestOutcome, DecideError> {
    let statistic = statistic_ip::<f64>(table, dof)?;
    Ok(TestOutcome {
        statistic,
        method: format!("ip-constant-3 ({} dof)", dof.name()),
        thresholds: vec![1.0, 3.0],
        alpha: None,
        decision: constant3_decision(statistic),
        notes: Vec::new(),
    })
}

/// `chi2_{M-1} / (M-1)` reference for `I_(P)` with two categories.
pub fn chi2_threshold(labs: usize, alpha: f64) -> Result<f64, DecideError> {
    check_alpha(alpha)?;
    let df = labs as u64 - 1;
    Ok(chi2_quantile(df, 1.0 - alpha)? / df as f64)
}

pub fn test_ip_chi2(table: &ContingencyTable, alpha: f64) -> Result<TestOutcome, DecideError> {
    if table.categories() != 2 {
        return Err(DecideError::NotBinary(table.categories()));
    }
    let threshold = chi2_threshold(table.labs(), alpha)?;
    let statistic = statistic_ip::<f64>(table, DofConvention::Consistent)?;
    Ok(TestOutcome {
        statistic,
        method: "ip-chi2".to_string(),
        thresholds: vec![threshold],
        alpha: Some(alpha),
        decision: if statistic > threshold { Decision::Reject } else { Decision::NoReject },
        notes: Vec::new(),
    })
}

/// Add-one Monte Carlo p-value `(1 + #{draws >= observed}) / (N + 1)`.
///
/// Draws within `1e-12` (relative) of `observed` count as ties.
pub fn pvalue_from_draws(observed: f64, draws: &[f64]) -> f64 {
    let cutoff = observed - 1e-12 * observed.abs().max(1.0);
    let hits = draws.iter().filter(|&&d| d >= cutoff).count();
    (1 + hits) as f64 / (draws.len() + 1) as f64
}

/// Observed value of a simulation statistic on a real table.
pub fn observed_statistic(table: &ContingencyTable, statistic: SimStatistic) -> Result<f64, DecideError> {
    Ok(match statistic {
        SimStatistic::Ip => statistic_ip::<f64>(table, DofConvention::Consistent)?,
        SimStatistic::In => statistic_in_at_null(table, &pooled_probabilities::<f64>(table))?,
        SimStatistic::InPlugin => statistic_in::<f64>(table),
        SimStatistic::S2b => decompose::<f64>(table).s2_between,
    })
}

/// Parametric-bootstrap p-value under the pooled null `MN(n; p_hat)`.
pub fn mc_pvalue(
    table: &ContingencyTable,
    statistic: SimStatistic,
    reps: usize,
    seed: u64,
) -> Result<f64, DecideError> {
    if reps < MIN_BOOTSTRAP_REPS {
        return Err(DecideError::TooFewReps(reps));
    }
    let pooled = pooled_probabilities::<f64>(table);
    if pooled.is_degenerate() {
        // every bootstrap table equals the observed one
        return Ok(1.0);
    }
    let observed = observed_statistic(table, statistic)?;
    let config = SimConfig::new(pooled, table.labs(), table.reps(), statistic).with_draws(reps).with_seed(seed);
    let dist = simulate_distribution(&config)?;
    Ok(pvalue_from_draws(observed, &dist.values))
}
