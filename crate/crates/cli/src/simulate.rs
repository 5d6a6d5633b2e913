use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use ordanova::{simulate_distribution, DofConvention, McDistribution, ProbabilityVector, SimConfig, SimStatistic};
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimSummary {
    pub statistic: SimStatistic,
    pub probs: Vec<f64>,
    pub labs: usize,
    pub reps_per_lab: u64,
    pub draws: usize,
    pub seed: u64,
    pub dof: DofConvention,
    pub mean: Option<f64>,
    pub variance: Option<f64>,
    pub upper_5_percent: f64,
    /// `I_(P)` only.
    pub tail_at_least_3: Option<f64>,
    pub infinite_draws: usize,
}

pub fn parse_probs(text: &str) -> Result<ProbabilityVector<f64>, CliError> {
    ProbabilityVector::<f64>::parse(text).map_err(|e| CliError::Input(format!("--probs: {e}")))
}

pub fn run(config: &SimConfig) -> Result<McDistribution, CliError> {
    Ok(simulate_distribution(config)?)
}

pub fn summarize(d: &McDistribution) -> Result<SimSummary, CliError> {
    let c = &d.config;
    let infinite = d.infinite_draws();
    // I_(P) on a table without variation is +inf; moments would be meaningless
    let finite = infinite == 0;
    Ok(SimSummary {
        statistic: c.statistic,
        probs: c.probs.probs().to_vec(),
        labs: c.labs,
        reps_per_lab: c.reps_per_lab,
        draws: c.draws,
        seed: c.seed,
        dof: c.dof,
        mean: finite.then(|| d.mean()),
        variance: finite.then(|| d.variance()),
        upper_5_percent: d.upper_percentile(0.05)?,
        tail_at_least_3: (c.statistic == SimStatistic::Ip).then(|| d.tail_fraction(3.0)),
        infinite_draws: infinite,
    })
}

pub fn write_ecdf(d: &McDistribution, path: &Path) -> Result<(), CliError> {
    let wrap = |source| CliError::Write { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(wrap)?;
    d.write_ecdf_csv(BufWriter::new(file)).map_err(wrap)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.6}"))
}

pub fn render_text(s: &SimSummary) -> String {
    let mut out = String::new();
    let probs = s.probs.iter().map(|p| format!("{p:.6}")).collect::<Vec<_>>().join(", ");
    let _ = writeln!(out, "statistic {} under MN({}; {probs})", s.statistic.name(), s.reps_per_lab);
    let _ = writeln!(out, "labs {}, draws {}, seed {}", s.labs, s.draws, s.seed);
    if s.statistic == SimStatistic::Ip {
        let _ = writeln!(out, "dof convention {}", s.dof.name());
    }
    let _ = writeln!(out, "mean                {}", opt(s.mean));
    let _ = writeln!(out, "variance            {}", opt(s.variance));
    let _ = writeln!(out, "upper 5% point      {:.6}", s.upper_5_percent);
    if let Some(t) = s.tail_at_least_3 {
        let _ = writeln!(out, "fraction >= 3       {:.4}%", 100.0 * t);
    }
    if s.infinite_draws > 0 {
        let _ = writeln!(out, "draws without variation (+inf): {}", s.infinite_draws);
    }
    out
}
