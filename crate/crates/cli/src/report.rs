//! Analysis report for one table: the decomposition, both statistics, the
//! normal approximation, the decision procedures and optional bootstrap
//! p-values.

use std::fmt::Write as _;

use ordanova::decide::{observed_statistic, test_ip_chi2, DecideError};
use ordanova::published;
use ordanova::{
    decompose, mc_pvalue, normal_params, pooled_probabilities, statistic_in, statistic_ip, test_in, test_ip_constant3,
    ContingencyTable, DofConvention, SimStatistic, StatisticError, TestOutcome,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const TOOL: &str = "ordanova";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub input: InputSummary,
    pub decomposition: DecompositionSummary,
    pub statistics: Statistics,
    pub approximation: Approximation,
    pub tests: Vec<TestOutcome>,
    pub monte_carlo: Option<MonteCarloSummary>,
    pub config: ConfigEcho,
    pub published: Option<PublishedComparison>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSummary {
    pub source: String,
    pub labs: usize,
    pub categories: usize,
    pub reps_per_lab: u64,
    pub labels: Vec<String>,
    pub column_totals: Vec<u64>,
    pub pooled_probabilities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionSummary {
    pub h2_total: f64,
    pub h2_within: f64,
    pub s2_between: f64,
    pub h2_within_by_lab: Vec<f64>,
    pub s2_between_by_cut: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statistics {
    /// `None` when the table has no ordinal variation.
    pub ip_consistent: Option<f64>,
    pub ip_paper_literal: Option<f64>,
    #[serde(rename = "in")]
    pub i_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Approximation {
    pub null: String,
    pub mu: f64,
    pub sigma2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub reps: usize,
    pub seed: u64,
    pub pvalues: Vec<McPvalue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McPvalue {
    pub statistic: SimStatistic,
    pub observed: f64,
    pub pvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub alpha: f64,
    pub dof: DofConvention,
    pub mc_reps: Option<usize>,
    pub seed: Option<u64>,
}

/// Values printed for the embedded examples next to ours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublishedComparison {
    pub published_in: f64,
    pub computed_in: f64,
    pub published_threshold: f64,
    pub computed_threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzeOptions {
    pub alpha: f64,
    pub dof: DofConvention,
    pub mc_reps: Option<usize>,
    pub seed: u64,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self { alpha: 0.05, dof: DofConvention::Consistent, mc_reps: None, seed: 0 }
    }
}

fn optional_ip(table: &ContingencyTable, dof: DofConvention) -> Option<f64> {
    match statistic_ip::<f64>(table, dof) {
        Ok(v) => Some(v),
        Err(StatisticError::NoVariation) => None,
        Err(e) => unreachable!("{e}"),
    }
}

pub fn analyze(source: &str, table: &ContingencyTable, opts: &AnalyzeOptions) -> Result<Report, CliError> {
    if !(opts.alpha > 0.0 && opts.alpha < 1.0) {
        return Err(CliError::Input(format!("--alpha must lie in (0, 1), got {}", opts.alpha)));
    }
    let pooled = pooled_probabilities::<f64>(table);
    let d = decompose::<f64>(table);
    let approx = normal_params(&pooled, table.reps(), table.labs());
    let mut notes = Vec::new();

    let mut tests = vec![test_in(table, opts.alpha, None)?];
    match test_ip_constant3(table, opts.dof) {
        Ok(t) => tests.push(t),
        Err(DecideError::Statistic(StatisticError::NoVariation)) => {
            notes.push("I_(P) is undefined: the table has no ordinal variation".to_string())
        }
        Err(e) => return Err(e.into()),
    }
    if table.categories() == 2 {
        match test_ip_chi2(table, opts.alpha) {
            Ok(t) => tests.push(t),
            Err(DecideError::Statistic(StatisticError::NoVariation)) => {}
            Err(e) => return Err(e.into()),
        }
    }

    let monte_carlo = match opts.mc_reps {
        None => None,
        Some(reps) => {
            let mut pvalues = Vec::new();
            for statistic in [SimStatistic::S2b, SimStatistic::Ip, SimStatistic::In] {
                let observed = match observed_statistic(table, statistic) {
                    Ok(v) => v,
                    Err(DecideError::Statistic(StatisticError::NoVariation)) => continue,
                    Err(e) => return Err(e.into()),
                };
                let pvalue = mc_pvalue(table, statistic, reps, opts.seed)?;
                pvalues.push(McPvalue { statistic, observed, pvalue });
            }
            Some(MonteCarloSummary { reps, seed: opts.seed, pvalues })
        }
    };

    Ok(Report {
        tool: TOOL.to_string(),
        version: VERSION.to_string(),
        input: InputSummary {
            source: source.to_string(),
            labs: table.labs(),
            categories: table.categories(),
            reps_per_lab: table.reps(),
            labels: table.labels().to_vec(),
            column_totals: table.column_totals(),
            pooled_probabilities: pooled.probs().to_vec(),
        },
        decomposition: DecompositionSummary {
            h2_total: d.h2_total,
            h2_within: d.h2_within,
            s2_between: d.s2_between,
            h2_within_by_lab: d.h2_within_by_lab,
            s2_between_by_cut: d.s2_between_by_k,
        },
        statistics: Statistics {
            ip_consistent: optional_ip(table, DofConvention::Consistent),
            ip_paper_literal: optional_ip(table, DofConvention::PaperLiteral),
            i_n: statistic_in::<f64>(table),
        },
        approximation: Approximation { null: "pooled".to_string(), mu: approx.mu, sigma2: approx.sigma2 },
        tests,
        monte_carlo,
        config: ConfigEcho {
            alpha: opts.alpha,
            dof: opts.dof,
            mc_reps: opts.mc_reps,
            seed: opts.mc_reps.map(|_| opts.seed),
        },
        published: None,
        notes,
    })
}

/// Adds the published values for an embedded example.
pub fn attach_published(report: &mut Report, published_in: f64, published_threshold: f64) {
    let computed_threshold = report.tests.first().and_then(|t| t.thresholds.first().copied()).unwrap_or(f64::NAN);
    report.notes.push(format!(
        "the published I_(N) of {published_in} is not reproduced: h2_W + S2_B evaluates to {:.4} on this table, \
         which also equals the pooled plug-in mean mu",
        report.statistics.i_n
    ));
    report.published = Some(PublishedComparison {
        published_in,
        computed_in: report.statistics.i_n,
        published_threshold,
        computed_threshold,
    });
}

pub fn example_published(name: &str) -> Option<(f64, f64)> {
    match name {
        "table3" => Some((published::EXAMPLE_TABLE3_IN, published::EXAMPLE_TABLE3_THRESHOLD)),
        "table4" => Some((published::EXAMPLE_TABLE4_IN, published::EXAMPLE_TABLE4_THRESHOLD)),
        _ => None,
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), |x| format!("{x:.6}"))
}

fn list(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(", ")
}

pub fn render_text(r: &Report) -> String {
    let mut s = String::new();
    let i = &r.input;
    let _ = writeln!(s, "{} {}: {}", r.tool, r.version, i.source);
    let _ = writeln!(s, "labs M = {}, categories K = {}, results per lab n = {}", i.labs, i.categories, i.reps_per_lab);
    let _ = writeln!(s, "labels: {}", i.labels.join(", "));
    let _ = writeln!(s, "pooled probabilities: {}", list(&i.pooled_probabilities));
    let _ = writeln!(s);
    let d = &r.decomposition;
    let _ = writeln!(s, "variation");
    let _ = writeln!(s, "  total   h2_T = {:.6}", d.h2_total);
    let _ = writeln!(s, "  within  h2_W = {:.6}  (per lab: {})", d.h2_within, list(&d.h2_within_by_lab));
    let _ = writeln!(s, "  between S2_B = {:.6}  (per cut: {})", d.s2_between, list(&d.s2_between_by_cut));
    let _ = writeln!(s);
    let st = &r.statistics;
    let _ = writeln!(s, "statistics");
    let _ = writeln!(s, "  I_(P), df_B = M-1       = {}", opt(st.ip_consistent));
    let _ = writeln!(s, "  I_(P), df_B = M(n-1)    = {}", opt(st.ip_paper_literal));
    let _ = writeln!(s, "  I_(N) = h2_W + S2_B     = {:.6}", st.i_n);
    let _ = writeln!(
        s,
        "  null ({}): mu = {:.6}, sigma2 = {:.6}",
        r.approximation.null, r.approximation.mu, r.approximation.sigma2
    );
    let _ = writeln!(s);
    let _ = writeln!(s, "tests");
    for t in &r.tests {
        let thresholds = t.thresholds.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(" / ");
        let _ =
            writeln!(s, "  {:<32} statistic {:.4}  threshold {:<14} {}", t.method, t.statistic, thresholds, t.decision);
        for n in &t.notes {
            let _ = writeln!(s, "    note: {n}");
        }
    }
    if let Some(mc) = &r.monte_carlo {
        let _ = writeln!(s);
        let _ = writeln!(s, "bootstrap under the pooled null ({} replicates, seed {})", mc.reps, mc.seed);
        for p in &mc.pvalues {
            let _ = writeln!(s, "  {:<10} observed {:.6}  p = {:.4}", p.statistic.name(), p.observed, p.pvalue);
        }
    }
    if let Some(p) = &r.published {
        let _ = writeln!(s);
        let _ = writeln!(s, "published vs computed");
        let _ = writeln!(s, "  I_(N)      {:<8} {:.4}", p.published_in, p.computed_in);
        let _ = writeln!(s, "  threshold  {:<8} {:.4}", p.published_threshold, p.computed_threshold);
    }
    if !r.notes.is_empty() {
        let _ = writeln!(s);
        for n in &r.notes {
            let _ = writeln!(s, "note: {n}");
        }
    }
    s
}
