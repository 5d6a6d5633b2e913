//! Published-versus-computed comparison tables for the simulation study
//! and ECDF data for its figures.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ordanova::approx::{critical_value, normal_params};
use ordanova::montecarlo::{ks_distance, stream_seed};
use ordanova::published::{InRow, IpRow, NullCase, TABLE1, TABLE2, TABLE5, TABLE6};
use ordanova::{simulate_distribution, McDistribution, SimConfig, SimStatistic};

use crate::error::CliError;

pub const OVERLAY_POINTS: usize = 512;
pub const DISCREPANCY_FLAG: &str = "known paper discrepancy";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Table1,
    Table2,
    Table5,
    Table6,
    Figures,
}

fn simulate(
    case: NullCase,
    labs: usize,
    reps: u64,
    statistic: SimStatistic,
    seed: u64,
) -> Result<McDistribution, CliError> {
    let config = SimConfig::new(case.probabilities(), labs, reps, statistic).with_seed(seed);
    Ok(simulate_distribution(&config)?)
}

fn ip_table(title: &str, case: NullCase, rows: &[IpRow], seed: u64, table_id: u64) -> Result<String, CliError> {
    let mut s = String::new();
    let _ = writeln!(s, "## {title}: I_(P) under {}, df_B = M - 1, seed {seed}\n", case.label());
    let _ = writeln!(
        s,
        "| M | n | published 5% | computed 5% | abs diff | published % >= 3 | computed % >= 3 | abs diff |"
    );
    let _ = writeln!(s, "|---|---|---|---|---|---|---|---|");
    for (i, row) in rows.iter().enumerate() {
        let d = simulate(case, row.labs, row.reps, SimStatistic::Ip, stream_seed(seed, 100 * table_id + i as u64))?;
        let upper = d.upper_percentile(0.05)?;
        let tail = 100.0 * d.tail_fraction(3.0);
        let _ = writeln!(
            s,
            "| {} | {} | {:.2} | {:.3} | {:.3} | {:.1} | {:.2} | {:.2} |",
            row.labs,
            row.reps,
            row.upper5,
            upper,
            (upper - row.upper5).abs(),
            row.tail_percent,
            tail,
            (tail - row.tail_percent).abs()
        );
    }
    Ok(s)
}

fn in_table(title: &str, case: NullCase, rows: &[InRow], seed: u64, table_id: u64) -> Result<String, CliError> {
    let p = case.probabilities();
    let mut s = String::new();
    let _ = writeln!(s, "## {title}: upper 5% points of I_(N) under {}, seed {seed}\n", case.label());
    let _ = writeln!(
        s,
        "| M | n | published sim | computed sim | abs diff | published approx | computed approx | abs diff | flag |"
    );
    let _ = writeln!(s, "|---|---|---|---|---|---|---|---|---|");
    for (i, row) in rows.iter().enumerate() {
        let d = simulate(case, row.labs, row.reps, SimStatistic::In, stream_seed(seed, 100 * table_id + i as u64))?;
        let sim = d.upper_percentile(0.05)?;
        let approx = critical_value(&normal_params(&p, row.reps, row.labs), 0.05)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        let _ = writeln!(
            s,
            "| {} | {} | {:.2} | {:.3} | {:.3} | {:.2} | {:.3} | {:.3} | {} |",
            row.labs,
            row.reps,
            row.simulated,
            sim,
            (sim - row.simulated).abs(),
            row.approximate,
            approx,
            (approx - row.approximate).abs(),
            if row.known_discrepancy() { DISCREPANCY_FLAG } else { "" }
        );
    }
    let _ = writeln!(
        s,
        "\nI_(N) depends on (M, n) only through nM, so rows with equal nM share one distribution. \
         The published n = 20 rows break that symmetry and are flagged."
    );
    Ok(s)
}

const FIGURE_PANELS: [(usize, u64); 4] = [(5, 5), (5, 20), (20, 5), (20, 20)];

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<(), CliError> {
    let wrap = |source| CliError::Write { path: path.to_path_buf(), source };
    let mut out = BufWriter::new(File::create(path).map_err(wrap)?);
    body(&mut out).and_then(|_| out.flush()).map_err(wrap)
}

fn figures(seed: u64, out_dir: &Path) -> Result<String, CliError> {
    fs::create_dir_all(out_dir).map_err(|source| CliError::Write { path: out_dir.to_path_buf(), source })?;
    let mut s = String::new();
    let _ = writeln!(s, "## ECDF of simulated I_(N) against the normal approximation, seed {seed}\n");
    let _ = writeln!(s, "| case | M | n | mu | sigma2 | KS distance | ECDF file | approximation file |");
    let _ = writeln!(s, "|---|---|---|---|---|---|---|---|");
    for (ci, (case, tag)) in [(NullCase::A, "a"), (NullCase::B, "b")].into_iter().enumerate() {
        let p = case.probabilities();
        for (i, &(labs, reps)) in FIGURE_PANELS.iter().enumerate() {
            let d = simulate(case, labs, reps, SimStatistic::In, stream_seed(seed, 500 + 10 * ci as u64 + i as u64))?;
            let a = normal_params(&p, reps, labs);
            let stem = format!("in_case-{tag}_M{labs}_n{reps}");
            let ecdf: PathBuf = out_dir.join(format!("{stem}_ecdf.csv"));
            let overlay: PathBuf = out_dir.join(format!("{stem}_normal.csv"));
            write_file(&ecdf, |w| d.write_ecdf_csv(w))?;

            let sd = a.sigma2.sqrt();
            let lo = d.values[0].min(a.mu - 4.0 * sd);
            let hi = d.values[d.len() - 1].max(a.mu + 4.0 * sd);
            write_file(&overlay, |w| {
                writeln!(w, "value,cumulative_probability")?;
                for j in 0..OVERLAY_POINTS {
                    let x = lo + (hi - lo) * j as f64 / (OVERLAY_POINTS - 1) as f64;
                    writeln!(w, "{x},{}", a.cdf(x))?;
                }
                Ok(())
            })?;
            let ks = ks_distance(&d.values, |x| a.cdf(x));
            let _ = writeln!(
                s,
                "| {tag} | {labs} | {reps} | {:.4} | {:.5} | {ks:.4} | {} | {} |",
                a.mu,
                a.sigma2,
                ecdf.display(),
                overlay.display()
            );
        }
    }
    Ok(s)
}

pub fn reproduce(target: Target, seed: u64, out_dir: &Path) -> Result<String, CliError> {
    match target {
        Target::Table1 => {
            let mut s = ip_table("Table 1", NullCase::A, &TABLE1, seed, 1)?;
            let _ = writeln!(
                s,
                "\nThe published caption gives p = 1/2 for each of the three categories; \
                 that does not sum to one, so case (a) is run with p = 1/3."
            );
            Ok(s)
        }
        Target::Table2 => ip_table("Table 2", NullCase::B, &TABLE2, seed, 2),
        Target::Table5 => in_table("Table 5", NullCase::A, &TABLE5, seed, 5),
        Target::Table6 => in_table("Table 6", NullCase::B, &TABLE6, seed, 6),
        Target::Figures => figures(seed, out_dir),
    }
}
