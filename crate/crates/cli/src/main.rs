use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ordanova::montecarlo::DEFAULT_DRAWS;
use ordanova::{DofConvention, SimConfig, SimStatistic};
use ordanova_cli::reproduce::{reproduce, Target};
use ordanova_cli::{analyze, example_report, read_table, render_text, simulate, to_json, AnalyzeOptions, CliError};

#[derive(Parser)]
#[command(name = "ordanova", version, about = "Ordinal analysis of variation for interlaboratory studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a laboratory-by-category count table.
    Analyze {
        csv: PathBuf,
        #[command(flatten)]
        opts: ReportArgs,
    },
    /// Simulate the null distribution of a statistic.
    Simulate(SimulateArgs),
    /// Recompute a table or figure of the reference simulation study.
    Reproduce {
        #[arg(value_enum)]
        target: TargetArg,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output directory for `figures`.
        #[arg(long, default_value = "figures")]
        out_dir: PathBuf,
    },
    /// Analyze one of the embedded five-laboratory datasets.
    Example {
        #[arg(value_enum)]
        name: ExampleArg,
        #[command(flatten)]
        opts: ReportArgs,
    },
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = DofArg::Consistent)]
    dof: DofArg,
    /// Bootstrap replicates for Monte Carlo p-values (at least 100).
    #[arg(long)]
    mc_reps: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct SimulateArgs {
    /// Category probabilities, e.g. `1/3,1/3,1/3`.
    #[arg(long)]
    probs: String,
    #[arg(long)]
    labs: usize,
    #[arg(long)]
    reps_per_lab: u64,
    #[arg(long, default_value_t = DEFAULT_DRAWS)]
    draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = StatisticArg::In)]
    statistic: StatisticArg,
    #[arg(long, value_enum, default_value_t = DofArg::Consistent)]
    dof: DofArg,
    /// Write the ECDF of the draws as CSV.
    #[arg(long)]
    ecdf_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum DofArg {
    Consistent,
    Paper,
}

impl From<DofArg> for DofConvention {
    fn from(d: DofArg) -> Self {
        match d {
            DofArg::Consistent => Self::Consistent,
            DofArg::Paper => Self::PaperLiteral,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum StatisticArg {
    Ip,
    In,
    InPlugin,
    S2b,
}

impl From<StatisticArg> for SimStatistic {
    fn from(s: StatisticArg) -> Self {
        match s {
            StatisticArg::Ip => Self::Ip,
            StatisticArg::In => Self::In,
            StatisticArg::InPlugin => Self::InPlugin,
            StatisticArg::S2b => Self::S2b,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Table1,
    Table2,
    Table5,
    Table6,
    Figures,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleArg {
    Table3,
    Table4,
}

impl ReportArgs {
    fn options(&self) -> AnalyzeOptions {
        AnalyzeOptions { alpha: self.alpha, dof: self.dof.into(), mc_reps: self.mc_reps, seed: self.seed }
    }
}

fn emit(report: &ordanova_cli::Report, format: Format) -> Result<String, CliError> {
    match format {
        Format::Text => Ok(render_text(report)),
        Format::Json => to_json(report).map(|s| s + "\n"),
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Analyze { csv, opts } => {
            let table = read_table(&csv)?;
            let report = analyze(&csv.display().to_string(), &table, &opts.options())?;
            emit(&report, opts.format)
        }
        Command::Example { name, opts } => {
            let name = match name {
                ExampleArg::Table3 => "table3",
                ExampleArg::Table4 => "table4",
            };
            emit(&example_report(name, &opts.options())?, opts.format)
        }
        Command::Simulate(args) => {
            let probs = simulate::parse_probs(&args.probs)?;
            let config = SimConfig::new(probs, args.labs, args.reps_per_lab, args.statistic.into())
                .with_draws(args.draws)
                .with_seed(args.seed)
                .with_dof(args.dof.into());
            let dist = simulate::run(&config)?;
            if let Some(path) = &args.ecdf_out {
                simulate::write_ecdf(&dist, path)?;
            }
            let summary = simulate::summarize(&dist)?;
            match args.format {
                Format::Text => Ok(simulate::render_text(&summary)),
                Format::Json => serde_json::to_string_pretty(&summary)
                    .map(|s| s + "\n")
                    .map_err(|e| CliError::Internal(e.to_string())),
            }
        }
        Command::Reproduce { target, seed, out_dir } => {
            let target = match target {
                TargetArg::Table1 => Target::Table1,
                TargetArg::Table2 => Target::Table2,
                TargetArg::Table5 => Target::Table5,
                TargetArg::Table6 => Target::Table6,
                TargetArg::Figures => Target::Figures,
            };
            reproduce(target, seed, &out_dir)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
