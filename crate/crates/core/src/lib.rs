//! Ordinal analysis of variation (ORDANOVA) for interlaboratory studies.
//!
//! A study is an `M x K` table of counts: `M` laboratories each classify the
//! same item `n` times into `K` ordered categories. This crate computes the
//! ordinal variation decomposition of such a table, the ratio statistic
//! `I_(P)` and the additive statistic `I_(N)`, the normal approximation of
//! `I_(N)` under laboratory homogeneity, and a seeded Monte Carlo engine that
//! samples the exact null distributions of both statistics.
//!
//! The deterministic math (`variation`, `statistics`, `approx::normal_params`)
//! is generic over the scalar type, so it can run on `f64`, `f32`, or exact
//! rationals. The aliases below pin the common choices.

pub mod approx;
pub mod decide;
pub mod ingest;
pub mod montecarlo;
pub mod published;
pub mod rng;
pub mod scalar;
pub mod special;
pub mod statistics;
pub mod variation;

pub use approx::{critical_value, gaussian_count_model, normal_params, GaussianCountModel, NormalApprox};
pub use decide::{mc_pvalue, test_in, test_ip_chi2, test_ip_constant3, Decision, TestOutcome};
pub use ingest::{lab_cumulative, parse_table, pooled_probabilities, ContingencyTable, IngestError, ProbabilityVector};
pub use montecarlo::{simulate_distribution, McDistribution, SimConfig, SimStatistic};
pub use scalar::Scalar;
pub use statistics::{statistic_in, statistic_in_at_null, statistic_ip, DofConvention, StatisticError};
pub use variation::{decompose, VariationDecomposition};

/// Exact rational scalar, used for audit computations and oracles.
pub type Exact = num_rational::Rational64;

pub type Probabilities = ProbabilityVector<f64>;
pub type ExactProbabilities = ProbabilityVector<Exact>;
pub type Decomposition = VariationDecomposition<f64>;
pub type ExactDecomposition = VariationDecomposition<Exact>;
pub type Normal = NormalApprox<f64>;
pub type CountModel = GaussianCountModel<f64>;
