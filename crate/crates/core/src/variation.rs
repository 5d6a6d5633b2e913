//! Ordinal variation measures and their decomposition.
//!
//! All measures work on cumulative frequencies `F`. With `c = 4 / (K - 1)`:
//!
//! * total:   `h2_T = c * sum_k Fbar_k (1 - Fbar_k)` (pooled cumulative `Fbar`)
//! * within:  `h2_mW = c * sum_k F_km (1 - F_km)`, `h2_W` = mean over labs
//! * between: `S2_kB = (1/M) sum_m (F_km - Fbar_k)^2`, `S2_B = c * sum_k S2_kB`
//!
//! Sums over `k` run over the first `K - 1` categories. With equal
//! replication `h2_T = h2_W + S2_B` holds exactly, for any table.

use serde::Serialize;
use thiserror::Error;

use crate::ingest::{lab_cumulative, pooled_probabilities, ContingencyTable};
use crate::scalar::{nearly_equal, sum, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IndexError {
    #[error("lab index {index} out of range (table has {len} labs)")]
    Lab { index: usize, len: usize },
    #[error("category index {index} out of range (valid 0..{len})")]
    Category { index: usize, len: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationDecomposition<T> {
    pub h2_total: T,
    pub h2_within_by_lab: Vec<T>,
    pub h2_within: T,
    /// One entry per cumulative cut `k = 1..K-1`.
    pub s2_between_by_k: Vec<T>,
    pub s2_between: T,
}

fn dispersion<T: Scalar>(cumulative: &[T]) -> T {
    let cut = cumulative.len() - 1;
    sum(cumulative[..cut].iter().map(|&f| f * (T::one() - f)))
}

/// Total ordinal variation `h2_T` from the pooled cumulative frequencies.
pub fn total_variation<T: Scalar>(table: &ContingencyTable) -> T {
    let pooled = pooled_probabilities::<T>(table);
    T::ordinal_norm(table.categories()) * dispersion(pooled.cumulative())
}

/// Within-laboratory ordinal variation `h2_mW` for laboratory `lab`
/// (zero-based).
pub fn within_lab_variation<T: Scalar>(table: &ContingencyTable, lab: usize) -> Result<T, IndexError> {
    if lab >= table.labs() {
        return Err(IndexError::Lab { index: lab, len: table.labs() });
    }
    let cumulative = &lab_cumulative::<T>(table)[lab];
    Ok(T::ordinal_norm(table.categories()) * dispersion(cumulative))
}

/// Between-laboratory variance `S2_kB` of the cumulative frequencies at cut
/// `k` (zero-based, `k < K - 1`), with the population `1/M` divisor.
pub fn between_variation_at<T: Scalar>(table: &ContingencyTable, k: usize) -> Result<T, IndexError> {
    let cuts = table.categories() - 1;
    if k >= cuts {
        return Err(IndexError::Category { index: k, len: cuts });
    }
    let cumulative = lab_cumulative::<T>(table);
    Ok(between_at(&cumulative, k))
}

fn between_at<T: Scalar>(cumulative: &[Vec<T>], k: usize) -> T {
    let labs = T::from_count(cumulative.len() as u64);
    let mean = sum(cumulative.iter().map(|row| row[k])) / labs;
    sum(cumulative.iter().map(|row| {
        let d = row[k] - mean;
        d * d
    })) / labs
}

/// Full decomposition `h2_T = h2_W + S2_B`.
///
/// The within and between parts are also evaluated through their expanded
/// forms ([`within_expanded`], [`between_expanded`]); in debug builds the
/// two routes are asserted equal.
pub fn decompose<T: Scalar>(table: &ContingencyTable) -> VariationDecomposition<T> {
    let norm = T::ordinal_norm(table.categories());
    let labs = T::from_count(table.labs() as u64);
    let cumulative = lab_cumulative::<T>(table);

    let h2_within_by_lab: Vec<T> = cumulative.iter().map(|row| norm * dispersion(row)).collect();
    let h2_within = sum(h2_within_by_lab.iter().copied()) / labs;
    let s2_between_by_k: Vec<T> = (0..table.categories() - 1).map(|k| between_at(&cumulative, k)).collect();
    let s2_between = norm * sum(s2_between_by_k.iter().copied());
    let h2_total = total_variation(table);

    debug_assert!(nearly_equal(h2_within, within_expanded(table)), "within-lab routes disagree");
    debug_assert!(nearly_equal(s2_between, between_expanded(table)), "between-lab routes disagree");
    debug_assert!(nearly_equal(h2_total, h2_within + s2_between), "decomposition identity violated");

    VariationDecomposition { h2_total, h2_within_by_lab, h2_within, s2_between_by_k, s2_between }
}

/// Between-laboratory variation in expanded form:
/// `S2_B = c/M * sum_m sum_k F_km^2 - c * sum_k Fbar_k^2`.
pub fn between_expanded<T: Scalar>(table: &ContingencyTable) -> T {
    let norm = T::ordinal_norm(table.categories());
    let labs = T::from_count(table.labs() as u64);
    let cuts = table.categories() - 1;
    let cumulative = lab_cumulative::<T>(table);
    let pooled = pooled_probabilities::<T>(table);
    let squares = sum(cumulative.iter().flat_map(|row| row[..cuts].iter().map(|&f| f * f)));
    let pooled_squares = sum(pooled.cumulative()[..cuts].iter().map(|&f| f * f));
    norm * squares / labs - norm * pooled_squares
}

/// Within-laboratory variation in expanded form:
/// `h2_W = c/M * sum_m sum_k F_km - c/M * sum_m sum_k F_km^2`.
///
/// The linear term is evaluated through weighted counts,
/// `sum_k F_km = (1/n) sum_k (K - k) n_km`.
pub fn within_expanded<T: Scalar>(table: &ContingencyTable) -> T {
    let norm = T::ordinal_norm(table.categories());
    let labs = T::from_count(table.labs() as u64);
    let n = T::from_count(table.reps());
    let k_max = table.categories();
    let cuts = k_max - 1;
    let weighted: u64 =
        table.rows().map(|row| row.iter().enumerate().map(|(k, &c)| (k_max - 1 - k) as u64 * c).sum::<u64>()).sum();
    let cumulative = lab_cumulative::<T>(table);
    let squares = sum(cumulative.iter().flat_map(|row| row[..cuts].iter().map(|&f| f * f)));
    norm * T::from_count(weighted) / (n * labs) - norm * squares / labs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_table;
    use num_rational::Rational64 as Q;

    fn table3() -> ContingencyTable {
        parse_table("lab,1,2,3,4,5\nA,0,0,0,5,0\nB,0,0,1,4,0\nC,0,3,2,0,0\nD,0,0,5,0,0\nE,0,2,2,1,0\n").unwrap()
    }

    fn table4() -> ContingencyTable {
        parse_table("lab,1,2,3,4,5\nA,0,0,1,4,0\nB,3,0,1,1,0\nC,3,2,0,0,0\nD,1,0,4,0,0\nE,3,1,1,0,0\n").unwrap()
    }

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    #[test]
    fn total_variation_examples() {
        assert_eq!(total_variation::<Q>(&table3()), q(2, 5));
        let two = parse_table("lab,a,b\nA,2,0\nB,0,2\n").unwrap();
        assert_eq!(total_variation::<Q>(&two), q(1, 1));
        let flat = parse_table("lab,a,b,c\nA,0,4,0\nB,0,4,0\n").unwrap();
        assert_eq!(total_variation::<f64>(&flat), 0.0);
    }

    #[test]
    fn within_lab_examples() {
        assert_eq!(within_lab_variation::<Q>(&table3(), 4).unwrap(), q(2, 5));
        assert_eq!(within_lab_variation::<Q>(&table3(), 0).unwrap(), q(0, 1));
        assert_eq!(within_lab_variation::<Q>(&table4(), 1).unwrap(), q(16, 25));
        assert_eq!(within_lab_variation::<f64>(&table3(), 5), Err(IndexError::Lab { index: 5, len: 5 }));
    }

    #[test]
    fn between_examples() {
        assert_eq!(between_variation_at::<Q>(&table3(), 1).unwrap(), q(8, 125));
        assert_eq!(between_variation_at::<Q>(&table3(), 3).unwrap(), q(0, 1));
        assert_eq!(between_variation_at::<Q>(&table4(), 1).unwrap(), q(86, 625));
        assert_eq!(between_variation_at::<f64>(&table3(), 4), Err(IndexError::Category { index: 4, len: 4 }));
    }

    #[test]
    fn decompose_table3_exact() {
        let d = decompose::<Q>(&table3());
        assert_eq!(d.h2_total, q(2, 5));
        assert_eq!(d.h2_within, q(4, 25));
        assert_eq!(d.s2_between, q(6, 25));
        assert_eq!(d.h2_within_by_lab, vec![q(0, 1), q(4, 25), q(6, 25), q(0, 1), q(2, 5)]);
        assert_eq!(d.s2_between_by_k, vec![q(0, 1), q(8, 125), q(22, 125), q(0, 1)]);
    }

    #[test]
    fn decompose_table4_exact() {
        let d = decompose::<Q>(&table4());
        assert_eq!(d.h2_total, q(406, 625));
        assert_eq!(d.h2_within, q(44, 125));
        assert_eq!(d.s2_between, q(186, 625));
        assert_eq!(d.h2_within_by_lab, vec![q(4, 25), q(16, 25), q(6, 25), q(8, 25), q(2, 5)]);
        assert_eq!(d.s2_between_by_k, vec![q(8, 125), q(86, 625), q(12, 125), q(0, 1)]);
    }

    #[test]
    fn identical_rows_have_no_between_variation() {
        let t = parse_table("lab,a,b,c\nA,1,2,1\nB,1,2,1\nC,1,2,1\n").unwrap();
        let d = decompose::<Q>(&t);
        assert_eq!(d.s2_between, q(0, 1));
        assert_eq!(d.h2_total, d.h2_within);
    }

    #[test]
    fn expanded_routes_match_exactly() {
        for t in [table3(), table4()] {
            let d = decompose::<Q>(&t);
            assert_eq!(within_expanded::<Q>(&t), d.h2_within);
            assert_eq!(between_expanded::<Q>(&t), d.s2_between);
        }
    }

    #[test]
    fn f32_route_tracks_f64() {
        let d32 = decompose::<f32>(&table4());
        let d64 = decompose::<f64>(&table4());
        assert!((d32.h2_total as f64 - d64.h2_total).abs() < 1e-6);
    }
}
