//! Test statistics for laboratory effects.
//!
//! * `I_(P) = (S2_B / df_B) / (h2_T / df_T)`, the ratio statistic.
//! * `I_(N) = h2_W + S2_B`, the additive statistic.
//!
//! Because the decomposition is an identity, `I_(N)` equals `h2_T` and
//! depends on the table only through its column totals. Written through
//! weighted counts it reads
//!
//! ```text
//! I_(N) = c/(n M) * sum_m sum_{k<K} (K - k) X_km  -  c * sum_{k<K} Fbar_k^2
//! ```
//!
//! with `c = 4 / (K - 1)`. [`statistic_in_at_null`] evaluates this form with
//! the squared cumulative term taken from a fixed null distribution rather
//! than from the table, which is the quantity the normal approximation
//! describes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{pooled_probabilities, ContingencyTable, ProbabilityVector};
use crate::scalar::{nearly_equal, sum, Scalar};
use crate::variation::decompose;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatisticError {
    #[error("no ordinal variation; I_(P) undefined")]
    NoVariation,
    #[error("null distribution has {null} categories but the table has {table}")]
    CategoryMismatch { null: usize, table: usize },
}

/// Degrees-of-freedom convention for `I_(P)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DofConvention {
    /// `df_B = M - 1`, `df_T = nM - 1`; agrees with the `chi2_{M-1} / (M-1)`
    /// reference for two categories.
    #[default]
    Consistent,
    /// `df_B = M (n - 1)`, `df_T = nM - 1`, as printed in the original
    /// definition.
    PaperLiteral,
}

impl DofConvention {
    pub fn df_between(self, labs: usize, reps: u64) -> u64 {
        match self {
            Self::Consistent => labs as u64 - 1,
            Self::PaperLiteral => labs as u64 * (reps - 1),
        }
    }

    pub fn df_total(self, labs: usize, reps: u64) -> u64 {
        labs as u64 * reps - 1
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Consistent => "consistent",
            Self::PaperLiteral => "paper-literal",
        }
    }
}

/// Ratio statistic `I_(P)`.
pub fn statistic_ip<T: Scalar>(table: &ContingencyTable, dof: DofConvention) -> Result<T, StatisticError> {
    let d = decompose::<T>(table);
    if d.h2_total <= T::zero() {
        return Err(StatisticError::NoVariation);
    }
    let df_b = dof.df_between(table.labs(), table.reps());
    if df_b == 0 {
        // paper-literal convention with n = 1
        return Err(StatisticError::NoVariation);
    }
    let df_b = T::from_count(df_b);
    let df_t = T::from_count(dof.df_total(table.labs(), table.reps()));
    Ok((d.s2_between / df_b) / (d.h2_total / df_t))
}

/// Additive statistic `I_(N) = h2_W + S2_B`.
pub fn statistic_in<T: Scalar>(table: &ContingencyTable) -> T {
    let d = decompose::<T>(table);
    let value = d.h2_within + d.s2_between;
    debug_assert!({
        let pooled = pooled_probabilities::<T>(table);
        let weighted = statistic_in_at_null(table, &pooled).expect("same category count");
        nearly_equal(weighted, value) && nearly_equal(d.h2_total, value)
    });
    value
}

/// Weighted-count form of `I_(N)` with the squared cumulative term fixed at
/// `null`. Equals [`statistic_in`] when `null` is the table's own pooled
/// distribution.
pub fn statistic_in_at_null<T: Scalar>(
    table: &ContingencyTable,
    null: &ProbabilityVector<T>,
) -> Result<T, StatisticError> {
    let k_max = table.categories();
    if null.categories() != k_max {
        return Err(StatisticError::CategoryMismatch { null: null.categories(), table: k_max });
    }
    let weighted: u64 = table
        .rows()
        .map(|row| row[..k_max - 1].iter().enumerate().map(|(k, &c)| (k_max - 1 - k) as u64 * c).sum::<u64>())
        .sum();
    Ok(weighted_form(weighted, table.labs(), table.reps(), null))
}

/// `c/(nM) * weighted - c * sum F_k^2` for already-aggregated weighted counts.
pub(crate) fn weighted_form<T: Scalar>(weighted: u64, labs: usize, reps: u64, null: &ProbabilityVector<T>) -> T {
    let k_max = null.categories();
    let norm = T::ordinal_norm(k_max);
    let squares = sum(null.cumulative()[..k_max - 1].iter().map(|&f| f * f));
    norm * T::from_count(weighted) / T::from_count(reps * labs as u64) - norm * squares
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

    #[test]
    fn ip_examples() {
        assert_eq!(statistic_ip::<Q>(&table3(), DofConvention::Consistent).unwrap(), Q::new(18, 5));
        let two = parse_table("lab,a,b\nA,2,0\nB,0,2\n").unwrap();
        assert_eq!(statistic_ip::<Q>(&two, DofConvention::Consistent).unwrap(), Q::from_integer(3));
        let flat = parse_table("lab,a,b,c\nA,4,0,0\nB,4,0,0\n").unwrap();
        assert_eq!(statistic_ip::<f64>(&flat, DofConvention::Consistent), Err(StatisticError::NoVariation));
        assert_eq!(StatisticError::NoVariation.to_string(), "no ordinal variation; I_(P) undefined");
    }

    #[test]
    fn ip_paper_literal_scaling() {
        let t = table4();
        let consistent = statistic_ip::<Q>(&t, DofConvention::Consistent).unwrap();
        let literal = statistic_ip::<Q>(&t, DofConvention::PaperLiteral).unwrap();
        assert_eq!(literal, consistent * Q::new(4, 20));
    }

    #[test]
    fn paper_literal_with_single_rep_is_undefined() {
        let t = parse_table("lab,a,b\nA,1,0\nB,0,1\n").unwrap();
        assert_eq!(statistic_ip::<f64>(&t, DofConvention::PaperLiteral), Err(StatisticError::NoVariation));
        assert!(statistic_ip::<f64>(&t, DofConvention::Consistent).is_ok());
    }

    #[test]
    fn in_examples() {
        assert_eq!(statistic_in::<Q>(&table3()), Q::new(2, 5));
        assert_eq!(statistic_in::<Q>(&table4()), Q::new(406, 625));
        let flat = parse_table("lab,a,b,c\nA,0,0,4\nB,0,0,4\n").unwrap();
        assert_eq!(statistic_in::<f64>(&flat), 0.0);
    }

    #[test]
    fn weighted_form_with_pooled_null_is_in() {
        for t in [table3(), table4()] {
            let pooled = pooled_probabilities::<Q>(&t);
            assert_eq!(statistic_in_at_null(&t, &pooled).unwrap(), statistic_in::<Q>(&t));
        }
    }

    #[test]
    fn weighted_form_with_external_null() {
        // Table 3 column totals (0,5,10,10,0): weighted sum 4*0 + 3*5 + 2*10 + 1*10 = 45
        let uniform = ProbabilityVector::new(vec![Q::new(1, 5); 5]).unwrap();
        let v = statistic_in_at_null(&table3(), &uniform).unwrap();
        // 45/25 - (1/25 + 4/25 + 9/25 + 16/25)
        assert_eq!(v, Q::new(45, 25) - Q::new(30, 25));
        let wrong = ProbabilityVector::new(vec![Q::new(1, 2); 2]).unwrap();
        assert_eq!(
            statistic_in_at_null(&table3(), &wrong),
            Err(StatisticError::CategoryMismatch { null: 2, table: 5 })
        );
    }

    #[test]
    fn dof_names_and_serde() {
        assert_eq!(DofConvention::default(), DofConvention::Consistent);
        assert_eq!(DofConvention::PaperLiteral.name(), "paper-literal");
        assert_eq!(DofConvention::Consistent.df_between(5, 5), 4);
        assert_eq!(DofConvention::PaperLiteral.df_between(5, 5), 20);
        assert_eq!(DofConvention::PaperLiteral.df_total(5, 5), 24);
    }
}
