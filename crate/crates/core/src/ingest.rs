//! Laboratory-by-category count tables and the probability structures
//! derived from them.
//!
//! Input is a wide CSV with header `lab,cat1,...,catK` and one row per
//! laboratory. Column order is the ordinal order of the categories. Lines
//! starting with `#` are comments.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::scalar::{abs_diff, sum, Scalar};

/// Tolerance on `sum(p) = 1` accepted when building a probability vector.
/// The accepted vector is renormalized so the stored sum is exact to
/// rounding.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IngestError {
    #[error("empty input: no header or no laboratory rows")]
    Empty,
    #[error("malformed CSV at line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("line {line}, column '{column}': count '{value}' is not a nonnegative integer")]
    BadCount { line: u64, column: String, value: String },
    #[error("line {line}: expected {expected} fields, found {found}")]
    FieldCount { line: u64, expected: usize, found: usize },
    #[error("need at least 2 categories, found {0}")]
    TooFewCategories(usize),
    #[error("need at least 2 laboratories, found {0}")]
    TooFewLabs(usize),
    #[error("duplicate laboratory label '{label}' at line {line}")]
    DuplicateLab { label: String, line: u64 },
    #[error("unequal row sums: lab '{label}' has {found} results, expected {expected} (from lab '{first}')")]
    UnequalRowSums { label: String, found: u64, expected: u64, first: String },
    #[error("every laboratory needs at least one result")]
    NoResults,
    #[error("invalid probability vector: {0}")]
    Probability(String),
}

/// `M` laboratories by `K` ordered categories of counts with equal row sums.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContingencyTable {
    labels: Vec<String>,
    /// Row-major `M x K`.
    counts: Vec<u64>,
    categories: usize,
    reps: u64,
}

impl ContingencyTable {
    /// Builds and validates a table from labelled rows.
    pub fn new(labels: Vec<String>, rows: Vec<Vec<u64>>) -> Result<Self, IngestError> {
        let categories = rows.first().map_or(0, Vec::len);
        if categories < 2 {
            return Err(IngestError::TooFewCategories(categories));
        }
        if rows.len() < 2 {
            return Err(IngestError::TooFewLabs(rows.len()));
        }
        assert_eq!(labels.len(), rows.len(), "one label per row");
        let mut seen = HashSet::new();
        for (i, label) in labels.iter().enumerate() {
            if !seen.insert(label.as_str()) {
                return Err(IngestError::DuplicateLab { label: label.clone(), line: i as u64 + 1 });
            }
        }
        let mut counts = Vec::with_capacity(rows.len() * categories);
        let reps: u64 = rows[0].iter().sum();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != categories {
                return Err(IngestError::FieldCount { line: i as u64 + 1, expected: categories, found: row.len() });
            }
            let total: u64 = row.iter().sum();
            if total != reps {
                return Err(IngestError::UnequalRowSums {
                    label: labels[i].clone(),
                    found: total,
                    expected: reps,
                    first: labels[0].clone(),
                });
            }
            counts.extend_from_slice(row);
        }
        if reps == 0 {
            return Err(IngestError::NoResults);
        }
        Ok(Self { labels, counts, categories, reps })
    }

    /// Table from already-validated flat counts; used by the simulation
    /// kernels, which build rows that sum to `reps` by construction.
    pub(crate) fn from_flat_unchecked(labels: Vec<String>, counts: Vec<u64>, categories: usize, reps: u64) -> Self {
        debug_assert_eq!(labels.len() * categories, counts.len());
        debug_assert!(counts.chunks(categories).all(|r| r.iter().sum::<u64>() == reps));
        Self { labels, counts, categories, reps }
    }

    /// Number of laboratories `M`.
    pub fn labs(&self) -> usize {
        self.labels.len()
    }

    /// Number of ordered categories `K`.
    pub fn categories(&self) -> usize {
        self.categories
    }

    /// Repetitions per laboratory `n`.
    pub fn reps(&self) -> u64 {
        self.reps
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn row(&self, lab: usize) -> &[u64] {
        &self.counts[lab * self.categories..(lab + 1) * self.categories]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.counts.chunks(self.categories)
    }

    pub fn count(&self, lab: usize, category: usize) -> u64 {
        self.counts[lab * self.categories + category]
    }

    /// Per-category totals over all laboratories.
    pub fn column_totals(&self) -> Vec<u64> {
        let mut totals = vec![0u64; self.categories];
        for row in self.rows() {
            for (t, &c) in totals.iter_mut().zip(row) {
                *t += c;
            }
        }
        totals
    }

    /// Same table with the category order reversed.
    pub fn reversed(&self) -> Self {
        let counts = self.rows().flat_map(|r| r.iter().rev().copied()).collect();
        Self { counts, ..self.clone() }
    }

    /// Serializes back to the wide CSV input format.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lab");
        for k in 1..=self.categories {
            let _ = write!(out, ",cat{k}");
        }
        out.push('\n');
        for (label, row) in self.labels.iter().zip(self.rows()) {
            out.push_str(&csv_field(label));
            for c in row {
                let _ = write!(out, ",{c}");
            }
            out.push('\n');
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) || s.starts_with('#') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn split_record(line: &str, number: u64) -> Result<csv::StringRecord, IngestError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(line.as_bytes());
    match reader.records().next() {
        Some(Ok(record)) => Ok(record),
        Some(Err(e)) => Err(IngestError::Csv { line: number, message: e.to_string() }),
        None => Ok(csv::StringRecord::new()),
    }
}

/// Parses the wide CSV format into a validated table.
///
/// Records are one physical line each; blank lines and `#` comments are
/// skipped. Errors carry 1-based file line numbers.
pub fn parse_table(text: &str) -> Result<ContingencyTable, IngestError> {
    let mut records = text
        .lines()
        .enumerate()
        .map(|(i, line)| (i as u64 + 1, line))
        .filter(|(_, line)| !line.trim().is_empty() && !line.trim_start().starts_with('#'));

    let (_, header_line) = records.next().ok_or(IngestError::Empty)?;
    let header = split_record(header_line, 1)?;
    let categories = header.len().saturating_sub(1);
    if categories < 2 {
        return Err(IngestError::TooFewCategories(categories));
    }

    let mut labels = Vec::new();
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for (line, text) in records {
        let record = split_record(text, line)?;
        if record.len() != header.len() {
            return Err(IngestError::FieldCount { line, expected: header.len(), found: record.len() });
        }
        let row = record
            .iter()
            .skip(1)
            .zip(header.iter().skip(1))
            .map(|(field, column)| {
                field.parse::<u64>().map_err(|_| IngestError::BadCount {
                    line,
                    column: column.to_string(),
                    value: field.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        labels.push(record[0].to_string());
        rows.push(row);
        lines.push(line);
    }
    if rows.is_empty() {
        return Err(IngestError::Empty);
    }
    ContingencyTable::new(labels, rows).map_err(|e| match e {
        // report file line numbers rather than row indices
        IngestError::DuplicateLab { label, line } => {
            IngestError::DuplicateLab { label, line: lines[line as usize - 1] }
        }
        other => other,
    })
}

/// Category probabilities `p` with their cumulative sums `F`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityVector<T> {
    p: Vec<T>,
    cumulative: Vec<T>,
}

impl<T: Scalar> ProbabilityVector<T> {
    /// Validates nonnegativity and unit sum (within
    /// [`PROBABILITY_SUM_TOLERANCE`]), then renormalizes.
    pub fn new(p: Vec<T>) -> Result<Self, IngestError> {
        if p.len() < 2 {
            return Err(IngestError::Probability(format!("need at least 2 categories, found {}", p.len())));
        }
        if let Some(i) = p.iter().position(|&v| v.partial_cmp(&T::zero()).is_none_or(|o| o.is_lt())) {
            return Err(IngestError::Probability(format!("entry {} is negative or not a number", i + 1)));
        }
        let total = sum(p.iter().copied());
        let tol = T::from_f64(PROBABILITY_SUM_TOLERANCE).unwrap_or_else(T::zero);
        if abs_diff(total, T::one()) > tol {
            return Err(IngestError::Probability(format!("entries sum to {:?}, not 1", total)));
        }
        let p: Vec<T> = if total == T::one() { p } else { p.into_iter().map(|v| v / total).collect() };
        Ok(Self::from_normalized(p))
    }

    fn from_normalized(p: Vec<T>) -> Self {
        let mut acc = T::zero();
        let mut cumulative: Vec<T> = p
            .iter()
            .map(|&v| {
                acc = acc + v;
                acc
            })
            .collect();
        // pin the last cumulative value; rounding must not push it off 1
        if let Some(last) = cumulative.last_mut() {
            *last = T::one();
        }
        Self { p, cumulative }
    }

    pub fn categories(&self) -> usize {
        self.p.len()
    }

    pub fn probs(&self) -> &[T] {
        &self.p
    }

    /// `F_k = p_1 + ... + p_k`; the last entry is exactly one.
    pub fn cumulative(&self) -> &[T] {
        &self.cumulative
    }

    /// True when all mass sits in a single category.
    pub fn is_degenerate(&self) -> bool {
        self.p.iter().filter(|&&v| v > T::zero()).count() <= 1
    }

    pub fn to_f64(&self) -> ProbabilityVector<f64> {
        ProbabilityVector::from_normalized(self.p.iter().map(|v| v.as_f64()).collect())
    }
}

impl ProbabilityVector<f64> {
    /// Parses a comma-separated list of decimals or fractions such as
    /// `1/3,1/3,1/3` or `0.5,0.25,0.25`.
    pub fn parse(text: &str) -> Result<Self, IngestError> {
        let p = text.split(',').map(|tok| parse_probability(tok.trim())).collect::<Result<Vec<_>, _>>()?;
        Self::new(p)
    }
}

fn parse_probability(tok: &str) -> Result<f64, IngestError> {
    let bad = || IngestError::Probability(format!("cannot parse '{tok}' as a probability"));
    let value = match tok.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| bad())?;
            let den: f64 = den.trim().parse().map_err(|_| bad())?;
            if den == 0.0 {
                return Err(bad());
            }
            num / den
        }
        None => tok.parse().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// Pooled category probabilities `p_k = sum_m n_km / (n M)`.
pub fn pooled_probabilities<T: Scalar>(table: &ContingencyTable) -> ProbabilityVector<T> {
    let total = T::from_count(table.reps() * table.labs() as u64);
    let p = table.column_totals().into_iter().map(|c| T::from_count(c) / total).collect();
    ProbabilityVector::from_normalized(p)
}

/// Per-laboratory cumulative frequencies `F_km = sum_{i<=k} n_im / n`,
/// one row per laboratory; every row ends at one.
pub fn lab_cumulative<T: Scalar>(table: &ContingencyTable) -> Vec<Vec<T>> {
    let n = T::from_count(table.reps());
    table
        .rows()
        .map(|row| {
            let mut acc = 0u64;
            row.iter()
                .map(|&c| {
                    acc += c;
                    T::from_count(acc) / n
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64 as Q;

    const TABLE3: &str = "lab,cat1,cat2,cat3,cat4,cat5\n\
        Lab A,0,0,0,5,0\nLab B,0,0,1,4,0\nLab C,0,3,2,0,0\nLab D,0,0,5,0,0\nLab E,0,2,2,1,0\n";
    const TABLE4: &str = "lab,cat1,cat2,cat3,cat4,cat5\n\
        Lab A,0,0,1,4,0\nLab B,3,0,1,1,0\nLab C,3,2,0,0,0\nLab D,1,0,4,0,0\nLab E,3,1,1,0,0\n";

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    #[test]
    fn parses_table3() {
        let t = parse_table(TABLE3).unwrap();
        assert_eq!((t.labs(), t.categories(), t.reps()), (5, 5, 5));
        assert_eq!(t.row(2), &[0, 3, 2, 0, 0]);
        assert_eq!(t.labels()[4], "Lab E");
    }

    #[test]
    fn minimal_table() {
        let t = parse_table("lab,a,b\nA,2,0\nB,0,2\n").unwrap();
        assert_eq!((t.labs(), t.categories(), t.reps()), (2, 2, 2));
    }

    #[test]
    fn rejects_unequal_row_sums() {
        let err = parse_table("lab,a,b\nA,2,0\nB,1,2\n").unwrap_err();
        assert!(matches!(err, IngestError::UnequalRowSums { ref label, found: 3, expected: 2, .. } if label == "B"));
        assert!(err.to_string().contains("unequal row sums"));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(parse_table(""), Err(IngestError::Empty));
        assert_eq!(parse_table("# only a comment\n"), Err(IngestError::Empty));
        assert_eq!(parse_table("lab,a,b\n"), Err(IngestError::Empty));
        assert_eq!(parse_table("lab,a\nA,1\nB,1\n"), Err(IngestError::TooFewCategories(1)));
        assert_eq!(parse_table("lab,a,b\nA,1,1\n"), Err(IngestError::TooFewLabs(1)));
        let err = parse_table("lab,a,b\nA,1,x\nB,1,1\n").unwrap_err();
        assert_eq!(err, IngestError::BadCount { line: 2, column: "b".into(), value: "x".into() });
        let err = parse_table("lab,a,b\nA,1,1\nB,-1,3\n").unwrap_err();
        assert!(matches!(err, IngestError::BadCount { line: 3, .. }));
        let err = parse_table("lab,a,b\nA,1.5,0.5\nB,1,1\n").unwrap_err();
        assert!(matches!(err, IngestError::BadCount { line: 2, .. }));
        let err = parse_table("lab,a,b\nA,1,1\n# note\nA,2,0\n").unwrap_err();
        assert_eq!(err, IngestError::DuplicateLab { label: "A".into(), line: 4 });
        let err = parse_table("lab,a,b\nA,1,1\nB,2\n").unwrap_err();
        assert_eq!(err, IngestError::FieldCount { line: 3, expected: 3, found: 2 });
        assert_eq!(parse_table("lab,a,b\nA,0,0\nB,0,0\n"), Err(IngestError::NoResults));
    }

    #[test]
    fn skips_comments_and_blank_lines() {
        let t = parse_table("# study 7\nlab,a,b,c\n# first lab\nA,1,1,0\n\nB,0,1,1\n").unwrap();
        assert_eq!(t.labs(), 2);
        assert_eq!(t.row(1), &[0, 1, 1]);
    }

    #[test]
    fn pooled_table3_and_table4() {
        let p3 = pooled_probabilities::<Q>(&parse_table(TABLE3).unwrap());
        assert_eq!(p3.probs(), &[q(0, 1), q(1, 5), q(2, 5), q(2, 5), q(0, 1)]);
        assert_eq!(p3.cumulative(), &[q(0, 1), q(1, 5), q(3, 5), q(1, 1), q(1, 1)]);
        let p4 = pooled_probabilities::<Q>(&parse_table(TABLE4).unwrap());
        assert_eq!(p4.probs(), &[q(2, 5), q(3, 25), q(7, 25), q(1, 5), q(0, 1)]);
        assert_eq!(p4.cumulative(), &[q(2, 5), q(13, 25), q(4, 5), q(1, 1), q(1, 1)]);
    }

    #[test]
    fn pooled_single_category() {
        let t = parse_table("lab,a,b,c\nA,3,0,0\nB,3,0,0\n").unwrap();
        let p = pooled_probabilities::<f64>(&t);
        assert_eq!(p.probs(), &[1.0, 0.0, 0.0]);
        assert!(p.is_degenerate());
    }

    #[test]
    fn lab_cumulative_rows() {
        let f3 = lab_cumulative::<Q>(&parse_table(TABLE3).unwrap());
        assert_eq!(f3[2], vec![q(0, 1), q(3, 5), q(1, 1), q(1, 1), q(1, 1)]);
        let f4 = lab_cumulative::<Q>(&parse_table(TABLE4).unwrap());
        assert_eq!(f4[1], vec![q(3, 5), q(3, 5), q(4, 5), q(1, 1), q(1, 1)]);
        let last = lab_cumulative::<f64>(&parse_table("lab,a,b,c\nA,0,0,4\nB,1,1,2\n").unwrap());
        assert_eq!(last[0], vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn probability_vector_validation() {
        let p = ProbabilityVector::parse("1/3, 1/3, 1/3").unwrap();
        assert_eq!(p.cumulative().last(), Some(&1.0));
        assert!(ProbabilityVector::parse("3/6,1/6,2/6").is_ok());
        assert!(ProbabilityVector::parse("0.5,0.6").is_err());
        assert!(ProbabilityVector::parse("1.5,-0.5").is_err());
        assert!(ProbabilityVector::parse("1/0,0").is_err());
        assert!(ProbabilityVector::parse("1").is_err());
        assert!(ProbabilityVector::parse("a,b").is_err());
        // accepted within tolerance and renormalized
        let p = ProbabilityVector::new(vec![0.5 + 4e-10, 0.5]).unwrap();
        assert!((p.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn error_lines_are_physical() {
        let err = parse_table("# header follows\nlab,a,b\n\nA,1,1\n# gap\nB,1,x\n").unwrap_err();
        assert_eq!(err, IngestError::BadCount { line: 6, column: "b".into(), value: "x".into() });
    }

    #[test]
    fn csv_round_trip_with_quoted_label() {
        let t = ContingencyTable::new(vec!["Lab, \"X\"".into(), "#2".into()], vec![vec![1, 2], vec![3, 0]]).unwrap();
        assert_eq!(parse_table(&t.to_csv()).unwrap(), t);
    }
}
