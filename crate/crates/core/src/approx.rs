//! Normal approximation of `I_(N)` under laboratory homogeneity.
//!
//! Under the null every laboratory draws its counts from the same
//! multinomial `MN(n; p_1..p_K)`. Replacing each count vector by a Gaussian
//! with the multinomial mean and covariance, the weighted-count form of
//! `I_(N)` (see [`crate::statistics`]) is a linear function of Gaussians
//! once its squared cumulative term is held at its population value, which
//! gives `I_(N) ~ N(mu, sigma2)` with, for weights `w_k = K - k`:
//!
//! ```text
//! mu     = 4/(K-1)         * [ sum_k w_k p_k - sum_k F_k^2 ]
//! sigma2 = 16/(n M (K-1)^2) * [ sum_k w_k^2 p_k (1 - p_k) - sum_{k != l} w_k w_l p_k p_l ]
//! ```
//!
//! Sums run over `k, l < K`.

use serde::Serialize;
use thiserror::Error;

use crate::ingest::ProbabilityVector;
use crate::scalar::{sum, Scalar};
use crate::special::{normal_cdf, std_normal_quantile, SpecialError};

pub use crate::special::{chi2_quantile, std_normal_quantile as normal_quantile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApproxError {
    #[error("degenerate null: the approximate distribution has zero variance")]
    DegenerateNull,
    #[error(transparent)]
    Special(#[from] SpecialError),
}

/// Mean and variance of the approximate null distribution of `I_(N)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalApprox<T> {
    pub mu: T,
    pub sigma2: T,
    pub categories: usize,
    pub labs: usize,
    pub reps: u64,
}

impl NormalApprox<f64> {
    /// `F^a(x)`, the approximate CDF of `I_(N)`.
    pub fn cdf(&self, x: f64) -> f64 {
        normal_cdf(x, self.mu, self.sigma2)
    }
}

/// Gaussian surrogate for one laboratory's first `K - 1` counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianCountModel<T> {
    /// `n p_k`.
    pub mean: Vec<T>,
    /// Multinomial covariance: `n p_i (1 - p_i)` on the diagonal,
    /// `-n p_i p_j` off it.
    pub cov: Vec<Vec<T>>,
}

impl<T: Scalar> GaussianCountModel<T> {
    /// Variance of `sum_k w_k X_k` under the model.
    pub fn linear_variance(&self, weights: &[T]) -> T {
        assert_eq!(weights.len(), self.mean.len(), "one weight per modelled count");
        sum(self
            .cov
            .iter()
            .zip(weights)
            .flat_map(|(row, &wi)| row.iter().zip(weights).map(move |(&c, &wj)| wi * c * wj)))
    }

    pub fn linear_mean(&self, weights: &[T]) -> T {
        sum(self.mean.iter().zip(weights).map(|(&m, &w)| m * w))
    }
}

/// Weights `K - k` for `k = 1..K-1`.
pub fn cumulative_weights<T: Scalar>(categories: usize) -> Vec<T> {
    (1..categories).map(|k| T::from_count((categories - k) as u64)).collect()
}

pub fn gaussian_count_model<T: Scalar>(p: &ProbabilityVector<T>, reps: u64) -> GaussianCountModel<T> {
    let n = T::from_count(reps);
    let head = &p.probs()[..p.categories() - 1];
    let mean = head.iter().map(|&pk| n * pk).collect();
    let cov = head
        .iter()
        .enumerate()
        .map(|(i, &pi)| {
            head.iter()
                .enumerate()
                .map(|(j, &pj)| if i == j { n * pi * (T::one() - pi) } else { T::zero() - n * pi * pj })
                .collect()
        })
        .collect();
    GaussianCountModel { mean, cov }
}

/// Null mean and variance of `I_(N)` for `labs` laboratories with `reps`
/// results each.
pub fn normal_params<T: Scalar>(p: &ProbabilityVector<T>, reps: u64, labs: usize) -> NormalApprox<T> {
    let k_max = p.categories();
    let head = &p.probs()[..k_max - 1];
    let weights = cumulative_weights::<T>(k_max);
    let norm = T::ordinal_norm(k_max);

    let linear = sum(weights.iter().zip(head).map(|(&w, &pk)| w * pk));
    let squares = sum(p.cumulative()[..k_max - 1].iter().map(|&f| f * f));
    let mu = norm * (linear - squares);

    let diagonal = sum(weights.iter().zip(head).map(|(&w, &pk)| w * w * pk * (T::one() - pk)));
    let own = sum(weights.iter().zip(head).map(|(&w, &pk)| (w * pk) * (w * pk)));
    let cross = linear * linear - own;
    let scale = norm * norm / T::from_count(reps * labs as u64);
    let sigma2 = scale * (diagonal - cross);

    NormalApprox { mu, sigma2, categories: k_max, labs, reps }
}

/// Upper-`alpha` critical value `mu + z_{1-alpha} sigma`.
pub fn critical_value(approx: &NormalApprox<f64>, alpha: f64) -> Result<f64, ApproxError> {
    let z = std_normal_quantile(1.0 - alpha)?;
    if approx.sigma2.is_nan() || approx.sigma2 <= 0.0 {
        return Err(ApproxError::DegenerateNull);
    }
    if alpha == 0.5 {
        return Ok(approx.mu);
    }
    Ok(approx.mu + z * approx.sigma2.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64 as Q;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    fn probs(p: &[Q]) -> ProbabilityVector<Q> {
        ProbabilityVector::new(p.to_vec()).unwrap()
    }

    #[test]
    fn count_model_binomial() {
        let m = gaussian_count_model(&probs(&[q(1, 2), q(1, 2)]), 10);
        assert_eq!(m.mean, vec![q(5, 1)]);
        assert_eq!(m.cov, vec![vec![q(5, 2)]]);
    }

    #[test]
    fn count_model_uniform_three() {
        let m = gaussian_count_model(&probs(&[q(1, 3); 3]), 5);
        assert_eq!(m.mean, vec![q(5, 3), q(5, 3)]);
        assert_eq!(m.cov, vec![vec![q(10, 9), q(-5, 9)], vec![q(-5, 9), q(10, 9)]]);
    }

    #[test]
    fn count_model_degenerate() {
        let m = gaussian_count_model(&probs(&[q(1, 1), q(0, 1)]), 7);
        assert_eq!(m.mean, vec![q(7, 1)]);
        assert_eq!(m.cov, vec![vec![q(0, 1)]]);
    }

    #[test]
    fn normal_params_uniform_three() {
        let a = normal_params(&probs(&[q(1, 3); 3]), 5, 5);
        assert_eq!(a.mu, q(8, 9));
        assert_eq!(a.sigma2, q(8, 75));
    }

    #[test]
    fn normal_params_two_categories() {
        for (n, m) in [(1u64, 2usize), (10, 5), (7, 13)] {
            let a = normal_params(&probs(&[q(1, 2), q(1, 2)]), n, m);
            assert_eq!(a.mu, q(1, 1));
            assert_eq!(a.sigma2, q(16, 1) * q(1, 4) / Q::from_integer((n * m as u64) as i64));
        }
        let a = normal_params(&probs(&[q(3, 10), q(7, 10)]), 4, 3);
        assert_eq!(a.mu, q(4, 1) * q(3, 10) * q(7, 10));
        assert_eq!(a.sigma2, q(16, 12) * q(21, 100));
    }

    #[test]
    fn normal_params_degenerate() {
        let a = normal_params(&probs(&[q(1, 1), q(0, 1), q(0, 1)]), 9, 4);
        assert_eq!(a.mu, q(0, 1));
        assert_eq!(a.sigma2, q(0, 1));
        let f = normal_params(&ProbabilityVector::new(vec![1.0, 0.0, 0.0]).unwrap(), 9, 4);
        assert_eq!(critical_value(&f, 0.05), Err(ApproxError::DegenerateNull));
    }

    #[test]
    fn critical_values_for_plug_in_nulls() {
        let t3 = NormalApprox { mu: 0.4, sigma2: 0.0224, categories: 5, labs: 5, reps: 5 };
        assert!((critical_value(&t3, 0.05).unwrap() - 0.646).abs() < 0.0005);
        let t4 = NormalApprox { mu: 0.6496, sigma2: 0.056064, categories: 5, labs: 5, reps: 5 };
        assert!((critical_value(&t4, 0.05).unwrap() - 1.039).abs() < 0.0005);
        assert_eq!(critical_value(&t4, 0.5).unwrap(), 0.6496);
        assert!(critical_value(&t4, 1.0).is_err());
    }

    #[test]
    fn linear_moments_reproduce_sigma2() {
        let p = probs(&[q(1, 2), q(1, 6), q(1, 3)]);
        let model = gaussian_count_model(&p, 5);
        let w = cumulative_weights::<Q>(3);
        let approx = normal_params(&p, 5, 5);
        // c/(nM) * sum over M labs of sum_k w_k X_km
        let scale = q(2, 1) / q(25, 1);
        assert_eq!(scale * scale * q(5, 1) * model.linear_variance(&w), approx.sigma2);
        assert_eq!(scale * q(5, 1) * model.linear_mean(&w) - q(2, 1) * (q(1, 4) + q(4, 9)), approx.mu);
    }
}
