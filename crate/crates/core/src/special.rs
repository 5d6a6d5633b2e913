//! Normal and chi-square distribution functions.
//!
//! The normal quantile is Wichura's AS241 (`PPND16`) followed by one Newton
//! step against the normal CDF. The normal CDF and the chi-square CDF both
//! reduce to the regularized incomplete gamma function, evaluated by its
//! power series below `a + 1` and by a Lentz continued fraction above.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecialError {
    #[error("probability {0} outside the open interval (0, 1)")]
    Probability(f64),
    #[error("degrees of freedom must be at least 1, got {0}")]
    DegreesOfFreedom(u64),
}

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 500;

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7).
#[allow(clippy::excessive_precision)]
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        gamma_series(a, x)
    } else {
        1.0 - gamma_continued_fraction(a, x)
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 - P(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_series(a, x)
    } else {
        gamma_continued_fraction(a, x)
    }
}

fn gamma_prefactor(a: f64, x: f64) -> f64 {
    (a * x.ln() - x - ln_gamma(a)).exp()
}

fn gamma_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut total = term;
    let mut ap = a;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        total += term;
        if term.abs() < total.abs() * EPS {
            break;
        }
    }
    total * gamma_prefactor(a, x)
}

fn gamma_continued_fraction(a: f64, x: f64) -> f64 {
    // modified Lentz
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h * gamma_prefactor(a, x)
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x >= 0.0 {
        gamma_q(0.5, x * x)
    } else {
        1.0 + gamma_p(0.5, x * x)
    }
}

/// Standard normal CDF.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// CDF of `N(mean, variance)`; a zero variance gives a step at the mean.
pub fn normal_cdf(x: f64, mean: f64, variance: f64) -> f64 {
    if variance <= 0.0 {
        return if x >= mean { 1.0 } else { 0.0 };
    }
    std_normal_cdf((x - mean) / variance.sqrt())
}

/// Standard normal quantile `Phi^{-1}(q)`.
pub fn std_normal_quantile(q: f64) -> Result<f64, SpecialError> {
    if !(q > 0.0 && q < 1.0) {
        return Err(SpecialError::Probability(q));
    }
    if q == 0.5 {
        return Ok(0.0);
    }
    let x = ppnd16(q);
    // one Newton step on Phi(x) - q
    let density = std_normal_pdf(x);
    if density > 0.0 {
        let residual = if q < 0.5 { std_normal_cdf(x) - q } else { (1.0 - q) - std_normal_cdf(-x) };
        let step = residual / density;
        if step.is_finite() {
            return Ok(x - step);
        }
    }
    Ok(x)
}

/// Wichura (1988), Algorithm AS241, `PPND16`.
fn ppnd16(p: f64) -> f64 {
    const A: [f64; 8] = [
        3.387_132_872_796_366_5,
        1.331_416_678_917_843_8e2,
        1.971_590_950_306_551_3e3,
        1.373_169_376_550_946e4,
        4.592_195_393_154_987e4,
        6.726_577_092_700_87e4,
        3.343_057_558_358_813e4,
        2.509_080_928_730_122_7e3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091e1,
        6.871_870_074_920_579e2,
        5.394_196_021_424_751e3,
        2.121_379_430_158_659_7e4,
        3.930_789_580_009_271e4,
        2.872_908_573_572_194_3e4,
        5.226_495_278_852_545e3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_5,
        4.630_337_846_156_546,
        5.769_497_221_460_691,
        3.647_848_324_763_204_5,
        1.270_458_252_452_368_4,
        2.417_807_251_774_506e-1,
        2.272_384_498_926_918_4e-2,
        7.745_450_142_783_414e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_759,
        1.676_384_830_183_803_8,
        6.897_673_349_851e-1,
        1.481_039_764_274_800_8e-1,
        1.519_866_656_361_645_7e-2,
        5.475_938_084_995_345e-4,
        1.050_750_071_644_416_9e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103,
        5.463_784_911_164_114,
        1.784_826_539_917_291_3,
        2.965_605_718_285_048_7e-1,
        2.653_218_952_657_612_4e-2,
        1.242_660_947_388_078_4e-3,
        2.711_555_568_743_487_6e-5,
        2.010_334_399_292_288_1e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_88e-1,
        1.369_298_809_227_358e-1,
        1.487_536_129_085_061_5e-2,
        7.868_691_311_456_133e-4,
        1.846_318_317_510_054_8e-5,
        1.421_511_758_316_446e-7,
        2.044_263_103_389_939_8e-15,
    ];
    fn poly(c: &[f64; 8], x: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &v| acc * x + v)
    }

    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let r = (-r.ln()).sqrt();
    let value = if r <= 5.0 {
        let r = r - 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        let r = r - 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -value
    } else {
        value
    }
}

/// Chi-square CDF with `df` degrees of freedom.
pub fn chi2_cdf(x: f64, df: u64) -> f64 {
    gamma_p(df as f64 / 2.0, x / 2.0)
}

/// Chi-square quantile: the `x` with `chi2_cdf(x, df) = q`.
pub fn chi2_quantile(df: u64, q: f64) -> Result<f64, SpecialError> {
    if df == 0 {
        return Err(SpecialError::DegreesOfFreedom(df));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(SpecialError::Probability(q));
    }
    let k = df as f64;
    let a = k / 2.0;

    // Wilson-Hilferty start, clamped positive
    let z = std_normal_quantile(q)?;
    let h = 2.0 / (9.0 * k);
    let mut x = (k * (1.0 - h + z * h.sqrt()).powi(3)).max(1e-8);

    // Bracket the root, then safeguarded Newton.
    let mut lo = 0.0;
    let mut hi = x.max(1.0);
    while chi2_cdf(hi, df) < q {
        lo = hi;
        hi *= 2.0;
    }
    if x >= hi || x <= lo {
        x = 0.5 * (lo + hi);
    }
    for _ in 0..200 {
        let residual = if q < 0.5 { chi2_cdf(x, df) - q } else { (1.0 - q) - gamma_q(a, x / 2.0) };
        if residual > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let density = ((a - 1.0) * (x / 2.0).ln() - x / 2.0 - ln_gamma(a)).exp() / 2.0;
        let mut next = x - residual / density;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x.max(1e-300) {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_reference_values() {
        assert!((std_normal_quantile(0.95).unwrap() - 1.644_853_626_951_472_7).abs() < 1e-14);
        assert!((std_normal_quantile(0.975).unwrap() - 1.959_963_984_540_054_2).abs() < 1e-14);
        assert_eq!(std_normal_quantile(0.5).unwrap(), 0.0);
    }

    #[test]
    fn quantile_symmetry_and_extremes() {
        for &q in &[1e-10, 0.001, 0.2, 0.45] {
            let lo = std_normal_quantile(q).unwrap();
            let hi = std_normal_quantile(1.0 - q).unwrap();
            assert!((lo + hi).abs() < 1e-6 * lo.abs().max(1.0), "q={q}");
            assert!(lo < 0.0);
        }
        assert!(std_normal_quantile(1e-300).unwrap() < -37.0);
        assert!((std_normal_quantile(1e-10).unwrap() + 6.361_340_902_404_056).abs() < 1e-9);
    }

    #[test]
    fn quantile_rejects_out_of_range() {
        for q in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(std_normal_quantile(q).is_err());
        }
    }

    #[test]
    fn cdf_inverts_quantile() {
        for i in 1..1000 {
            let q = i as f64 / 1000.0;
            let x = std_normal_quantile(q).unwrap();
            assert!((std_normal_cdf(x) - q).abs() < 1e-14, "q={q}");
        }
    }

    #[test]
    fn chi2_two_df_closed_form() {
        let q = 1.0 - (-1.0f64).exp();
        assert!((chi2_quantile(2, q).unwrap() - 2.0).abs() < 1e-12);
        for x in [0.1, 1.0, 3.0, 10.0, 40.0] {
            assert!((chi2_cdf(x, 2) - (1.0 - (-x / 2.0).exp())).abs() < 1e-14);
        }
    }

    #[test]
    fn chi2_matches_squared_normal() {
        let z = std_normal_quantile(0.975).unwrap();
        assert!((chi2_quantile(1, 0.95).unwrap() - z * z).abs() < 1e-10);
    }

    #[test]
    fn chi2_rejects_invalid() {
        assert_eq!(chi2_quantile(0, 0.5), Err(SpecialError::DegreesOfFreedom(0)));
        assert!(chi2_quantile(3, 1.0).is_err());
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!((ln_gamma(1.0)).abs() < 1e-14);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
        assert!((ln_gamma(10.0) - 362_880f64.ln()).abs() < 1e-12);
    }
}
