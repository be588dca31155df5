//! Small numerical helpers shared by the channel, detector and quantizer.

use std::f64::consts::{LN_2, PI};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Natural log of the Gaussian density `N(y | mean, var)`.
#[inline]
pub fn log_normal_pdf(y: f64, mean: f64, var: f64) -> f64 {
    let d = y - mean;
    -0.5 * d * d / var - 0.5 * var.ln() - LN_SQRT_2PI
}

#[inline]
pub fn normal_pdf(y: f64, mean: f64, var: f64) -> f64 {
    let d = y - mean;
    (-0.5 * d * d / var).exp() / (2.0 * PI * var).sqrt()
}

/// Standard normal CDF.
#[inline]
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// `P(lo <= Y < hi)` for `Y ~ N(mean, var)`; either bound may be infinite.
///
/// Evaluated on whichever side of the mean keeps both tail terms small, so
/// far-tail intervals keep their relative precision instead of cancelling.
pub fn normal_interval_prob(lo: f64, hi: f64, mean: f64, var: f64) -> f64 {
    debug_assert!(lo <= hi);
    let sd = var.sqrt();
    let zl = (lo - mean) / sd;
    let zh = (hi - mean) / sd;
    let p = if zl >= 0.0 {
        // Both bounds right of the mean: difference of upper tails.
        std_normal_cdf(-zl) - std_normal_cdf(-zh)
    } else {
        std_normal_cdf(zh) - std_normal_cdf(zl)
    };
    p.max(0.0)
}

/// Terms this far below the running maximum are dropped from log-domain
/// sums; their relative weight is below 2e-22.
pub const EXP_CUTOFF: f64 = 50.0;

/// `exp(d)` for `d <= 0` relative to a maximum: exact 1 at the maximum and 0
/// below [`EXP_CUTOFF`], which skips most exponentials in peaked mixtures.
#[inline]
pub fn exp_rel(d: f64) -> f64 {
    if d == 0.0 {
        1.0
    } else if d < -EXP_CUTOFF {
        0.0
    } else {
        d.exp()
    }
}

/// `log(sum(exp(xs)))`, returning `-inf` for an empty or all `-inf` slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|&x| (x - m).exp()).sum::<f64>().ln()
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let h = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    h(p) + h(1.0 - p)
}

#[inline]
pub(crate) fn log2(x: f64) -> f64 {
    x.ln() / LN_2
}

/// Normalize in place to unit sum. Returns the original sum.
pub(crate) fn normalize(xs: &mut [f64]) -> f64 {
    let s: f64 = xs.iter().sum();
    if s > 0.0 && s.is_finite() {
        let inv = 1.0 / s;
        xs.iter_mut().for_each(|x| *x *= inv);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_and_linear_pdf_agree() {
        for &(y, m, v) in &[(0.3, 0.1, 0.04), (2.0, 3.3, 0.0081), (-1.0, 1.0, 1.0)] {
            assert_relative_eq!(log_normal_pdf(y, m, v).exp(), normal_pdf(y, m, v), max_relative = 1e-12);
        }
    }

    #[test]
    fn cdf_reference_values() {
        assert_relative_eq!(std_normal_cdf(0.0), 0.5, epsilon = 1e-16);
        assert_relative_eq!(std_normal_cdf(1.0), 0.841_344_746_068_542_9, epsilon = 1e-15);
        assert_relative_eq!(std_normal_cdf(-3.0), 0.001_349_898_031_630_094_6, max_relative = 1e-12);
        // Far tail keeps relative precision.
        assert_relative_eq!(std_normal_cdf(-20.0), 2.753_624_118_606_233_8e-89, max_relative = 1e-10);
    }

    #[test]
    fn interval_prob_tails() {
        let p = normal_interval_prob(10.0, f64::INFINITY, 0.0, 1.0);
        assert_relative_eq!(p, 7.619_853_024_160_527e-24, max_relative = 1e-10);
        assert_eq!(normal_interval_prob(f64::NEG_INFINITY, f64::INFINITY, 3.0, 2.0), 1.0);
    }

    #[test]
    fn lse() {
        assert_relative_eq!(log_sum_exp(&[0.0, 0.0]), 2f64.ln());
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY; 3]), f64::NEG_INFINITY);
        assert_relative_eq!(log_sum_exp(&[-1000.0, -1000.0]), -1000.0 + 2f64.ln());
    }
}
