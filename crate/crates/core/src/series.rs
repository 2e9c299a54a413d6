//! Log-domain accumulation of signed series and integer-shape gamma helpers.

use crate::error::{Error, Result};

#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

#[inline]
pub fn ln_factorial(m: u64) -> f64 {
    libm::lgamma(m as f64 + 1.0)
}

/// ln C(m, j); `-∞` when `j > m`.
pub fn ln_binomial(m: u64, j: u64) -> f64 {
    if j > m {
        return f64::NEG_INFINITY;
    }
    ln_factorial(m) - ln_factorial(j) - ln_factorial(m - j)
}

/// `ln(e^a + e^b)` without overflow.
#[inline]
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

pub fn log_sum_exp<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    terms.into_iter().fold(f64::NEG_INFINITY, ln_add_exp)
}

/// Sum of real terms, each supplied as a sign and a log-magnitude.
///
/// Positive and negative parts are kept as separate log-sum-exp accumulators
/// and only exponentiated in [`SignedLogSum::value`], so terms like
/// `(αn)^j Γ(n-j) / j!` never overflow for large `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLogSum {
    ln_pos: f64,
    ln_neg: f64,
    terms: usize,
}

impl Default for SignedLogSum {
    fn default() -> Self {
        Self::new()
    }
}

impl SignedLogSum {
    pub const fn new() -> Self {
        Self { ln_pos: f64::NEG_INFINITY, ln_neg: f64::NEG_INFINITY, terms: 0 }
    }

    /// Adds `sign * exp(ln_mag)`; a zero or negative `sign` selects the negative part.
    pub fn add_ln(&mut self, negative: bool, ln_mag: f64) {
        debug_assert!(!ln_mag.is_nan());
        if negative {
            self.ln_neg = ln_add_exp(self.ln_neg, ln_mag);
        } else {
            self.ln_pos = ln_add_exp(self.ln_pos, ln_mag);
        }
        self.terms += 1;
    }

    pub fn add(&mut self, v: f64) {
        if v != 0.0 {
            self.add_ln(v < 0.0, v.abs().ln());
        } else {
            self.terms += 1;
        }
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    /// ln of Σ|terms|; a conditioning yardstick for the signed total.
    pub fn ln_abs_sum(&self) -> f64 {
        ln_add_exp(self.ln_pos, self.ln_neg)
    }

    /// Signed total, scaled by `exp(ln_scale)` before subtraction.
    pub fn value_scaled(&self, ln_scale: f64) -> f64 {
        (self.ln_pos + ln_scale).exp() - (self.ln_neg + ln_scale).exp()
    }

    pub fn value(&self) -> f64 {
        self.value_scaled(0.0)
    }
}

/// `∫ₐ^∞ z^(m-1) e^(-rate z) dz = Γ(m)/rateᵐ · e^(-rate a) Σ_{i<m} (rate a)^i / i!`.
pub fn upper_incomplete_gamma_int(m: u32, rate: f64, a: f64) -> Result<f64> {
    Ok(ln_upper_incomplete_gamma_int(m, rate, a)?.exp())
}

pub fn ln_upper_incomplete_gamma_int(m: u32, rate: f64, a: f64) -> Result<f64> {
    if m < 1 {
        return Err(Error::Domain("incomplete gamma shape must be at least 1".into()));
    }
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::Domain(format!("rate must be positive, got {rate}")));
    }
    if !(a >= 0.0) {
        return Err(Error::Domain(format!("lower limit must be nonnegative, got {a}")));
    }
    let ra = rate * a;
    let tail = if ra == 0.0 {
        0.0
    } else {
        let ln_ra = ra.ln();
        log_sum_exp((0..m).map(|i| i as f64 * ln_ra - ln_factorial(i as u64)))
    };
    Ok(ln_gamma(m as f64) - m as f64 * rate.ln() - ra + tail)
}

/// ln Σ_{i=0}^{m} y^i / i! for y ≥ 0 (the truncated exponential series).
pub fn ln_exp_partial_sum(y: f64, m: u64) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    let ln_y = y.ln();
    log_sum_exp((0..=m).map(|i| i as f64 * ln_y - ln_factorial(i)))
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `e^(-y) Σ_{i<=m} y^i / i!` for `m = 0..=top`, in the linear domain.
///
/// `None` when `e^(-y)` underflows.
pub fn poisson_cdf_prefix(y: f64, top: u64) -> Option<Vec<f64>> {
    let mut term = (-y).exp();
    if !(term > 0.0) {
        return None;
    }
    let mut acc = CompensatedSum::default();
    let mut out = Vec::with_capacity(top as usize + 1);
    for i in 0..=top {
        if i > 0 {
            term *= y / i as f64;
        }
        acc.add(term);
        out.push(acc.value());
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn compensated_sum_recovers_cancelled_low_bits() {
        let mut s = CompensatedSum::default();
        for v in [1.0, 1e-16, -1.0, 1e-16] {
            s.add(v);
        }
        assert_eq!(s.value(), 2e-16);
    }

    #[test]
    fn poisson_prefix_matches_log_partial_sum() {
        let y = 3.7;
        let pre = poisson_cdf_prefix(y, 12).unwrap();
        for (m, v) in pre.iter().enumerate() {
            let want = (ln_exp_partial_sum(y, m as u64) - y).exp();
            assert!((v - want).abs() < 1e-14, "m={m}: {v} vs {want}");
        }
        assert!(poisson_cdf_prefix(800.0, 3).is_none());
    }

    #[test]
    fn incomplete_gamma_examples() {
        let alpha = 1.7;
        let a = 0.9;
        let v = upper_incomplete_gamma_int(1, alpha, a).unwrap();
        assert!((v - (-alpha * a).exp() / alpha).abs() < 1e-15);
        let g = upper_incomplete_gamma_int(4, 2.0, 0.0).unwrap();
        assert!((g - 6.0 / 16.0).abs() < 1e-15);
        let v = upper_incomplete_gamma_int(3, 1.0, 2.0).unwrap();
        assert!((v - 10.0 * (-2.0f64).exp()).abs() < 1e-14);
        assert!((v - 1.35335).abs() < 1e-5);
        assert!(upper_incomplete_gamma_int(0, 1.0, 1.0).is_err());
    }

    #[test]
    fn signed_sum_basic() {
        let mut s = SignedLogSum::new();
        for v in [3.0, -1.5, 0.25, -0.125, 0.0] {
            s.add(v);
        }
        assert!((s.value() - 1.625).abs() < 1e-15);
        assert_eq!(s.terms(), 5);
        assert_eq!(SignedLogSum::new().value(), 0.0);
    }

    #[test]
    fn signed_sum_large_magnitudes() {
        let mut s = SignedLogSum::new();
        s.add_ln(false, 800.0);
        s.add_ln(true, 800.0 + (0.5f64).ln());
        assert!((s.value_scaled(-800.0) - 0.5).abs() < 1e-13);
    }

    #[test]
    fn binomial() {
        assert!((ln_binomial(10, 3).exp() - 120.0).abs() < 1e-11);
        assert_eq!(ln_binomial(3, 4), f64::NEG_INFINITY);
        assert_eq!(ln_binomial(0, 0), 0.0);
    }

    proptest! {
        #[test]
        fn signed_sum_matches_naive(vals in proptest::collection::vec(-1e3f64..1e3, 1..30)) {
            let mut s = SignedLogSum::new();
            vals.iter().for_each(|&v| s.add(v));
            let naive: f64 = vals.iter().sum();
            let scale: f64 = vals.iter().map(|v| v.abs()).sum();
            prop_assert!((s.value() - naive).abs() <= 1e-13 * scale.max(1e-300));
        }

        #[test]
        fn exp_partial_sum_bounded(y in 0.0f64..30.0, m in 0u64..40) {
            let v = ln_exp_partial_sum(y, m);
            prop_assert!(v <= y + 1e-12);
        }
    }
}
