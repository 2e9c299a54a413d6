//! Closed-form sampling moments of the four density/distribution estimators
//! and of α̃, plus exact Bessel-K and Kummer-U representations.
//!
//! Throughout, `c = ln(x/k) >= 0`. The series come from expanding
//! `(k/x)^(rw)` or a binomial in the integrand and integrating term by term;
//! terms whose gamma argument would be non-positive are dropped. At `x = k`
//! only the leading term survives and the series are exact. For `x > k` the
//! dropped tail is not zero, so these values are approximations and the
//! Bessel/Kummer forms (or the quadrature oracle) are authoritative.
//!
//! Summation limits used here, all keeping every gamma argument >= 1:
//!
//! | quantity             | index range                         |
//! |----------------------|-------------------------------------|
//! | E f̃                  | `j <= n-2`                          |
//! | E f̃²                 | `j <= n-3`                          |
//! | E F̃, E F̃²            | `j <= n-1`                          |
//! | E f̃^r                | `j <= n-r-1`                        |
//! | E f̂^r                | `j <= n-r-1`, `i <= n-r-j-1`        |
//! | E F̂^r inner sum      | `i <= min(j(n-1), n-1)`             |

use crate::error::{Error, Result};
use crate::estimators::{EstimatorKind, Method, Target};
use crate::model::ParetoParams;
use crate::quadrature::QuadratureConfig;
use crate::report::{Engine, MomentReport};
use crate::series::{
    ln_binomial, ln_exp_partial_sum, ln_factorial, ln_gamma, poisson_cdf_prefix, CompensatedSum, SignedLogSum,
};
use crate::special::{ln_bessel_k, ln_kummer_u};

pub use crate::series::upper_incomplete_gamma_int;

/// `ln c` together with whether `c` is zero, for powers `(-c)^j`.
#[derive(Clone, Copy)]
struct LogPoint {
    c: f64,
    ln_c: f64,
}

impl LogPoint {
    fn new(p: &ParetoParams, x: f64) -> Result<Self> {
        if x.is_nan() || x < p.k() {
            return Err(Error::Domain(format!("evaluation point {x} lies below k = {}", p.k())));
        }
        let c = (x / p.k()).ln();
        Ok(Self { c, ln_c: c.ln() })
    }

    fn at_k(&self) -> bool {
        self.c == 0.0
    }

    /// Sign and log-magnitude of `(scale · ln(k/x))^j`; `None` when it vanishes.
    fn neg_pow(&self, j: u64, ln_scale: f64) -> Option<(bool, f64)> {
        if j == 0 {
            return Some((false, 0.0));
        }
        if self.at_k() {
            return None;
        }
        Some((j % 2 == 1, j as f64 * (self.ln_c + ln_scale)))
    }
}

/// C(r, j) built multiplicatively, exact for the small orders used here.
fn binomial(r: u64, j: u64) -> f64 {
    (0..j).fold(1.0, |b, i| b * (r - i) as f64 / (i + 1) as f64)
}

fn require_n(n: usize, min: usize, order: u32) -> Result<()> {
    if n < min {
        Err(Error::MomentDoesNotExist { n, order })
    } else {
        Ok(())
    }
}

/// Density of α̃: `(αn)^n / (Γ(n) w^(n+1)) · exp(-αn/w)`.
pub fn g_density(w: f64, n: usize, alpha: f64) -> f64 {
    ln_g_density(w, n, alpha).exp()
}

pub fn ln_g_density(w: f64, n: usize, alpha: f64) -> f64 {
    if !(w > 0.0 && w < f64::INFINITY) || n == 0 {
        return f64::NEG_INFINITY;
    }
    let an = alpha * n as f64;
    n as f64 * an.ln() - ln_gamma(n as f64) - (n as f64 + 1.0) * w.ln() - an / w
}

/// Density of `t = Πxᵢ`, parameterised by `ln t`:
/// `αⁿ k^(nα) / (n-1)! · t^(-α-1) [ln t - n ln k]^(n-1)` on `t >= kⁿ`.
pub fn ln_h_star_density(log_t: f64, n: usize, p: &ParetoParams) -> f64 {
    let (alpha, k) = (p.alpha(), p.k());
    let z = log_t - n as f64 * k.ln();
    if n == 0 || !(z > 0.0) {
        return f64::NEG_INFINITY;
    }
    let nf = n as f64;
    nf * alpha.ln() + nf * alpha * k.ln() - ln_gamma(nf) - (alpha + 1.0) * log_t + (nf - 1.0) * z.ln()
}

pub fn h_star_density(t: f64, n: usize, p: &ParetoParams) -> f64 {
    if !(t > 0.0) {
        return 0.0;
    }
    ln_h_star_density(t.ln(), n, p).exp()
}

/// Exact moments of α̃: mean `αn/(n-1)`, second moment `(αn)²/((n-1)(n-2))`.
pub fn mle_alpha_moments(n: usize, alpha: f64) -> Result<MomentReport> {
    require_n(n, 3, 2)?;
    let nf = n as f64;
    let mean = alpha * nf / (nf - 1.0);
    let second = (alpha * nf).powi(2) / ((nf - 1.0) * (nf - 2.0));
    Ok(MomentReport::from_moments(Engine::ClosedForm, EstimatorKind::MLE_ALPHA, None, mean, second, alpha))
}

/// `α²(n²+n-2) / ((n-1)²(n-2))`, the pre-simplified MSE of α̃.
pub fn mle_alpha_mse_formula(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    alpha * alpha * (nf * nf + nf - 2.0) / ((nf - 1.0).powi(2) * (nf - 2.0))
}

/// Moments of α̂ = (n-1)/S: unbiased with variance `α²/(n-2)`.
pub fn umvue_alpha_moments(n: usize, alpha: f64) -> Result<MomentReport> {
    require_n(n, 3, 2)?;
    let mse = alpha * alpha / (n as f64 - 2.0);
    Ok(MomentReport::unbiased(Engine::ClosedForm, EstimatorKind::UMVUE_ALPHA, None, alpha, mse))
}

/// `E α̃^r = (αn)^r Γ(n-r)/Γ(n)` and `E α̂^r = ((n-1)α)^r Γ(n-r)/Γ(n)`; finite for `n > r`.
pub fn alpha_raw_moment(method: Method, n: usize, alpha: f64, r: u32) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidParameter("moment order must be at least 1".into()));
    }
    require_n(n, r as usize + 1, r)?;
    let (nf, rf) = (n as f64, r as f64);
    let scale = match method {
        Method::Mle => nf,
        Method::Umvue => nf - 1.0,
    };
    Ok((rf * (scale * alpha).ln() + ln_gamma(nf - rf) - ln_gamma(nf)).exp())
}

// ---------------------------------------------------------------------------
// MLE series
// ---------------------------------------------------------------------------

/// Series for E(f̃(x)):
/// `1/(Γ(n) x) Σ_{j=0}^{n-2} (nα)^(j+1)/j! · Γ(n-j-1) · (ln(k/x))^j`.
pub fn e_mle_pdf(p: &ParetoParams, n: usize, x: f64) -> Result<f64> {
    require_n(n, 2, 1)?;
    let pt = LogPoint::new(p, x)?;
    let ln_an = (n as f64 * p.alpha()).ln();
    let mut acc = SignedLogSum::new();
    for j in 0..=(n as u64 - 2) {
        if let Some((neg, ln_pow)) = pt.neg_pow(j, 0.0) {
            let ln_mag = (j + 1) as f64 * ln_an - ln_factorial(j) + ln_gamma((n as u64 - j - 1) as f64) + ln_pow;
            acc.add_ln(neg, ln_mag);
        }
    }
    Ok(acc.value_scaled(-ln_gamma(n as f64) - x.ln()))
}

/// `1/Γ(n) Σ_{j=0}^{n-1} (m·αn)^j/j! · Γ(n-j) · (ln(k/x))^j`, the building block of the F̃ moments.
///
/// Near x = k the moments are `1 - 2s₁ + s₂` with every `s ≈ 1`, so the terms
/// are accumulated in the linear domain through the ratio
/// `-mαnc / ((j+1)(n-1-j))`; log-domain terms would each carry a rounding
/// error of order `ε·ln Γ(n)`. Logs are only used if a term overflows.
fn mle_cdf_block(pt: &LogPoint, n: usize, alpha: f64, m: f64) -> f64 {
    let nu = n as u64;
    let ratio = -m * n as f64 * alpha * pt.c;
    let mut t = 1.0;
    let mut acc = CompensatedSum::default();
    acc.add(t);
    for j in 0..nu - 1 {
        t *= ratio / ((j + 1) as f64 * (nu - 1 - j) as f64);
        acc.add(t);
    }
    let v = acc.value();
    if v.is_finite() {
        v
    } else {
        mle_cdf_block_ln(pt, n, alpha, m).value_scaled(-ln_gamma(n as f64))
    }
}

fn mle_cdf_block_ln(pt: &LogPoint, n: usize, alpha: f64, m: f64) -> SignedLogSum {
    let ln_an = (n as f64 * alpha).ln();
    let mut acc = SignedLogSum::new();
    for j in 0..n as u64 {
        if let Some((neg, ln_pow)) = pt.neg_pow(j, 0.0) {
            let ln_mag = j as f64 * (m.ln() + ln_an) - ln_factorial(j) + ln_gamma((n as u64 - j) as f64) + ln_pow;
            acc.add_ln(neg, ln_mag);
        }
    }
    acc
}

/// Series for E(F̃(x)): `1 - 1/Γ(n) Σ_{j=0}^{n-1} (αn)^j/j! Γ(n-j) (ln(k/x))^j`.
///
/// The raw value is returned even when it falls outside `[0, 1]`.
pub fn e_mle_cdf(p: &ParetoParams, n: usize, x: f64) -> Result<f64> {
    require_n(n, 1, 1)?;
    let pt = LogPoint::new(p, x)?;
    Ok(1.0 - mle_cdf_block(&pt, n, p.alpha(), 1.0))
}

/// Series for E(f̃(x)²) with `j <= n-3`:
/// `1/(Γ(n) x²) Σ 2^j (ln(k/x))^j / j! · Γ(n-j-2) (αn)^(j+2)`.
pub fn second_moment_mle_pdf(p: &ParetoParams, n: usize, x: f64) -> Result<f64> {
    require_n(n, 3, 2)?;
    let pt = LogPoint::new(p, x)?;
    let ln_an = (n as f64 * p.alpha()).ln();
    let mut acc = SignedLogSum::new();
    for j in 0..=(n as u64 - 3) {
        if let Some((neg, ln_pow)) = pt.neg_pow(j, std::f64::consts::LN_2) {
            let ln_mag = ln_pow - ln_factorial(j) + ln_gamma((n as u64 - j - 2) as f64) + (j + 2) as f64 * ln_an;
            acc.add_ln(neg, ln_mag);
        }
    }
    Ok(acc.value_scaled(-ln_gamma(n as f64) - 2.0 * x.ln()))
}

/// Series for E(F̃(x)²) with both sums over `j <= n-1`.
pub fn second_moment_mle_cdf(p: &ParetoParams, n: usize, x: f64) -> Result<f64> {
    require_n(n, 1, 2)?;
    let pt = LogPoint::new(p, x)?;
    let s1 = mle_cdf_block(&pt, n, p.alpha(), 1.0);
    let s2 = mle_cdf_block(&pt, n, p.alpha(), 2.0);
    Ok(1.0 - 2.0 * s1 + s2)
}

/// MSE of f̃ assembled as `E f̃² - 2 f E f̃ + f²` from the two series.
pub fn mse_mle_pdf(p: &ParetoParams, n: usize, x: f64) -> Result<MomentReport> {
    require_n(n, 3, 2)?;
    let mean = e_mle_pdf(p, n, x)?;
    let second = second_moment_mle_pdf(p, n, x)?;
    Ok(MomentReport::from_moments(Engine::ClosedForm, EstimatorKind::MLE_PDF, Some(x), mean, second, p.pdf(x)))
}

/// MSE of F̃ assembled as `E F̃² - 2 F E F̃ + F²`.
pub fn mse_mle_cdf(p: &ParetoParams, n: usize, x: f64) -> Result<MomentReport> {
    let mean = e_mle_cdf(p, n, x)?;
    let second = second_moment_mle_cdf(p, n, x)?;
    Ok(MomentReport::from_moments(Engine::ClosedForm, EstimatorKind::MLE_CDF, Some(x), mean, second, p.cdf(x)))
}

/// The fully expanded MSE of F̃ with a leading constant of 2:
/// `2 + S₂/Γ(n) - 2 (k/x)^α S₁/Γ(n) + (k/x)^(2α)`.
///
/// Expanding `E F̃² - 2F E F̃ + F²` gives `1 - 2 + 1 = 0` for the constant,
/// so this form exceeds [`mse_mle_cdf`] by exactly 2; kept for comparison.
pub fn mse_mle_cdf_preexpanded(p: &ParetoParams, n: usize, x: f64) -> Result<f64> {
    require_n(n, 1, 2)?;
    let pt = LogPoint::new(p, x)?;
    let s1 = mle_cdf_block(&pt, n, p.alpha(), 1.0);
    let s2 = mle_cdf_block(&pt, n, p.alpha(), 2.0);
    let q = p.survival(x);
    Ok(2.0 + s2 - 2.0 * q * s1 + q * q)
}

/// r-th moment series of f̃:
/// `1/(Γ(n) x^r) Σ_{j=0}^{n-r-1} r^j (ln(k/x))^j / j! · Γ(n-r-j) (αn)^(j+r)`.
pub fn rth_moment_mle_pdf(p: &ParetoParams, n: usize, x: f64, r: u32) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidParameter("moment order must be at least 1".into()));
    }
    require_n(n, r as usize + 1, r)?;
    let pt = LogPoint::new(p, x)?;
    let ln_an = (n as f64 * p.alpha()).ln();
    let ln_r = (r as f64).ln();
    let top = n as u64 - r as u64 - 1;
    let mut acc = SignedLogSum::new();
    for j in 0..=top {
        if let Some((neg, ln_pow)) = pt.neg_pow(j, ln_r) {
            let ln_mag =
                ln_pow - ln_factorial(j) + ln_gamma((n as u64 - r as u64 - j) as f64) + (j + r as u64) as f64 * ln_an;
            acc.add_ln(neg, ln_mag);
        }
    }
    Ok(acc.value_scaled(-ln_gamma(n as f64) - r as f64 * x.ln()))
}

/// r-th moment series of F̃:
/// `1/Γ(n) Σ_{j=0}^{r} C(r,j)(-1)^j Σ_{i=0}^{n-1} (j ln(k/x))^i / i! · Γ(n-i) (αn)^i`.
pub fn rth_moment_mle_cdf(p: &ParetoParams, n: usize, x: f64, r: u32) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidParameter("moment order must be at least 1".into()));
    }
    require_n(n, 1, r)?;
    let pt = LogPoint::new(p, x)?;
    if pt.at_k() {
        // only i = 0 survives and Σ_j C(r,j)(-1)^j = 0
        return Ok(0.0);
    }
    let mut acc = CompensatedSum::default();
    for j in 0..=r as u64 {
        let sign = if j % 2 == 1 { -1.0 } else { 1.0 };
        acc.add(sign * binomial(r as u64, j) * mle_cdf_block(&pt, n, p.alpha(), j as f64));
    }
    Ok(acc.value())
}

// ---------------------------------------------------------------------------
// UMVUE series
// ---------------------------------------------------------------------------

/// Series for E(f̂(x)²) with `j <= n-3`:
/// `(n-1)α² k^α / (x^(α+2) Γ(n-1)) Σ_j C(2n-4, j) α^j Γ(n-j-2) (-c)^j Σ_{i=0}^{n-3-j} (αc)^i/i!`.
pub fn second_moment_umvue_pdf(p: &ParetoParams, n: usize, x: f64) -> Result<f64> {
    require_n(n, 3, 2)?;
    let pt = LogPoint::new(p, x)?;
    let alpha = p.alpha();
    let nu = n as u64;
    let mut acc = SignedLogSum::new();
    for j in 0..=(nu - 3) {
        if let Some((neg, ln_pow)) = pt.neg_pow(j, alpha.ln()) {
            let ln_mag = ln_binomial(2 * nu - 4, j)
                + ln_gamma((nu - j - 2) as f64)
                + ln_pow
                + ln_exp_partial_sum(alpha * pt.c, nu - 3 - j);
            acc.add_ln(neg, ln_mag);
        }
    }
    let nf = n as f64;
    let ln_pre = (nf - 1.0).ln() + 2.0 * alpha.ln() - alpha * pt.c - 2.0 * x.ln() - ln_gamma(nf - 1.0);
    Ok(acc.value_scaled(ln_pre))
}

/// `S = (k/x)^α / Γ(n) Σ_{j=0}^{n-1} C(2n-2,j) α^j Γ(n-j) (-c)^j Σ_{i=0}^{n-1-j} (αc)^i/i!`.
///
/// Evaluated in the linear domain as `Σ_j b_j P_(n-1-j)` with `P_m` the Poisson(αc)
/// distribution function and `b_(j+1)/b_j = -αc(2n-2-j)/((j+1)(n-1-j))`.
fn umvue_cdf_double_sum(p: &ParetoParams, pt: &LogPoint, n: usize) -> f64 {
    let ac = p.alpha() * pt.c;
    let nu = n as u64;
    if let Some(pois) = poisson_cdf_prefix(ac, nu - 1) {
        let mut b = 1.0;
        let mut acc = CompensatedSum::default();
        for j in 0..nu {
            if j > 0 {
                b *= -ac * (2 * nu - 1 - j) as f64 / (j as f64 * (nu - j) as f64);
            }
            acc.add(b * pois[(nu - 1 - j) as usize]);
        }
        let v = acc.value();
        if v.is_finite() {
            return v;
        }
    }
    umvue_cdf_double_sum_ln(p, pt, n)
}

fn umvue_cdf_double_sum_ln(p: &ParetoParams, pt: &LogPoint, n: usize) -> f64 {
    let alpha = p.alpha();
    let nu = n as u64;
    let mut acc = SignedLogSum::new();
    for j in 0..nu {
        if let Some((neg, ln_pow)) = pt.neg_pow(j, alpha.ln()) {
            let ln_mag = ln_binomial(2 * nu - 2, j)
                + ln_gamma((nu - j) as f64)
                + ln_pow
                + ln_exp_partial_sum(alpha * pt.c, nu - 1 - j);
            acc.add_ln(neg, ln_mag);
        }
    }
    acc.value_scaled(-alpha * pt.c - ln_gamma(n as f64))
}

/// Series for E(F̂(x)²) = `1 - 2(k/x)^α + S`.
pub fn second_moment_umvue_cdf(p: &ParetoParams, n: usize, x: f64) -> Result<f64> {
    require_n(n, 2, 2)?;
    let pt = LogPoint::new(p, x)?;
    let s = umvue_cdf_double_sum(p, &pt, n);
    Ok(1.0 - 2.0 * p.survival(x) + s)
}

/// MSE (= variance) of f̂ from the truncated second-moment series.
pub fn mse_umvue_pdf(p: &ParetoParams, n: usize, x: f64) -> Result<MomentReport> {
    let second = second_moment_umvue_pdf(p, n, x)?;
    let f = p.pdf(x);
    Ok(MomentReport::unbiased(Engine::ClosedForm, EstimatorKind::UMVUE_PDF, Some(x), f, second - f * f))
}

/// MSE (= variance) of F̂ in the simplified form `S - (k/x)^(2α)`.
pub fn mse_umvue_cdf(p: &ParetoParams, n: usize, x: f64) -> Result<MomentReport> {
    require_n(n, 2, 2)?;
    let pt = LogPoint::new(p, x)?;
    let q = p.survival(x);
    let mse = umvue_cdf_double_sum(p, &pt, n) - q * q;
    Ok(MomentReport::unbiased(Engine::ClosedForm, EstimatorKind::UMVUE_CDF, Some(x), p.cdf(x), mse))
}

/// r-th moment series of f̂:
/// `(n-1)^r α^r k^α / (x^(α+r) (n-1)!) Σ_{j=0}^{n-r-1} C(r(n-2), j) α^j (-c)^j Γ(n-r-j) Σ_{i=0}^{n-r-j-1} (αc)^i/i!`.
pub fn rth_moment_umvue_pdf(p: &ParetoParams, n: usize, x: f64, r: u32) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidParameter("moment order must be at least 1".into()));
    }
    require_n(n, r as usize + 1, r)?;
    let pt = LogPoint::new(p, x)?;
    let alpha = p.alpha();
    let (nu, ru) = (n as u64, r as u64);
    let mut acc = SignedLogSum::new();
    for j in 0..=(nu - ru - 1) {
        if let Some((neg, ln_pow)) = pt.neg_pow(j, alpha.ln()) {
            let ln_mag = ln_binomial(ru * (nu - 2), j)
                + ln_pow
                + ln_gamma((nu - ru - j) as f64)
                + ln_exp_partial_sum(alpha * pt.c, nu - ru - j - 1);
            acc.add_ln(neg, ln_mag);
        }
    }
    let (nf, rf) = (n as f64, r as f64);
    let ln_pre = rf * (nf - 1.0).ln() + rf * alpha.ln() - alpha * pt.c - rf * x.ln() - ln_gamma(nf);
    Ok(acc.value_scaled(ln_pre))
}

/// r-th moment series of F̂, inner sum truncated at `i <= min(j(n-1), n-1)`,
/// plus the closing term `(k/x)^α [(x/k)^α - Σ_{i<n} (αc)^i/i!]`.
pub fn rth_moment_umvue_cdf(p: &ParetoParams, n: usize, x: f64, r: u32) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidParameter("moment order must be at least 1".into()));
    }
    require_n(n, 2, r)?;
    let pt = LogPoint::new(p, x)?;
    if pt.at_k() {
        return Ok(0.0);
    }
    let alpha = p.alpha();
    let ac = alpha * pt.c;
    let nu = n as u64;
    let closing = -(-ac + ln_exp_partial_sum(ac, nu - 1)).exp_m1();
    if let Some(head) = rth_umvue_cdf_head_linear(ac, nu, r as u64) {
        return Ok(head + closing);
    }
    let mut acc = SignedLogSum::new();
    for j in 0..=r as u64 {
        let ln_cj = ln_binomial(r as u64, j);
        let top = (j * (nu - 1)).min(nu - 1);
        for i in 0..=top {
            if let Some((neg, ln_pow)) = pt.neg_pow(i, alpha.ln()) {
                let ln_mag = ln_cj
                    + ln_binomial(j * (nu - 1), i)
                    + ln_pow
                    + ln_gamma((nu - i) as f64)
                    + ln_exp_partial_sum(ac, nu - i - 1);
                acc.add_ln(neg ^ (j % 2 == 1), ln_mag);
            }
        }
    }
    let head = acc.value_scaled(-ac - ln_gamma(n as f64));
    Ok(head + closing)
}

/// Head of the F̂ r-th moment series as `Σ_j ±C(r,j) Σ_i d_(j,i) P_(n-1-i)`, with
/// `d_(j,i+1)/d_(j,i) = -αc(j(n-1)-i)/((i+1)(n-1-i))` and `P` the Poisson(αc) cdf.
fn rth_umvue_cdf_head_linear(ac: f64, nu: u64, r: u64) -> Option<f64> {
    let pois = poisson_cdf_prefix(ac, nu - 1)?;
    let mut acc = CompensatedSum::default();
    for j in 0..=r {
        let big = j * (nu - 1);
        let w = if j % 2 == 1 { -binomial(r, j) } else { binomial(r, j) };
        let mut d = 1.0;
        for i in 0..=big.min(nu - 1) {
            if i > 0 {
                d *= -ac * (big - i + 1) as f64 / (i as f64 * (nu - i) as f64);
            }
            acc.add(w * d * pois[(nu - 1 - i) as usize]);
        }
    }
    let v = acc.value();
    v.is_finite().then_some(v)
}

// ---------------------------------------------------------------------------
// Exact special-function representations
// ---------------------------------------------------------------------------

/// Exact `E(f̃(x)^r)` via
/// `(αn)^n/Γ(n) · 2 (αn/(rc))^((r-n)/2) K_(r-n)(2√(αn·rc)) / x^r`.
///
/// At `x = k` the gamma limit `(αn)^r Γ(n-r) / (Γ(n) k^r)` is used.
pub fn exact_mle_moment_bessel(p: &ParetoParams, n: usize, x: f64, r: u32, cfg: &QuadratureConfig) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidParameter("moment order must be at least 1".into()));
    }
    require_n(n, 1, r)?;
    let pt = LogPoint::new(p, x)?;
    let (nf, rf) = (n as f64, r as f64);
    let an = p.alpha() * nf;
    if pt.at_k() {
        require_n(n, r as usize + 1, r)?;
        return Ok((rf * an.ln() + ln_gamma(nf - rf) - ln_gamma(nf) - rf * x.ln()).exp());
    }
    let beta = rf * pt.c;
    let order = rf - nf;
    let ln_k = ln_bessel_k(order, 2.0 * (an * beta).sqrt(), cfg)?.ln_value;
    let ln_v = nf * an.ln() - ln_gamma(nf) + std::f64::consts::LN_2 + 0.5 * order * (an / beta).ln() + ln_k - rf * x.ln();
    Ok(ln_v.exp())
}

/// `E[(k/x)^(mW)]` for α̃ = W, via `2(αn)^n/Γ(n) · (mc/(αn))^(n/2) K_(-n)(2√(αn·mc))`.
fn mle_laplace_bessel(an: f64, n: usize, mc: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if mc == 0.0 {
        return Ok(1.0);
    }
    let nf = n as f64;
    let ln_k = ln_bessel_k(-nf, 2.0 * (an * mc).sqrt(), cfg)?.ln_value;
    Ok((std::f64::consts::LN_2 + nf * an.ln() - ln_gamma(nf) + 0.5 * nf * (mc / an).ln() + ln_k).exp())
}

/// Exact `E(F̃(x)^r) = Σ_j C(r,j) (-1)^j E[(k/x)^(jW)]` through Bessel K of order `-n`.
pub fn exact_mle_cdf_moment_bessel(p: &ParetoParams, n: usize, x: f64, r: u32, cfg: &QuadratureConfig) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidParameter("moment order must be at least 1".into()));
    }
    require_n(n, 1, r)?;
    let pt = LogPoint::new(p, x)?;
    if pt.at_k() {
        return Ok(0.0);
    }
    let an = p.alpha() * n as f64;
    let mut acc = SignedLogSum::new();
    for j in 0..=r as u64 {
        let l = mle_laplace_bessel(an, n, j as f64 * pt.c, cfg)?;
        acc.add_ln(j % 2 == 1, ln_binomial(r as u64, j) + l.ln());
    }
    Ok(acc.value())
}

/// Exact `E(f̂(x)^r)` via Kummer's U:
/// `(n-1)^r αⁿ / (x^r (n-1)!) · c^(n-r) e^(-αc) Γ(a) U(a, b, αc)` with
/// `a = r(n-2)+1`, `b = r(n-2) + 2 - (r-1)(n-1)`.
///
/// For `r = 2` this is `U(2n-3, n-1, αc)`.
pub fn exact_umvue_pdf_moment_kummer(
    p: &ParetoParams,
    n: usize,
    x: f64,
    r: u32,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidParameter("moment order must be at least 1".into()));
    }
    require_n(n, 2, r)?;
    let pt = LogPoint::new(p, x)?;
    let alpha = p.alpha();
    let (nf, rf) = (n as f64, r as f64);
    if pt.at_k() {
        require_n(n, r as usize + 1, r)?;
        let ln_v = rf * (nf - 1.0).ln() + rf * alpha.ln() + ln_gamma(nf - rf) - rf * x.ln() - ln_gamma(nf);
        return Ok(ln_v.exp());
    }
    let a = rf * (nf - 2.0) + 1.0;
    let b = rf * (nf - 2.0) + 2.0 - (rf - 1.0) * (nf - 1.0);
    let ln_u = ln_kummer_u(a, b, alpha * pt.c, cfg)?.ln_value;
    let ln_v = rf * (nf - 1.0).ln() + nf * alpha.ln() - rf * x.ln() - ln_gamma(nf)
        + (nf - rf) * pt.ln_c
        - alpha * pt.c
        + ln_gamma(a)
        + ln_u;
    Ok(ln_v.exp())
}

/// Exact `E(f̂(x)²)`:
/// `(n-1)αⁿ / (x² (n-2)!) · c^(n-2) e^(-αc) Γ(2n-3) U(2n-3, n-1, αc)`.
pub fn exact_umvue_pdf_second_moment_kummer(p: &ParetoParams, n: usize, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    require_n(n, 3, 2)?;
    exact_umvue_pdf_moment_kummer(p, n, x, 2, cfg)
}

/// `αⁿ/(n-1)! ∫_c^∞ (z-c)^(j(n-1)) z^(-(j-1)(n-1)) e^(-αz) dz`
/// `= (αc)ⁿ e^(-αc) Γ(j(n-1)+1) U(j(n-1)+1, n+1, αc) / (n-1)!` for `j >= 1`.
fn umvue_cdf_kummer_term(alpha: f64, n: usize, pt: &LogPoint, j: u64, cfg: &QuadratureConfig) -> Result<f64> {
    let nf = n as f64;
    let a = (j * (n as u64 - 1)) as f64 + 1.0;
    let ln_u = ln_kummer_u(a, nf + 1.0, alpha * pt.c, cfg)?.ln_value;
    Ok((nf * (alpha.ln() + pt.ln_c) - alpha * pt.c + ln_gamma(a) + ln_u - ln_gamma(nf)).exp())
}

/// Exact `E(F̂(x)^r)` via Kummer's U, one term per binomial index.
pub fn exact_umvue_cdf_moment_kummer(
    p: &ParetoParams,
    n: usize,
    x: f64,
    r: u32,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidParameter("moment order must be at least 1".into()));
    }
    require_n(n, 2, r)?;
    let pt = LogPoint::new(p, x)?;
    if pt.at_k() {
        return Ok(0.0);
    }
    // j = 0 contributes P(Z > c) and the region below c contributes P(Z <= c): together 1.
    let mut acc = SignedLogSum::new();
    acc.add(1.0);
    for j in 1..=r as u64 {
        let t = umvue_cdf_kummer_term(p.alpha(), n, &pt, j, cfg)?;
        acc.add_ln(j % 2 == 1, ln_binomial(r as u64, j) + t.ln());
    }
    Ok(acc.value())
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Closed-form series report for any estimator.
pub fn closed_form_report(kind: EstimatorKind, p: &ParetoParams, n: usize, x: f64) -> Result<MomentReport> {
    match (kind.method, kind.target) {
        (Method::Mle, Target::Alpha) => mle_alpha_moments(n, p.alpha()),
        (Method::Umvue, Target::Alpha) => umvue_alpha_moments(n, p.alpha()),
        (Method::Mle, Target::Pdf) => mse_mle_pdf(p, n, x),
        (Method::Mle, Target::Cdf) => mse_mle_cdf(p, n, x),
        (Method::Umvue, Target::Pdf) => mse_umvue_pdf(p, n, x),
        (Method::Umvue, Target::Cdf) => mse_umvue_cdf(p, n, x),
    }
}

/// Exact report via Bessel K (MLE density and distribution function).
pub fn bessel_report(kind: EstimatorKind, p: &ParetoParams, n: usize, x: f64, cfg: &QuadratureConfig) -> Result<MomentReport> {
    let (mean, second) = match kind {
        EstimatorKind::MLE_PDF => (
            exact_mle_moment_bessel(p, n, x, 1, cfg)?,
            exact_mle_moment_bessel(p, n, x, 2, cfg)?,
        ),
        EstimatorKind::MLE_CDF => (
            exact_mle_cdf_moment_bessel(p, n, x, 1, cfg)?,
            exact_mle_cdf_moment_bessel(p, n, x, 2, cfg)?,
        ),
        other => {
            return Err(Error::Unsupported(format!(
                "Bessel representation covers mle/pdf and mle/cdf, not {}/{}",
                other.method, other.target
            )))
        }
    };
    Ok(MomentReport::from_moments(Engine::BesselExact, kind, Some(x), mean, second, kind.target_value(p, x)))
}

/// Exact report via Kummer U (UMVUE density and distribution function).
pub fn kummer_report(kind: EstimatorKind, p: &ParetoParams, n: usize, x: f64, cfg: &QuadratureConfig) -> Result<MomentReport> {
    match kind {
        EstimatorKind::UMVUE_PDF => {
            let second = exact_umvue_pdf_second_moment_kummer(p, n, x, cfg)?;
            let f = p.pdf(x);
            Ok(MomentReport::unbiased(Engine::KummerExact, kind, Some(x), f, second - f * f))
        }
        EstimatorKind::UMVUE_CDF => {
            require_n(n, 2, 2)?;
            let pt = LogPoint::new(p, x)?;
            let q = p.survival(x);
            // Var = E F̂² - F² = [1 - 2q + A] - (1-q)² = A - q²
            let mse = if pt.at_k() { 0.0 } else { umvue_cdf_kummer_term(p.alpha(), n, &pt, 2, cfg)? - q * q };
            Ok(MomentReport::unbiased(Engine::KummerExact, kind, Some(x), p.cdf(x), mse))
        }
        other => Err(Error::Unsupported(format!(
            "Kummer representation covers umvue/pdf and umvue/cdf, not {}/{}",
            other.method, other.target
        ))),
    }
}
