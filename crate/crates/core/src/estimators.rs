//! Point estimators computed from a [`SampleData`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ParetoParams, SampleData};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mle,
    Umvue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Alpha,
    Pdf,
    Cdf,
}

/// Which estimator of which quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EstimatorKind {
    pub method: Method,
    pub target: Target,
}

impl EstimatorKind {
    pub const fn new(method: Method, target: Target) -> Self {
        Self { method, target }
    }

    pub const MLE_ALPHA: Self = Self::new(Method::Mle, Target::Alpha);
    pub const UMVUE_ALPHA: Self = Self::new(Method::Umvue, Target::Alpha);
    pub const MLE_PDF: Self = Self::new(Method::Mle, Target::Pdf);
    pub const UMVUE_PDF: Self = Self::new(Method::Umvue, Target::Pdf);
    pub const MLE_CDF: Self = Self::new(Method::Mle, Target::Cdf);
    pub const UMVUE_CDF: Self = Self::new(Method::Umvue, Target::Cdf);

    /// The four density/distribution estimators, UMVUE first.
    pub const POINTWISE: [Self; 4] = [Self::UMVUE_PDF, Self::MLE_PDF, Self::UMVUE_CDF, Self::MLE_CDF];

    /// The true value the estimator aims at.
    pub fn target_value(&self, params: &ParetoParams, x: f64) -> f64 {
        match self.target {
            Target::Alpha => params.alpha(),
            Target::Pdf => params.pdf(x),
            Target::Cdf => params.cdf(x),
        }
    }

    /// Evaluates the estimator on `sample`; `x` is ignored for [`Target::Alpha`].
    pub fn evaluate(&self, sample: &SampleData, x: f64) -> Result<f64> {
        match (self.method, self.target) {
            (Method::Mle, Target::Alpha) => mle_alpha(sample),
            (Method::Umvue, Target::Alpha) => umvue_alpha(sample),
            (Method::Mle, Target::Pdf) => mle_pdf_at(sample, x),
            (Method::Umvue, Target::Pdf) => umvue_pdf_at(sample, x),
            (Method::Mle, Target::Cdf) => mle_cdf_at(sample, x),
            (Method::Umvue, Target::Cdf) => umvue_cdf_at(sample, x),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Mle => "mle",
            Method::Umvue => "umvue",
        })
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Alpha => "alpha",
            Target::Pdf => "pdf",
            Target::Cdf => "cdf",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mle" => Ok(Method::Mle),
            "umvue" => Ok(Method::Umvue),
            other => Err(Error::InvalidParameter(format!("unknown estimator '{other}'"))),
        }
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "alpha" => Ok(Target::Alpha),
            "pdf" => Ok(Target::Pdf),
            "cdf" => Ok(Target::Cdf),
            other => Err(Error::InvalidParameter(format!("unknown target '{other}'"))),
        }
    }
}

fn positive_s(sample: &SampleData) -> Result<f64> {
    let s = sample.s_stat();
    if s > 0.0 {
        Ok(s)
    } else {
        Err(Error::DegenerateSample)
    }
}

fn require_two(sample: &SampleData) -> Result<()> {
    if sample.n() < 2 {
        Err(Error::InsufficientSample { n: sample.n(), required: 2 })
    } else {
        Ok(())
    }
}

fn require_support(sample: &SampleData, x: f64) -> Result<()> {
    if x.is_nan() || x < sample.k() {
        Err(Error::Domain(format!("evaluation point {x} lies below k = {}", sample.k())))
    } else {
        Ok(())
    }
}

/// α̃ = n / Σ ln(xᵢ/k).
pub fn mle_alpha(sample: &SampleData) -> Result<f64> {
    Ok(sample.n() as f64 / positive_s(sample)?)
}

/// α̂ = (n-1) / (ln t - n ln k).
pub fn umvue_alpha(sample: &SampleData) -> Result<f64> {
    require_two(sample)?;
    Ok((sample.n() - 1) as f64 / positive_s(sample)?)
}

/// Plug-in density f̃(x) = α̃ k^α̃ / x^(α̃+1).
pub fn mle_pdf_at(sample: &SampleData, x: f64) -> Result<f64> {
    require_support(sample, x)?;
    let a = mle_alpha(sample)?;
    Ok(ParetoParams::new(a, sample.k())?.pdf(x))
}

/// Plug-in distribution function F̃(x) = 1 - (k/x)^α̃.
pub fn mle_cdf_at(sample: &SampleData, x: f64) -> Result<f64> {
    require_support(sample, x)?;
    let a = mle_alpha(sample)?;
    Ok(ParetoParams::new(a, sample.k())?.cdf(x))
}

/// Unbiased density estimate
/// `(n-1)[ln t - ln x - (n-1) ln k]^(n-2) / (x [ln t - n ln k]^(n-1))` for
/// `k <= x < t k^(1-n)`, and zero from the upper end of that range on.
pub fn umvue_pdf_at(sample: &SampleData, x: f64) -> Result<f64> {
    require_two(sample)?;
    require_support(sample, x)?;
    let s = positive_s(sample)?;
    let d = (x / sample.k()).ln();
    if d >= s {
        return Ok(0.0);
    }
    let n = sample.n() as f64;
    // bracket^(n-2) is taken as 1 when n = 2, including at the boundary
    let bracket = if sample.n() == 2 { 0.0 } else { (n - 2.0) * (s - d).ln() };
    Ok(((n - 1.0).ln() + bracket - x.ln() - (n - 1.0) * s.ln()).exp())
}

/// Unbiased distribution function estimate
/// `1 - ([ln t - ln x - (n-1) ln k] / [ln t - n ln k])^(n-1)` on
/// `k <= x <= t k^(1-n)`, zero below `k` and one beyond.
pub fn umvue_cdf_at(sample: &SampleData, x: f64) -> Result<f64> {
    require_two(sample)?;
    if x.is_nan() {
        return Err(Error::Domain("evaluation point is NaN".into()));
    }
    if x < sample.k() {
        return Ok(0.0);
    }
    let s = positive_s(sample)?;
    let d = (x / sample.k()).ln();
    if d >= s {
        return Ok(1.0);
    }
    let n1 = (sample.n() - 1) as f64;
    Ok(-(n1 * (-d / s).ln_1p()).exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn ee() -> SampleData {
        SampleData::from_values(vec![E, E], 1.0).unwrap()
    }

    #[test]
    fn alpha_examples() {
        let one = SampleData::from_values(vec![E], 1.0).unwrap();
        assert!((mle_alpha(&one).unwrap() - 1.0).abs() < 1e-15);
        assert!((mle_alpha(&ee()).unwrap() - 1.0).abs() < 1e-15);
        assert!((umvue_alpha(&ee()).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(umvue_alpha(&one), Err(Error::InsufficientSample { .. })));
    }

    #[test]
    fn degenerate_sample() {
        let d = SampleData::from_values(vec![2.0, 2.0, 2.0], 2.0).unwrap();
        assert_eq!(mle_alpha(&d), Err(Error::DegenerateSample));
        assert_eq!(umvue_alpha(&d), Err(Error::DegenerateSample));
        assert_eq!(umvue_pdf_at(&d, 2.0), Err(Error::DegenerateSample));
    }

    #[test]
    fn mle_density_examples() {
        let s = ee();
        assert!((mle_pdf_at(&s, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((mle_pdf_at(&s, 2.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(mle_pdf_at(&s, 1e12).unwrap() < 1e-23);
        assert_eq!(mle_cdf_at(&s, 1.0).unwrap(), 0.0);
        assert!((mle_cdf_at(&s, 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(mle_pdf_at(&s, 0.5), Err(Error::Domain(_))));
        assert!(matches!(mle_cdf_at(&s, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn umvue_density_examples() {
        let s = ee();
        let expected = 1.0 / (2.0 * E);
        assert!((umvue_pdf_at(&s, E).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.18394).abs() < 1e-5);
        // t k^(1-n) = e^2 here
        assert_eq!(umvue_pdf_at(&s, E * E).unwrap(), 0.0);
        assert_eq!(umvue_pdf_at(&s, 100.0).unwrap(), 0.0);
    }

    #[test]
    fn umvue_cdf_examples() {
        let s = ee();
        assert_eq!(umvue_cdf_at(&s, 1.0).unwrap(), 0.0);
        assert_eq!(umvue_cdf_at(&s, 0.2).unwrap(), 0.0);
        assert!((umvue_cdf_at(&s, E * E).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(umvue_cdf_at(&s, 50.0).unwrap(), 1.0);
        assert!((umvue_cdf_at(&s, E).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn umvue_alpha_is_scaled_mle() {
        let s = ParetoParams::new(1.7, 0.4).unwrap().sample(9, 1).unwrap();
        let lhs = umvue_alpha(&s).unwrap();
        let rhs = mle_alpha(&s).unwrap() * 8.0 / 9.0;
        assert!((lhs - rhs).abs() < 1e-14 * lhs);
    }

    #[test]
    fn kind_dispatch() {
        let s = ee();
        assert_eq!(EstimatorKind::UMVUE_ALPHA.evaluate(&s, f64::NAN).unwrap(), 0.5);
        assert_eq!(EstimatorKind::MLE_CDF.evaluate(&s, 2.0).unwrap(), mle_cdf_at(&s, 2.0).unwrap());
        assert_eq!("UMVUE".parse::<Method>().unwrap(), Method::Umvue);
        assert_eq!("cdf".parse::<Target>().unwrap(), Target::Cdf);
        assert!("median".parse::<Target>().is_err());
    }
}
