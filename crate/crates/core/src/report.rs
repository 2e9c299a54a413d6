use std::fmt;

use serde::{Deserialize, Serialize};

use crate::estimators::{EstimatorKind, Target};

/// Which evaluation route produced a [`MomentReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    ClosedForm,
    Quadrature,
    MonteCarlo,
    BesselExact,
    KummerExact,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::ClosedForm => "closed_form",
            Engine::Quadrature => "quadrature",
            Engine::MonteCarlo => "monte_carlo",
            Engine::BesselExact => "bessel_exact",
            Engine::KummerExact => "kummer_exact",
        })
    }
}

/// Monte Carlo standard errors of the three reported averages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StdErrors {
    pub mean: f64,
    pub second_moment: f64,
    pub mse: f64,
}

/// Diagnostics attached to a report whose values violate a property the
/// true moments must have. These mark defects of an engine, mostly of the
/// truncated series away from `x = k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFlag {
    MeanOutsideUnitInterval,
    NegativeVariance,
    NegativeMse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub engine: Engine,
    pub estimator: EstimatorKind,
    pub eval_x: Option<f64>,
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
    pub bias: f64,
    pub mse: f64,
    pub std_error: Option<StdErrors>,
    pub flags: Vec<ReportFlag>,
}

impl MomentReport {
    /// Assembles a report from the first two moments and the true value.
    ///
    /// `variance = second - mean²` and `mse = variance + bias²`, which is
    /// algebraically `second - 2·target·mean + target²`.
    pub fn from_moments(
        engine: Engine,
        estimator: EstimatorKind,
        eval_x: Option<f64>,
        mean: f64,
        second_moment: f64,
        target: f64,
    ) -> Self {
        let variance = second_moment - mean * mean;
        let bias = mean - target;
        let mse = variance + bias * bias;
        Self::build(engine, estimator, eval_x, mean, second_moment, variance, bias, mse)
    }

    /// Report for an estimator whose mean is the target exactly; `mse` is the variance.
    pub fn unbiased(engine: Engine, estimator: EstimatorKind, eval_x: Option<f64>, target: f64, mse: f64) -> Self {
        let second = mse + target * target;
        Self::build(engine, estimator, eval_x, target, second, mse, 0.0, mse)
    }

    #[allow(clippy::too_many_arguments)]
    fn build(
        engine: Engine,
        estimator: EstimatorKind,
        eval_x: Option<f64>,
        mean: f64,
        second_moment: f64,
        variance: f64,
        bias: f64,
        mse: f64,
    ) -> Self {
        let mut flags = Vec::new();
        if estimator.target == Target::Cdf && !(0.0..=1.0).contains(&mean) {
            flags.push(ReportFlag::MeanOutsideUnitInterval);
        }
        if variance < 0.0 {
            flags.push(ReportFlag::NegativeVariance);
        }
        if mse < 0.0 {
            flags.push(ReportFlag::NegativeMse);
        }
        let eval_x = if estimator.target == Target::Alpha { None } else { eval_x };
        Self { engine, estimator, eval_x, mean, second_moment, variance, bias, mse, std_error: None, flags }
    }

    pub fn with_std_errors(mut self, se: StdErrors) -> Self {
        self.std_error = Some(se);
        self
    }

    /// The structural identities, checked relative to the operands' magnitude.
    pub fn is_consistent(&self, rel: f64) -> bool {
        let close = |a: f64, b: f64, scale: f64| (a - b).abs() <= rel * scale.max(f64::MIN_POSITIVE);
        let m2 = self.mean * self.mean;
        let var_ok = !(self.second_moment.is_finite() && self.mean.is_finite())
            || close(
                self.variance,
                self.second_moment - m2,
                self.second_moment.abs().max(m2).max(self.variance.abs()),
            );
        let b2 = self.bias * self.bias;
        let mse_ok = close(self.mse, self.variance + b2, self.mse.abs().max(self.variance.abs()).max(b2));
        let se_ok = self.std_error.is_some() == (self.engine == Engine::MonteCarlo);
        var_ok && mse_ok && se_ok
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unbiased_report() {
        let r = MomentReport::unbiased(Engine::ClosedForm, EstimatorKind::UMVUE_PDF, Some(1.0), 1.0, 1.0 / 3.0);
        assert_eq!(r.bias, 0.0);
        assert_eq!(r.mean, 1.0);
        assert!((r.second_moment - 4.0 / 3.0).abs() < 1e-15);
        assert!(r.is_consistent(1e-12));
        assert!(r.flags.is_empty());
    }

    #[test]
    fn flags_raised() {
        let r = MomentReport::from_moments(Engine::ClosedForm, EstimatorKind::MLE_CDF, Some(2.0), 1.2, 1.0, 0.5);
        assert!(r.flags.contains(&ReportFlag::MeanOutsideUnitInterval));
        assert!(r.flags.contains(&ReportFlag::NegativeVariance));
    }

    #[test]
    fn alpha_reports_have_no_eval_point() {
        let r = MomentReport::from_moments(Engine::ClosedForm, EstimatorKind::MLE_ALPHA, Some(3.0), 1.5, 4.5, 1.0);
        assert_eq!(r.eval_x, None);
        assert!((r.mse - 2.5).abs() < 1e-15);
    }

    #[test]
    fn monte_carlo_requires_std_errors() {
        let r = MomentReport::from_moments(Engine::MonteCarlo, EstimatorKind::MLE_PDF, Some(1.0), 1.0, 2.0, 1.0);
        assert!(!r.is_consistent(1e-12));
        let r = r.with_std_errors(StdErrors { mean: 0.1, second_moment: 0.1, mse: 0.1 });
        assert!(r.is_consistent(1e-12));
    }

    proptest! {
        #[test]
        fn assembled_reports_are_consistent(mean in -10.0f64..10.0, extra in 0.0f64..10.0, target in -10.0f64..10.0) {
            let second = mean * mean + extra;
            let r = MomentReport::from_moments(Engine::Quadrature, EstimatorKind::MLE_PDF, Some(1.0), mean, second, target);
            prop_assert!(r.is_consistent(1e-12));
            let direct = second - 2.0 * target * mean + target * target;
            prop_assert!((r.mse - direct).abs() <= 1e-12 * (second.abs() + 2.0 * (target * mean).abs() + target * target));
        }
    }
}
