//! Moments of every estimator by direct quadrature against the exact
//! sampling distributions: g(w) for α̃ and the Gamma(n, α) law of
//! `z = ln t - n ln k` for the UMVUE side. No series are involved, so these
//! values serve as the reference for the closed forms.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{EstimatorKind, Method, Target};
use crate::exact::{bessel_report, closed_form_report, kummer_report, ln_g_density};
use crate::model::ParetoParams;
use crate::quadrature::{integrate_log_finite, integrate_log_semi_infinite, Estimate, LnEstimate, QuadratureConfig};
use crate::report::{Engine, MomentReport};
use crate::series::ln_gamma;

fn check_point(p: &ParetoParams, x: f64) -> Result<f64> {
    if x.is_nan() || x < p.k() {
        return Err(Error::Domain(format!("evaluation point {x} lies below k = {}", p.k())));
    }
    Ok((x / p.k()).ln())
}

fn check_order(r: u32) -> Result<()> {
    if r == 0 {
        Err(Error::InvalidParameter("moment order must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `ln[-expm1(-y)] = ln(1 - e^(-y))` for `y > 0`.
#[inline]
fn ln_one_minus_exp_neg(y: f64) -> f64 {
    (-(-y).exp_m1()).ln()
}

/// `stat(w) + ln g(w)`, short-circuiting where the density vanishes so that
/// the endpoints `w = 0, ∞` cannot produce `∞ - ∞`.
#[inline]
fn weighted_by_g(ln_stat: impl Fn(f64) -> f64, w: f64, n: usize, alpha: f64) -> f64 {
    let lg = ln_g_density(w, n, alpha);
    if lg == f64::NEG_INFINITY {
        lg
    } else {
        ln_stat(w) + lg
    }
}

/// `E[stat(α̃)^r] = ∫₀^∞ stat(w)^r g(w) dw` with stat ∈ {w k^w / x^(w+1), 1 - (k/x)^w, w}.
pub fn moment_mle(
    stat: Target,
    r: u32,
    p: &ParetoParams,
    n: usize,
    x: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    check_order(r)?;
    if n == 0 {
        return Err(Error::InsufficientSample { n, required: 1 });
    }
    let alpha = p.alpha();
    let rf = r as f64;
    let est = match stat {
        Target::Alpha => {
            if n <= r as usize {
                return Err(Error::MomentDoesNotExist { n, order: r });
            }
            integrate_log_semi_infinite(|w| weighted_by_g(|w| rf * w.ln(), w, n, alpha), 0.0, cfg)?
        }
        Target::Pdf => {
            let c = check_point(p, x)?;
            if c == 0.0 && n <= r as usize {
                return Err(Error::MomentDoesNotExist { n, order: r });
            }
            let ln_x = x.ln();
            integrate_log_semi_infinite(|w| weighted_by_g(|w| rf * (w.ln() - w * c - ln_x), w, n, alpha), 0.0, cfg)?
        }
        Target::Cdf => {
            let c = check_point(p, x)?;
            if c == 0.0 {
                return Ok(Estimate { value: 0.0, error: 0.0, subdivisions: 0 });
            }
            integrate_log_semi_infinite(|w| weighted_by_g(|w| rf * ln_one_minus_exp_neg(w * c), w, n, alpha), 0.0, cfg)?
        }
    };
    Ok(est.to_estimate())
}

/// Log-density of `z = S ~ Gamma(n, α)`.
#[inline]
fn ln_h(z: f64, n: usize, alpha: f64, ln_norm: f64) -> f64 {
    if !(z > 0.0 && z < f64::INFINITY) {
        return f64::NEG_INFINITY;
    }
    (n as f64 - 1.0) * z.ln() - alpha * z + ln_norm
}

/// `stat + ln h(z)`, evaluating `stat` only where the density is positive.
#[inline]
fn weighted_by_h(ln_stat: impl Fn(f64) -> f64, z: f64, n: usize, alpha: f64, ln_norm: f64) -> f64 {
    let lh = ln_h(z, n, alpha, ln_norm);
    if lh == f64::NEG_INFINITY {
        lh
    } else {
        ln_stat(z) + lh
    }
}

fn ln_h_norm(n: usize, alpha: f64) -> f64 {
    n as f64 * alpha.ln() - ln_gamma(n as f64)
}

/// `∫_c^∞ [(z-c)/z]^(m(n-1)) h(z) dz`, integrated in `s = z - c`.
///
/// With `v = ((z-c)/z)^(n-1)` this is `E[v^m; z > c]`, the only piece of
/// `E F̂^r` that is not elementary.
fn umvue_cdf_tail(m: u32, n: usize, alpha: f64, c: f64, cfg: &QuadratureConfig) -> Result<LnEstimate> {
    let norm = ln_h_norm(n, alpha);
    let e = (m as f64) * (n as f64 - 1.0);
    integrate_log_semi_infinite(
        |s| {
            let ln_ratio = if c == 0.0 { 0.0 } else { -(c / s).ln_1p() };
            weighted_by_h(|_| e * ln_ratio, c + s, n, alpha, norm)
        },
        0.0,
        cfg,
    )
}

/// `E[stat(S)^r]` over the Gamma(n, α) law of S, for the UMVUE forms
/// `f̂ = (n-1)(S-c)^(n-2) / (x S^(n-1))`, `F̂ = 1 - ((S-c)/S)^(n-1)` (1 when `S <= c`),
/// and `α̂ = (n-1)/S`.
pub fn moment_umvue(
    stat: Target,
    r: u32,
    p: &ParetoParams,
    n: usize,
    x: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    check_order(r)?;
    if n < 2 {
        return Err(Error::InsufficientSample { n, required: 2 });
    }
    let alpha = p.alpha();
    let norm = ln_h_norm(n, alpha);
    let (nf, rf) = (n as f64, r as f64);
    let est = match stat {
        Target::Alpha => {
            if n <= r as usize {
                return Err(Error::MomentDoesNotExist { n, order: r });
            }
            let ln_nm1 = (nf - 1.0).ln();
            integrate_log_semi_infinite(|z| weighted_by_h(|z| rf * (ln_nm1 - z.ln()), z, n, alpha, norm), 0.0, cfg)?
        }
        Target::Pdf => {
            let c = check_point(p, x)?;
            if c == 0.0 && n <= r as usize {
                return Err(Error::MomentDoesNotExist { n, order: r });
            }
            let lead = (nf - 1.0).ln() - x.ln();
            integrate_log_semi_infinite(
                |s| {
                    let ln_s_part = if n == 2 { 0.0 } else { (nf - 2.0) * s.ln() };
                    weighted_by_h(|z| rf * (lead + ln_s_part - (nf - 1.0) * z.ln()), c + s, n, alpha, norm)
                },
                0.0,
                cfg,
            )?
        }
        Target::Cdf => {
            let c = check_point(p, x)?;
            if c == 0.0 {
                return Ok(Estimate { value: 0.0, error: 0.0, subdivisions: 0 });
            }
            // S <= c: F̂ = 1, contributing P(S <= c)
            let below = integrate_log_finite(|z| ln_h(z, n, alpha, norm), 0.0, c, cfg)?.to_estimate();
            let above = integrate_log_semi_infinite(
                |s| {
                    let y = (nf - 1.0) * (c / s).ln_1p();
                    weighted_by_h(|_| rf * ln_one_minus_exp_neg(y), c + s, n, alpha, norm)
                },
                0.0,
                cfg,
            )?
            .to_estimate();
            return Ok(Estimate {
                value: below.value + above.value,
                error: below.error + above.error,
                subdivisions: below.subdivisions + above.subdivisions,
            });
        }
    };
    Ok(est.to_estimate())
}

/// r-th moment of any estimator by quadrature.
pub fn moment(kind: EstimatorKind, r: u32, p: &ParetoParams, n: usize, x: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    match kind.method {
        Method::Mle => moment_mle(kind.target, r, p, n, x, cfg),
        Method::Umvue => moment_umvue(kind.target, r, p, n, x, cfg),
    }
}

/// Mean, second moment, variance, bias and MSE from the r = 1, 2 quadrature moments.
pub fn mse_via_quadrature(kind: EstimatorKind, p: &ParetoParams, n: usize, x: f64, cfg: &QuadratureConfig) -> Result<MomentReport> {
    let mean = moment(kind, 1, p, n, x, cfg)?.value;
    let second = moment(kind, 2, p, n, x, cfg)?.value;
    let eval_x = (kind.target != Target::Alpha).then_some(x);
    Ok(MomentReport::from_moments(Engine::Quadrature, kind, eval_x, mean, second, kind.target_value(p, x)))
}

/// Per-point MSE assembled the way a table driver does it: MLE as
/// `E₂ - 2·target·E₁ + target²`, UMVUE as `E₂ - target²` using unbiasedness.
/// For F̂ the variance is `E[v²; S > c] - (k/x)^(2α)`, which avoids
/// subtracting two numbers close to one.
pub fn pointwise_mse(kind: EstimatorKind, p: &ParetoParams, n: usize, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let target = kind.target_value(p, x);
    match kind {
        EstimatorKind::UMVUE_CDF => {
            if n < 2 {
                return Err(Error::InsufficientSample { n, required: 2 });
            }
            let c = check_point(p, x)?;
            if c == 0.0 {
                return Ok(0.0);
            }
            let a = umvue_cdf_tail(2, n, p.alpha(), c, cfg)?.value();
            let q = p.survival(x);
            Ok(a - q * q)
        }
        EstimatorKind { method: Method::Umvue, .. } => Ok(moment(kind, 2, p, n, x, cfg)?.value - target * target),
        EstimatorKind { method: Method::Mle, .. } => {
            let e1 = moment(kind, 1, p, n, x, cfg)?.value;
            let e2 = moment(kind, 2, p, n, x, cfg)?.value;
            Ok(e2 - 2.0 * target * e1 + target * target)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviationFlag {
    Ok,
    /// The series is undefined for this n (a needed gamma argument is non-positive).
    ClosedFormUndefined,
    /// The series produced a negative MSE or variance, or an F̃ mean outside `[0, 1]`.
    ClosedFormInvalid,
    QuadratureFailed,
}

impl fmt::Display for DeviationFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeviationFlag::Ok => "ok",
            DeviationFlag::ClosedFormUndefined => "closed_form_undefined",
            DeviationFlag::ClosedFormInvalid => "closed_form_invalid",
            DeviationFlag::QuadratureFailed => "quadrature_failed",
        })
    }
}

/// One MSE compared across the closed-form series, quadrature, and the
/// Bessel/Kummer representation (absent for the α rows).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationRow {
    pub n: usize,
    pub alpha: f64,
    pub k: f64,
    pub x: Option<f64>,
    pub estimator: EstimatorKind,
    pub closed: Option<f64>,
    pub quadrature: Option<f64>,
    pub exact_special: Option<f64>,
    pub rel_dev: Option<f64>,
    pub flag: DeviationFlag,
}

fn deviation_row(kind: EstimatorKind, p: &ParetoParams, n: usize, x: f64, cfg: &QuadratureConfig) -> DeviationRow {
    let closed = closed_form_report(kind, p, n, x);
    let quad = mse_via_quadrature(kind, p, n, x, cfg);
    let special = match kind.target {
        Target::Alpha => None,
        _ if kind.method == Method::Mle => bessel_report(kind, p, n, x, cfg).ok(),
        _ => kummer_report(kind, p, n, x, cfg).ok(),
    };
    let quadrature = quad.as_ref().ok().map(|r| r.mse);
    let closed_mse = closed.as_ref().ok().map(|r| r.mse);
    let rel_dev = match (closed_mse, quadrature) {
        (Some(c), Some(q)) => Some((c - q).abs() / q.abs().max(cfg.abs_tol)),
        _ => None,
    };
    let flag = match (&closed, &quad) {
        (_, Err(_)) => DeviationFlag::QuadratureFailed,
        (Err(_), _) => DeviationFlag::ClosedFormUndefined,
        (Ok(r), _) if !r.flags.is_empty() => DeviationFlag::ClosedFormInvalid,
        _ => DeviationFlag::Ok,
    };
    DeviationRow {
        n,
        alpha: p.alpha(),
        k: p.k(),
        x: (kind.target != Target::Alpha).then_some(x),
        estimator: kind,
        closed: closed_mse,
        quadrature,
        exact_special: special.map(|r| r.mse),
        rel_dev,
        flag,
    }
}

/// MSE rows for every x in the grid and each of the four pointwise
/// estimators, optionally followed by one row per α estimator.
pub fn deviation_report(
    p: &ParetoParams,
    n: usize,
    x_grid: &[f64],
    include_alpha: bool,
    cfg: &QuadratureConfig,
) -> Result<Vec<DeviationRow>> {
    if x_grid.is_empty() {
        return Err(Error::InvalidParameter("x grid is empty".into()));
    }
    cfg.validate()?;
    for &x in x_grid {
        check_point(p, x)?;
    }
    let mut rows: Vec<DeviationRow> = x_grid
        .iter()
        .flat_map(|&x| EstimatorKind::POINTWISE.into_iter().map(move |kind| (kind, x)))
        .map(|(kind, x)| deviation_row(kind, p, n, x, cfg))
        .collect();
    if include_alpha {
        for kind in [EstimatorKind::UMVUE_ALPHA, EstimatorKind::MLE_ALPHA] {
            rows.push(deviation_row(kind, p, n, p.k(), cfg));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::InfiniteTransform;

    fn p(alpha: f64, k: f64) -> ParetoParams {
        ParetoParams::new(alpha, k).unwrap()
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn spec_examples() {
        assert_eq!(moment_mle(Target::Cdf, 1, &p(1.0, 1.0), 5, 1.0, &cfg()).unwrap().value, 0.0);
        let a = moment_mle(Target::Alpha, 1, &p(2.0, 1.0), 5, 1.0, &cfg()).unwrap().value;
        assert!((a - 2.5).abs() < 1e-9);
        let f = moment_mle(Target::Pdf, 1, &p(1.0, 1.0), 3, 1.0, &cfg()).unwrap().value;
        assert!((f - 1.5).abs() < 1e-9);
        let u = moment_umvue(Target::Pdf, 1, &p(1.0, 1.0), 5, 2.0, &cfg()).unwrap().value;
        assert!((u - 0.25).abs() < 1e-8);
        assert_eq!(moment_umvue(Target::Cdf, 1, &p(1.0, 1.0), 5, 1.0, &cfg()).unwrap().value, 0.0);
        let s = moment_umvue(Target::Pdf, 2, &p(1.0, 1.0), 5, 1.0, &cfg()).unwrap().value;
        assert!((s - 4.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn mse_examples() {
        let r = mse_via_quadrature(EstimatorKind::MLE_ALPHA, &p(2.0, 1.0), 5, 1.0, &cfg()).unwrap();
        assert!((r.mse - 4.0 * 28.0 / 48.0).abs() < 1e-8);
        assert_eq!(r.eval_x, None);
        let r = mse_via_quadrature(EstimatorKind::MLE_PDF, &p(1.0, 1.0), 5, 1.0, &cfg()).unwrap();
        assert!((r.mse - 7.0 / 12.0).abs() < 1e-8);
        for &x in &[1.0, 1.3, 2.0, 5.0] {
            let r = mse_via_quadrature(EstimatorKind::UMVUE_PDF, &p(1.5, 1.0), 6, x, &cfg()).unwrap();
            assert!(r.bias.abs() < 1e-7, "x={x} bias={}", r.bias);
        }
    }

    #[test]
    fn pointwise_matches_full_assembly() {
        let m = p(0.8, 1.2);
        for kind in EstimatorKind::POINTWISE {
            for &x in &[1.2, 1.9, 4.0] {
                let a = pointwise_mse(kind, &m, 7, x, &cfg()).unwrap();
                let b = mse_via_quadrature(kind, &m, 7, x, &cfg()).unwrap().mse;
                assert!((a - b).abs() <= 1e-8 * b.abs().max(1e-12), "{kind:?} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn umvue_alpha_moments() {
        let m = p(1.7, 1.0);
        let e = moment_umvue(Target::Alpha, 1, &m, 6, 1.0, &cfg()).unwrap().value;
        assert!((e - 1.7).abs() < 1e-9);
        let r = mse_via_quadrature(EstimatorKind::UMVUE_ALPHA, &m, 6, 1.0, &cfg()).unwrap();
        assert!((r.mse - 1.7 * 1.7 / 4.0).abs() < 1e-9);
    }

    #[test]
    fn transforms_agree() {
        let m = p(0.5, 0.5);
        let exp = cfg().with_transform(InfiniteTransform::ExpMap);
        for kind in EstimatorKind::POINTWISE {
            for r in 1..=2 {
                let a = moment(kind, r, &m, 4, 1.3, &cfg()).unwrap();
                let b = moment(kind, r, &m, 4, 1.3, &exp).unwrap();
                assert!((a.value - b.value).abs() <= 1e-9 * a.value.abs(), "{kind:?} r={r}");
            }
        }
    }

    #[test]
    fn existence_errors() {
        let m = p(1.0, 1.0);
        assert!(matches!(moment_mle(Target::Alpha, 2, &m, 2, 1.0, &cfg()), Err(Error::MomentDoesNotExist { .. })));
        assert!(matches!(moment_mle(Target::Pdf, 3, &m, 3, 1.0, &cfg()), Err(Error::MomentDoesNotExist { .. })));
        assert!(moment_mle(Target::Pdf, 3, &m, 3, 1.5, &cfg()).is_ok());
        assert!(matches!(moment_umvue(Target::Pdf, 2, &m, 2, 1.0, &cfg()), Err(Error::MomentDoesNotExist { .. })));
        assert!(matches!(moment_umvue(Target::Pdf, 1, &m, 1, 1.5, &cfg()), Err(Error::InsufficientSample { .. })));
        assert!(matches!(moment_mle(Target::Pdf, 1, &m, 3, 0.5, &cfg()), Err(Error::Domain(_))));
    }

    #[test]
    fn deviation_report_shape() {
        let m = p(1.0, 1.0);
        let grid = [1.0, 1.5, 2.0, 2.5, 3.0];
        let rows = deviation_report(&m, 6, &grid, false, &cfg()).unwrap();
        assert_eq!(rows.len(), 20);
        for row in rows.iter().filter(|r| r.x == Some(1.0)) {
            assert!(row.rel_dev.unwrap() <= 1e-8, "{row:?}");
        }
        for row in &rows {
            if let (Some(s), Some(q)) = (row.exact_special, row.quadrature) {
                assert!((s - q).abs() <= 1e-8 * q.abs().max(1e-12), "{row:?}");
            }
        }
        assert_eq!(deviation_report(&m, 6, &grid, true, &cfg()).unwrap().len(), 22);
        assert!(deviation_report(&m, 6, &[], false, &cfg()).is_err());
    }
}
