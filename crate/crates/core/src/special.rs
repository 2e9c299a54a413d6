//! Modified Bessel K and Kummer U through their integral representations.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_log_semi_infinite, LnEstimate, QuadratureConfig};
use crate::series::ln_gamma;

#[inline]
fn ln_cosh(y: f64) -> f64 {
    let a = y.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

/// `ln K_ν(z) = ln ∫₀^∞ e^(-z cosh t) cosh(νt) dt`.
pub fn ln_bessel_k(nu: f64, z: f64, cfg: &QuadratureConfig) -> Result<LnEstimate> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::Domain(format!("Bessel K needs z > 0, got {z}")));
    }
    if !nu.is_finite() {
        return Err(Error::Domain("Bessel K order must be finite".into()));
    }
    integrate_log_semi_infinite(|t| -z * t.cosh() + ln_cosh(nu * t), 0.0, cfg)
}

/// Modified Bessel function of the second kind, `K_ν(z)`.
pub fn bessel_k_nu(nu: f64, z: f64) -> Result<f64> {
    Ok(ln_bessel_k(nu, z, &QuadratureConfig::default())?.value())
}

/// `ln U(a, b, c)` with `U(a,b,c) = Γ(a)⁻¹ ∫₀^∞ t^(a-1) (1+t)^(b-a-1) e^(-ct) dt`.
pub fn ln_kummer_u(a: f64, b: f64, c: f64, cfg: &QuadratureConfig) -> Result<LnEstimate> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!("Kummer U needs a > 0, got {a}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!("Kummer U needs c > 0, got {c}")));
    }
    if !b.is_finite() {
        return Err(Error::Domain("Kummer U parameter b must be finite".into()));
    }
    let p = a - 1.0;
    let q = b - a - 1.0;
    let mut est = integrate_log_semi_infinite(
        |t| {
            let lead = if p == 0.0 { 0.0 } else { p * t.ln() };
            lead + q * t.ln_1p() - c * t
        },
        0.0,
        cfg,
    )?;
    est.ln_value -= ln_gamma(a);
    Ok(est)
}

/// Confluent hypergeometric function of the second kind, `U(a, b, c)`.
pub fn kummer_u(a: f64, b: f64, c: f64) -> Result<f64> {
    Ok(ln_kummer_u(a, b, c, &QuadratureConfig::default())?.value())
}
