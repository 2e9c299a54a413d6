//! WebAssembly bindings for the static page in `www/`.
//!
//! Every export returns a flat `Float64Array`; the layout is documented on
//! each function. The `*_impl` functions hold the logic so they can be tested
//! natively, where `JsError` cannot be constructed.

use pareto_core::estimators::mle_alpha;
use pareto_core::exact::{bessel_report, closed_form_report, g_density, kummer_report};
use pareto_core::oracle::{mse_via_quadrature, pointwise_mse};
use pareto_core::seed::derive_seed;
use pareto_core::{EstimatorKind, Method, ParetoParams, QuadratureConfig};
use wasm_bindgen::prelude::*;

const MAX_POINTS: usize = 400;
const MAX_REPS: usize = 200_000;

fn params(alpha: f64, k: f64) -> Result<ParetoParams, String> {
    ParetoParams::new(alpha, k).map_err(|e| e.to_string())
}

/// `[x₀..x_m, umvue_pdf.., mle_pdf.., umvue_cdf.., mle_cdf..]`, each block of
/// length `points`, with x log-spaced on `[k, x_max]`.
pub fn mse_curves_impl(n: usize, alpha: f64, k: f64, x_max: f64, points: usize) -> Result<Vec<f64>, String> {
    let p = params(alpha, k)?;
    if x_max.is_nan() || x_max <= k {
        return Err(format!("x_max must exceed k = {k}"));
    }
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must lie in 2..={MAX_POINTS}"));
    }
    if n < 3 {
        return Err("the density estimators have finite MSE only for n >= 3".into());
    }
    let cfg = QuadratureConfig::default().with_rel_tol(1e-8);
    let span = (x_max / k).ln();
    let xs: Vec<f64> = (0..points).map(|i| k * (span * i as f64 / (points - 1) as f64).exp()).collect();
    let mut out = xs.clone();
    for kind in EstimatorKind::POINTWISE {
        for &x in &xs {
            out.push(pointwise_mse(kind, &p, n, x, &cfg).map_err(|e| e.to_string())?);
        }
    }
    Ok(out)
}

/// Per estimator (UMVUE pdf, MLE pdf, UMVUE cdf, MLE cdf):
/// `[closed-form series MSE, quadrature MSE, special-function MSE]`, NaN where
/// an engine has no representation.
pub fn closed_form_gap_impl(n: usize, alpha: f64, k: f64, x: f64) -> Result<Vec<f64>, String> {
    let p = params(alpha, k)?;
    if x.is_nan() || x < k {
        return Err(format!("x must be at least k = {k}"));
    }
    let cfg = QuadratureConfig::default();
    let mut out = Vec::with_capacity(12);
    for kind in EstimatorKind::POINTWISE {
        let closed = closed_form_report(kind, &p, n, x).map(|r| r.mse).unwrap_or(f64::NAN);
        let quad = mse_via_quadrature(kind, &p, n, x, &cfg).map_err(|e| e.to_string())?.mse;
        let special = match kind.method {
            Method::Mle => bessel_report(kind, &p, n, x, &cfg),
            Method::Umvue => kummer_report(kind, &p, n, x, &cfg),
        }
        .map(|r| r.mse)
        .unwrap_or(f64::NAN);
        out.extend([closed, quad, special]);
    }
    Ok(out)
}

/// `[bin centres.., exact density g(w).., histogram density..]`, each block of
/// length `bins`, for `reps` simulated values of α̃ on `[0, w_max]`.
pub fn alpha_sampling_impl(n: usize, alpha: f64, reps: usize, bins: usize, seed: u64) -> Result<Vec<f64>, String> {
    let p = params(alpha, 1.0)?;
    if n < 1 || !(1..=MAX_REPS).contains(&reps) || !(2..=MAX_POINTS).contains(&bins) {
        return Err(format!("need n >= 1, reps in 1..={MAX_REPS}, bins in 2..={MAX_POINTS}"));
    }
    // the inverse-gamma law of α̃ has its bulk well inside 4αn/(n-1) for n >= 3
    let w_max = 4.0 * alpha * n as f64 / (n.max(2) - 1) as f64;
    let width = w_max / bins as f64;
    let mut counts = vec![0usize; bins];
    for rep in 0..reps {
        let sample = p.sample(n, derive_seed(seed, &[rep as u64])).map_err(|e| e.to_string())?;
        let Ok(w) = mle_alpha(&sample) else { continue };
        let b = (w / width) as usize;
        if b < bins {
            counts[b] += 1;
        }
    }
    let centres: Vec<f64> = (0..bins).map(|i| (i as f64 + 0.5) * width).collect();
    let mut out = centres.clone();
    out.extend(centres.iter().map(|&w| g_density(w, n, alpha)));
    out.extend(counts.iter().map(|&c| c as f64 / (reps as f64 * width)));
    Ok(out)
}

#[wasm_bindgen]
pub fn mse_curves(n: usize, alpha: f64, k: f64, x_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    mse_curves_impl(n, alpha, k, x_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn closed_form_gap(n: usize, alpha: f64, k: f64, x: f64) -> Result<Vec<f64>, JsError> {
    closed_form_gap_impl(n, alpha, k, x).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn alpha_sampling(n: usize, alpha: f64, reps: usize, bins: usize, seed: u32) -> Result<Vec<f64>, JsError> {
    alpha_sampling_impl(n, alpha, reps, bins, u64::from(seed)).map_err(|e| JsError::new(&e))
}
