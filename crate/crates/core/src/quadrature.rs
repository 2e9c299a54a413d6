//! Adaptive Gauss–Kronrod quadrature on finite and semi-infinite intervals.
//!
//! The semi-infinite integrators take the integrand as a natural logarithm.
//! A coarse scan in `ln(w - lower)` locates the peak, the integrand is
//! rescaled so its peak is one, and the peak's neighbourhood is seeded as
//! breakpoints before adaptive bisection starts. Results are returned in log
//! form so callers can combine them with large or tiny prefactors.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Change of variables used to bring `(lower, ∞)` onto a finite range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfiniteTransform {
    /// `w = lower + u/(1-u)`, `u ∈ (0, 1)`.
    RationalMap,
    /// `w = lower + e^v`, `v` truncated where the integrand is negligible.
    ExpMap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub infinite_transform: InfiniteTransform,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
            infinite_transform: InfiniteTransform::RationalMap,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter("quadrature tolerances must be positive".into()));
        }
        if self.max_subdivisions < 50 {
            return Err(Error::InvalidParameter("max_subdivisions must be at least 50".into()));
        }
        Ok(())
    }

    pub fn with_transform(mut self, t: InfiniteTransform) -> Self {
        self.infinite_transform = t;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    /// Log-integrand values this far below the peak are treated as zero.
    fn ln_cutoff(&self) -> f64 {
        self.abs_tol.ln() - 40.0
    }
}

/// A linear-scale integral estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

/// Integral estimate held as a logarithm; `ln_value = -∞` means exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LnEstimate {
    pub ln_value: f64,
    pub rel_error: f64,
    pub subdivisions: usize,
}

impl LnEstimate {
    pub const ZERO: Self = Self { ln_value: f64::NEG_INFINITY, rel_error: 0.0, subdivisions: 0 };

    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }

    pub fn to_estimate(&self) -> Estimate {
        let value = self.value();
        Estimate { value, error: value * self.rel_error, subdivisions: self.subdivisions }
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    result: f64,
    error: f64,
    resabs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// 21-point Kronrod rule with the embedded 10-point Gauss rule, with the
/// usual QUADPACK error scaling.
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[10];
    let mut resabs = resk.abs();
    let mut resg = 0.0;
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = resk * 0.5;
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let result = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Segment { a, b, result, error, resabs }
}

/// Adaptive bisection over `[a, b]` seeded with interior `points`.
///
/// Converges when the summed error estimate is below
/// `max(abs_tol, rel_tol |I|)`.
pub fn integrate_with_points<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    points: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<Estimate> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::Domain(format!("invalid interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0, subdivisions: 0 });
    }
    let mut cuts: Vec<f64> = points.iter().copied().filter(|p| *p > a && *p < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(a);
    edges.extend(cuts);
    edges.push(b);

    let mut heap = BinaryHeap::with_capacity(64);
    let mut frozen: Vec<Segment> = Vec::new();
    for w in edges.windows(2) {
        heap.push(gk21(&f, w[0], w[1]));
    }

    let totals = |heap: &BinaryHeap<Segment>, frozen: &[Segment]| {
        heap.iter().chain(frozen.iter()).fold((0.0, 0.0, 0.0), |(r, e, ab), s| {
            (r + s.result, e + s.error, ab + s.resabs)
        })
    };

    loop {
        let (result, error, resabs) = totals(&heap, &frozen);
        let count = heap.len() + frozen.len();
        let tol = abs_tol.max(rel_tol * result.abs());
        if !result.is_finite() {
            return Err(Error::Domain("integrand produced a non-finite value".into()));
        }
        if error <= tol || error <= 50.0 * f64::EPSILON * resabs {
            return Ok(Estimate { value: result, error, subdivisions: count });
        }
        let Some(worst) = heap.pop() else {
            // every remaining segment is at the resolution limit
            let best = Estimate { value: result, error, subdivisions: count };
            return Err(Error::Accuracy { best });
        };
        if count >= max_subdivisions {
            heap.push(worst);
            let best = Estimate { value: result, error, subdivisions: count };
            return Err(Error::Accuracy { best });
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            frozen.push(worst);
            continue;
        }
        heap.push(gk21(&f, worst.a, mid));
        heap.push(gk21(&f, mid, worst.b));
    }
}

/// Integral of `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    cfg.validate()?;
    integrate_with_points(f, a, b, &[], cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions)
}

fn sanitize(v: f64) -> f64 {
    debug_assert!(!v.is_nan(), "log-integrand returned NaN");
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

fn scaled_ln_result(ln_peak: f64, est: Estimate) -> LnEstimate {
    if est.value <= 0.0 {
        return LnEstimate { subdivisions: est.subdivisions, ..LnEstimate::ZERO };
    }
    LnEstimate {
        ln_value: ln_peak + est.value.ln(),
        rel_error: est.error / est.value,
        subdivisions: est.subdivisions,
    }
}

fn scaled_integrate<F: Fn(f64) -> f64>(
    phi: F,
    a: f64,
    b: f64,
    ln_peak: f64,
    points: &[f64],
    cfg: &QuadratureConfig,
) -> Result<LnEstimate> {
    let cutoff = cfg.ln_cutoff();
    let g = |t: f64| {
        let d = sanitize(phi(t)) - ln_peak;
        if d < cutoff {
            0.0
        } else {
            d.exp()
        }
    };
    // The scaled integrand peaks at one, so only a relative target is meaningful.
    match integrate_with_points(g, a, b, points, cfg.rel_tol, f64::MIN_POSITIVE, cfg.max_subdivisions) {
        Ok(est) => Ok(scaled_ln_result(ln_peak, est)),
        Err(Error::Accuracy { best }) => {
            let l = scaled_ln_result(ln_peak, best);
            Err(Error::Accuracy { best: l.to_estimate() })
        }
        Err(e) => Err(e),
    }
}

const SCAN_LO: f64 = -40.0;
const SCAN_HI: f64 = 40.0;
const SCAN_STEP: f64 = 0.5;
const BREAK_DROP: f64 = 40.0;

struct Scan {
    ys: Vec<f64>,
    phis: Vec<f64>,
    peak: usize,
}

impl Scan {
    fn run(ys: Vec<f64>, phi: impl Fn(f64) -> f64) -> Self {
        let phis: Vec<f64> = ys.iter().map(|&y| sanitize(phi(y))).collect();
        let peak = phis
            .iter()
            .enumerate()
            .fold(0, |best, (i, &v)| if v > phis[best] { i } else { best });
        Scan { ys, phis, peak }
    }

    fn ln_peak(&self) -> f64 {
        self.phis[self.peak]
    }

    /// Indices bracketing the region within `drop` of the peak.
    fn support(&self, drop: f64) -> (usize, usize) {
        let m = self.ln_peak() - drop;
        let lo = self.phis.iter().position(|&v| v >= m).unwrap_or(0);
        let hi = self.phis.iter().rposition(|&v| v >= m).unwrap_or(self.phis.len() - 1);
        (lo, hi)
    }

    /// Scan abscissae worth seeding as breakpoints.
    fn breakpoints(&self) -> Vec<f64> {
        let last = self.ys.len() - 1;
        let (lo, hi) = self.support(BREAK_DROP);
        let mut idx = vec![lo.saturating_sub(1), (hi + 1).min(last)];
        for d in [-2i64, -1, 0, 1, 2] {
            let i = self.peak as i64 + d;
            if i >= 0 && i as usize <= last {
                idx.push(i as usize);
            }
        }
        idx.sort_unstable();
        idx.dedup();
        idx.into_iter().map(|i| self.ys[i]).collect()
    }
}

fn scan_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| lo + step * i as f64).collect()
}

#[inline]
fn softplus(y: f64) -> f64 {
    if y > 0.0 {
        y + (-y).exp().ln_1p()
    } else {
        y.exp().ln_1p()
    }
}

/// `ln ∫_lower^∞ exp(ln_f(w)) dw` for a nonnegative integrand given in log form.
pub fn integrate_log_semi_infinite<F: Fn(f64) -> f64>(
    ln_f: F,
    lower: f64,
    cfg: &QuadratureConfig,
) -> Result<LnEstimate> {
    cfg.validate()?;
    if !lower.is_finite() {
        return Err(Error::Domain(format!("lower limit must be finite, got {lower}")));
    }
    match cfg.infinite_transform {
        InfiniteTransform::RationalMap => rational_semi_infinite(&ln_f, lower, cfg),
        InfiniteTransform::ExpMap => exp_semi_infinite(&ln_f, lower, cfg),
    }
}

fn rational_semi_infinite<F: Fn(f64) -> f64>(ln_f: &F, lower: f64, cfg: &QuadratureConfig) -> Result<LnEstimate> {
    // With y = logit(u): w - lower = e^y and -2 ln(1-u) = 2 softplus(y).
    let scan = Scan::run(scan_grid(SCAN_LO, SCAN_HI, SCAN_STEP), |y| {
        ln_f(lower + y.exp()) + 2.0 * softplus(y)
    });
    if scan.ln_peak() == f64::NEG_INFINITY {
        return Ok(LnEstimate::ZERO);
    }
    // A tail still significant at w ≈ e^40 maps to a strong singularity at
    // u = 1 that the rule cannot resolve; the log map handles such tails.
    if *scan.phis.last().unwrap() >= scan.ln_peak() + cfg.ln_cutoff() - 20.0 {
        return exp_semi_infinite(ln_f, lower, cfg);
    }
    // logit⁻¹ of a large breakpoint rounds to exactly 1; keep only interior points
    let points: Vec<f64> =
        scan.breakpoints().into_iter().map(|y| 1.0 / (1.0 + (-y).exp())).filter(|&u| u > 0.0 && u < 1.0).collect();
    let phi = |u: f64| {
        let om = 1.0 - u;
        if om <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let v = ln_f(lower + u / om);
        if v == f64::NEG_INFINITY {
            v
        } else {
            v - 2.0 * om.ln()
        }
    };
    scaled_integrate(phi, 0.0, 1.0, scan.ln_peak(), &points, cfg)
}

fn exp_semi_infinite<F: Fn(f64) -> f64>(ln_f: &F, lower: f64, cfg: &QuadratureConfig) -> Result<LnEstimate> {
    let phi = |v: f64| ln_f(lower + v.exp()) + v;
    let truncation = cfg.ln_cutoff() - 20.0;
    let (mut lo, mut hi) = (SCAN_LO, SCAN_HI);
    let mut scan = Scan::run(scan_grid(lo, hi, SCAN_STEP), phi);
    if scan.ln_peak() == f64::NEG_INFINITY {
        return Ok(LnEstimate::ZERO);
    }
    // Widen the scan until both ends have decayed (slow power-law tails).
    loop {
        let m = scan.ln_peak() + truncation;
        let grow_lo = scan.phis[0] >= m && lo > -700.0;
        let grow_hi = *scan.phis.last().unwrap() >= m && hi < 700.0;
        if !grow_lo && !grow_hi {
            break;
        }
        if grow_lo {
            lo -= 40.0;
        }
        if grow_hi {
            hi = (hi + 40.0).min(700.0);
        }
        scan = Scan::run(scan_grid(lo, hi, SCAN_STEP), phi);
    }
    let (i_lo, i_hi) = scan.support(-truncation);
    let last = scan.ys.len() - 1;
    let a = scan.ys[i_lo.saturating_sub(1)];
    let b = scan.ys[(i_hi + 1).min(last)];
    let points = scan.breakpoints();
    scaled_integrate(phi, a, b, scan.ln_peak(), &points, cfg)
}

/// `ln ∫_a^b exp(ln_f(t)) dt` over a finite interval.
pub fn integrate_log_finite<F: Fn(f64) -> f64>(ln_f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<LnEstimate> {
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::Domain(format!("invalid interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(LnEstimate::ZERO);
    }
    const SCAN_POINTS: usize = 80;
    let h = (b - a) / SCAN_POINTS as f64;
    // interior abscissae only; the integrand may be singular at the ends
    let ys: Vec<f64> = (0..SCAN_POINTS).map(|i| a + h * (i as f64 + 0.5)).collect();
    let scan = Scan::run(ys, &ln_f);
    if scan.ln_peak() == f64::NEG_INFINITY {
        return Ok(LnEstimate::ZERO);
    }
    let points = scan.breakpoints();
    scaled_integrate(&ln_f, a, b, scan.ln_peak(), &points, cfg)
}
