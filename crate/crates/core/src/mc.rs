//! Seeded Monte Carlo: brute-force moments of the estimators, and the
//! table protocol that averages per-point MSEs over random evaluation points.
//!
//! Each replication draws from its own generator seeded by
//! `hash(seed, cell, rep)`; replications may run in any order (or in
//! parallel) and are reduced serially in replication order, so results are
//! bit-identical across schedules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;
use crate::exact::{closed_form_report, mle_alpha_moments, umvue_alpha_moments};
use crate::model::ParetoParams;
use crate::oracle::pointwise_mse;
use crate::quadrature::QuadratureConfig;
use crate::report::{Engine, MomentReport, StdErrors};
use crate::seed::{cell_key, replication_seed};

/// Minimum replication count accepted by [`brute_force_moment`].
pub const MIN_REPS: usize = 100;

fn map_reps<T, F>(reps: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return (0..reps as u64).into_par_iter().map(f).collect();
    }
    let _ = parallel;
    (0..reps as u64).map(f).collect()
}

/// Mean and standard error of the mean, summed in slice order.
fn mean_and_se(v: &[f64]) -> (f64, f64) {
    let m = v.len() as f64;
    let mean = v.iter().sum::<f64>() / m;
    if v.len() < 2 {
        return (mean, f64::NAN);
    }
    let ss: f64 = v.iter().map(|y| (y - mean) * (y - mean)).sum();
    (mean, (ss / (m - 1.0)).sqrt() / m.sqrt())
}

/// Empirical moments of `est^r` over `reps` fresh samples.
///
/// With `r = 1` the report describes the estimator itself. For `r > 1` the
/// per-replication value is `est^r` and the target is `target^r`, so `mean`
/// is the r-th moment. Degenerate samples (every observation equal to k)
/// are dropped if they are rarer than 1 in 10⁴, otherwise an error.
#[allow(clippy::too_many_arguments)]
pub fn brute_force_moment(
    kind: EstimatorKind,
    r: u32,
    p: &ParetoParams,
    n: usize,
    x: f64,
    reps: usize,
    seed: u64,
) -> Result<MomentReport> {
    brute_force_moment_exec(kind, r, p, n, x, reps, seed, true)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn brute_force_moment_exec(
    kind: EstimatorKind,
    r: u32,
    p: &ParetoParams,
    n: usize,
    x: f64,
    reps: usize,
    seed: u64,
    parallel: bool,
) -> Result<MomentReport> {
    if reps < MIN_REPS {
        return Err(Error::InvalidParameter(format!("need at least {MIN_REPS} replications, got {reps}")));
    }
    if r == 0 {
        return Err(Error::InvalidParameter("moment order must be at least 1".into()));
    }
    let cell = cell_key(n, p.alpha(), p.k());
    let draws = map_reps(reps, parallel, |rep| -> Result<Option<f64>> {
        let sample = p.sample(n, replication_seed(seed, cell, rep))?;
        match kind.evaluate(&sample, x) {
            Ok(v) => Ok(Some(v.powi(r as i32))),
            Err(Error::DegenerateSample) => Ok(None),
            Err(e) => Err(e),
        }
    });
    let mut ys = Vec::with_capacity(reps);
    for d in draws {
        if let Some(y) = d? {
            ys.push(y);
        }
    }
    let degenerate = reps - ys.len();
    if degenerate * 10_000 > reps || ys.is_empty() {
        return Err(Error::TooManyDegenerate { degenerate, reps });
    }
    let target = kind.target_value(p, x).powi(r as i32);
    let squares: Vec<f64> = ys.iter().map(|y| y * y).collect();
    let errors: Vec<f64> = ys.iter().map(|y| (y - target) * (y - target)).collect();
    let (mean, se_mean) = mean_and_se(&ys);
    let (second, se_second) = mean_and_se(&squares);
    let (_, se_mse) = mean_and_se(&errors);
    let eval_x = (kind.target != crate::estimators::Target::Alpha).then_some(x);
    Ok(MomentReport::from_moments(Engine::MonteCarlo, kind, eval_x, mean, second, target)
        .with_std_errors(StdErrors { mean: se_mean, second_moment: se_second, mse: se_mse }))
}

/// How the α and k grids combine into cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridPairing {
    /// Every α with every k.
    Product,
    /// `alpha_grid[i]` with `k_grid[i]`, as in the columns of a published table.
    Zip,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XPolicy {
    /// x is the first observation of a fresh sample, one per replication.
    FirstObservation,
    /// x is the smallest observation of a fresh sample.
    SampleMinimum,
    FixedPoint(f64),
}

/// Engine used for the per-replication MSE at the drawn x.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerRepEngine {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub reps: usize,
    pub n_grid: Vec<usize>,
    pub alpha_grid: Vec<f64>,
    pub k_grid: Vec<f64>,
    pub pairing: GridPairing,
    pub seed: u64,
    pub x_policy: XPolicy,
    pub engine_for_per_rep_mse: PerRepEngine,
    pub quadrature: QuadratureConfig,
    pub parallel: bool,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            reps: 1000,
            n_grid: vec![4, 10, 50, 100],
            alpha_grid: vec![0.5],
            k_grid: vec![0.5],
            pairing: GridPairing::Product,
            seed: 42,
            x_policy: XPolicy::FirstObservation,
            engine_for_per_rep_mse: PerRepEngine::Quadrature,
            quadrature: QuadratureConfig::default(),
            parallel: true,
        }
    }
}

/// n = 4, 5, …, 15, 20, 25, …, 100.
pub fn published_n_grid() -> Vec<usize> {
    (4..=15).chain((20..=100).step_by(5)).collect()
}

/// The six (α, k) column pairs of the published tables.
pub const PUBLISHED_PAIRS: [(f64, f64); 6] = [(0.5, 0.5), (1.0, 1.0), (1.5, 1.5), (2.0, 2.0), (0.5, 2.0), (2.0, 0.5)];

impl SimulationConfig {
    /// The published design: 29 sample sizes × the six (α, k) pairs, 1000 replications.
    pub fn published_design(seed: u64) -> Self {
        Self {
            n_grid: published_n_grid(),
            alpha_grid: PUBLISHED_PAIRS.iter().map(|p| p.0).collect(),
            k_grid: PUBLISHED_PAIRS.iter().map(|p| p.1).collect(),
            pairing: GridPairing::Zip,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidParameter("reps must be at least 1".into()));
        }
        if self.n_grid.is_empty() || self.alpha_grid.is_empty() || self.k_grid.is_empty() {
            return Err(Error::InvalidParameter("n, alpha and k grids must be nonempty".into()));
        }
        if let Some(&n) = self.n_grid.iter().find(|&&n| n < 3) {
            return Err(Error::InvalidParameter(format!("every n must be at least 3, got {n}")));
        }
        if self.pairing == GridPairing::Zip && self.alpha_grid.len() != self.k_grid.len() {
            return Err(Error::InvalidParameter(format!(
                "zipped grids need equal lengths, got {} alphas and {} ks",
                self.alpha_grid.len(),
                self.k_grid.len()
            )));
        }
        for (&a, &k) in self.alpha_grid.iter().zip(self.k_grid.iter().cycle()) {
            ParetoParams::new(a, k)?;
        }
        for &k in &self.k_grid {
            ParetoParams::new(1.0, k)?;
        }
        self.quadrature.validate()
    }

    /// (α, k) pairs in output order.
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        match self.pairing {
            GridPairing::Zip => self.alpha_grid.iter().copied().zip(self.k_grid.iter().copied()).collect(),
            GridPairing::Product => self
                .alpha_grid
                .iter()
                .flat_map(|&a| self.k_grid.iter().map(move |&k| (a, k)))
                .collect(),
        }
    }

    /// Cells ordered by (α, k) pair, then n.
    pub fn cells(&self) -> Vec<(usize, f64, f64)> {
        self.pairs().into_iter().flat_map(|(a, k)| self.n_grid.iter().map(move |&n| (n, a, k))).collect()
    }
}

/// Average per-point MSE of the four estimators for one (n, α, k) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: usize,
    pub alpha: f64,
    pub k: f64,
    pub mse_umvue_pdf: f64,
    pub mse_mle_pdf: f64,
    pub mse_umvue_cdf: f64,
    pub mse_mle_cdf: f64,
    pub se_umvue_pdf: f64,
    pub se_mle_pdf: f64,
    pub se_umvue_cdf: f64,
    pub se_mle_cdf: f64,
    /// Per-point evaluations that failed (summed over the four estimators) and were left out.
    pub failed: usize,
}

impl TableRow {
    pub fn mse(&self, kind: EstimatorKind) -> Option<(f64, f64)> {
        match kind {
            EstimatorKind::UMVUE_PDF => Some((self.mse_umvue_pdf, self.se_umvue_pdf)),
            EstimatorKind::MLE_PDF => Some((self.mse_mle_pdf, self.se_mle_pdf)),
            EstimatorKind::UMVUE_CDF => Some((self.mse_umvue_cdf, self.se_umvue_cdf)),
            EstimatorKind::MLE_CDF => Some((self.mse_mle_cdf, self.se_mle_cdf)),
            _ => None,
        }
    }
}

fn per_point_mse(
    engine: PerRepEngine,
    kind: EstimatorKind,
    p: &ParetoParams,
    n: usize,
    x: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    match engine {
        PerRepEngine::Quadrature => pointwise_mse(kind, p, n, x, cfg),
        PerRepEngine::ClosedForm => closed_form_report(kind, p, n, x).map(|r| r.mse),
    }
}

/// One table cell.
pub fn simulate_cell(config: &SimulationConfig, n: usize, alpha: f64, k: f64) -> Result<TableRow> {
    let p = ParetoParams::new(alpha, k)?;
    if let XPolicy::FixedPoint(x) = config.x_policy {
        if !(x >= k) {
            return Err(Error::Domain(format!("fixed evaluation point {x} lies below k = {k}")));
        }
    }
    let cell = cell_key(n, alpha, k);
    let per_rep = map_reps(config.reps, config.parallel, |rep| -> Result<[Option<f64>; 4]> {
        let x = match config.x_policy {
            XPolicy::FixedPoint(x) => x,
            XPolicy::FirstObservation => p.sample(n, replication_seed(config.seed, cell, rep))?.values()[0],
            XPolicy::SampleMinimum => {
                let s = p.sample(n, replication_seed(config.seed, cell, rep))?;
                s.values().iter().copied().fold(f64::INFINITY, f64::min)
            }
        };
        Ok(EstimatorKind::POINTWISE
            .map(|kind| per_point_mse(config.engine_for_per_rep_mse, kind, &p, n, x, &config.quadrature).ok()))
    });
    let mut cols: [Vec<f64>; 4] = Default::default();
    let mut failed = 0;
    for rep in per_rep {
        for (col, v) in cols.iter_mut().zip(rep?) {
            match v {
                Some(v) => col.push(v),
                None => failed += 1,
            }
        }
    }
    let stats = cols.map(|c| if c.is_empty() { (f64::NAN, f64::NAN) } else { mean_and_se(&c) });
    Ok(TableRow {
        n,
        alpha,
        k,
        mse_umvue_pdf: stats[0].0,
        mse_mle_pdf: stats[1].0,
        mse_umvue_cdf: stats[2].0,
        mse_mle_cdf: stats[3].0,
        se_umvue_pdf: stats[0].1,
        se_mle_pdf: stats[1].1,
        se_umvue_cdf: stats[2].1,
        se_mle_cdf: stats[3].1,
        failed,
    })
}

/// Runs every cell of the configuration, ordered as [`SimulationConfig::cells`].
pub fn simulate_table(config: &SimulationConfig) -> Result<Vec<TableRow>> {
    config.validate()?;
    config.cells().into_iter().map(|(n, a, k)| simulate_cell(config, n, a, k)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyCell {
    pub n: usize,
    pub alpha: f64,
    pub k: f64,
    /// `mse_mle / mse_umvue`; absent when the UMVUE MSE is zero or not finite.
    pub ratio_pdf: Option<f64>,
    pub ratio_cdf: Option<f64>,
}

/// α̃ versus α̂ at one (n, α): exact MSEs and Monte Carlo estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaComparison {
    pub n: usize,
    pub alpha: f64,
    pub mse_mle_exact: f64,
    pub mse_umvue_exact: f64,
    pub mle_mc: MomentReport,
    pub umvue_mc: MomentReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencySummary {
    pub cells: Vec<EfficiencyCell>,
    pub pdf_mle_better: usize,
    pub cdf_mle_better: usize,
    pub alpha: Option<AlphaComparison>,
}

fn ratio(mle: f64, umvue: f64) -> Option<f64> {
    let r = mle / umvue;
    (umvue > 0.0 && r.is_finite()).then_some(r)
}

/// MLE/UMVUE MSE ratios per cell and, if requested, the α-estimator comparison
/// at `(n, α)` with `reps` brute-force replications.
pub fn efficiency_report(rows: &[TableRow], alpha_check: Option<(usize, f64, usize, u64)>) -> Result<EfficiencySummary> {
    if rows.is_empty() {
        return Err(Error::InvalidParameter("no table rows".into()));
    }
    let cells: Vec<EfficiencyCell> = rows
        .iter()
        .map(|r| EfficiencyCell {
            n: r.n,
            alpha: r.alpha,
            k: r.k,
            ratio_pdf: ratio(r.mse_mle_pdf, r.mse_umvue_pdf),
            ratio_cdf: ratio(r.mse_mle_cdf, r.mse_umvue_cdf),
        })
        .collect();
    let below_one = |f: fn(&EfficiencyCell) -> Option<f64>| cells.iter().filter(|c| f(c).is_some_and(|v| v < 1.0)).count();
    let pdf_mle_better = below_one(|c| c.ratio_pdf);
    let cdf_mle_better = below_one(|c| c.ratio_cdf);
    let alpha = match alpha_check {
        None => None,
        Some((n, a, reps, seed)) => {
            let p = ParetoParams::new(a, 1.0)?;
            Some(AlphaComparison {
                n,
                alpha: a,
                mse_mle_exact: mle_alpha_moments(n, a)?.mse,
                mse_umvue_exact: umvue_alpha_moments(n, a)?.mse,
                mle_mc: brute_force_moment(EstimatorKind::MLE_ALPHA, 1, &p, n, p.k(), reps, seed)?,
                umvue_mc: brute_force_moment(EstimatorKind::UMVUE_ALPHA, 1, &p, n, p.k(), reps, seed)?,
            })
        }
    };
    Ok(EfficiencySummary { cells, pdf_mle_better, cdf_mle_better, alpha })
}
