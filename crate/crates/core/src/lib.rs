//! Estimation of the Pareto(α; k known) density and distribution function.
//!
//! Two families of point estimators are provided: the maximum likelihood
//! plug-in estimators (α̃, f̃, F̃) and the uniformly minimum variance unbiased
//! estimators (α̂, f̂, F̂). Their sampling moments can be evaluated by several
//! independent engines:
//!
//! * [`exact`]: the truncated closed-form series, plus exact representations
//!   through the modified Bessel function K and Kummer's function U;
//! * [`oracle`]: adaptive quadrature of the exact sampling densities;
//! * [`mc`]: seeded brute-force Monte Carlo, and the table-reproduction
//!   protocol that averages per-point MSEs over random evaluation points.
//!
//! At the collapse point `x = k` every series reduces to one term and all
//! engines must agree; away from it the series are truncations and the
//! quadrature oracle is authoritative.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod estimators;
pub mod exact;
pub mod mc;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod report;
pub mod seed;
pub mod series;
pub mod special;

pub use error::{Error, Result};
pub use estimators::{EstimatorKind, Method, Target};
pub use model::{ParetoParams, SampleData};
pub use quadrature::{InfiniteTransform, QuadratureConfig};
pub use report::{Engine, MomentReport, ReportFlag, StdErrors};
