use std::fmt;
use std::fs::{self, File};
use std::io::{self, Write};
use std::path::Path;

use pareto_core::estimators::{EstimatorKind, Method, Target};
use pareto_core::mc::{self, GridPairing, PerRepEngine, SimulationConfig, TableRow, XPolicy};
use pareto_core::oracle::{self, DeviationFlag, DeviationRow};
use pareto_core::{exact, Error, InfiniteTransform, ParetoParams, QuadratureConfig, SampleData};

use crate::format::{self, full, full_opt, short, Format};
use crate::{
    AdjudicateArgs, EngineArg, EvalArgs, MethodArg, MseArgs, PairingArg, PerRepArg, QuadArgs, TableArgs, TableFormat,
    TargetArg, TransformArg,
};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Op(Error),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Op(_) | CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Op(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Op(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

type CliResult = Result<(), CliError>;

fn kind(method: MethodArg, target: TargetArg) -> EstimatorKind {
    let method = match method {
        MethodArg::Mle => Method::Mle,
        MethodArg::Umvue => Method::Umvue,
    };
    let target = match target {
        TargetArg::Alpha => Target::Alpha,
        TargetArg::Pdf => Target::Pdf,
        TargetArg::Cdf => Target::Cdf,
    };
    EstimatorKind::new(method, target)
}

fn params(alpha: f64, k: f64) -> Result<ParetoParams, CliError> {
    ParetoParams::new(alpha, k).map_err(|e| CliError::Usage(e.to_string()))
}

fn quad_config(q: &QuadArgs) -> Result<QuadratureConfig, CliError> {
    let t = match q.transform {
        TransformArg::Rational => InfiniteTransform::RationalMap,
        TransformArg::Exp => InfiniteTransform::ExpMap,
    };
    let cfg = QuadratureConfig::default().with_rel_tol(q.rel_tol).with_transform(t);
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| CliError::Usage(format!("not a number: {t:?}"))))
        .collect()
}

fn read_sample(data: &str) -> Result<Vec<f64>, CliError> {
    let path = Path::new(data);
    let text = if path.is_file() { fs::read_to_string(path)? } else { data.to_owned() };
    let values = parse_list(&text)?;
    if values.is_empty() {
        return Err(CliError::Usage("the sample is empty".into()));
    }
    Ok(values)
}

pub fn eval(a: &EvalArgs) -> CliResult {
    if !(a.k > 0.0 && a.k.is_finite()) {
        return Err(CliError::Usage(format!("--k must be positive, got {}", a.k)));
    }
    let kind = kind(a.estimator, a.target);
    let x = match (a.target, a.x) {
        (TargetArg::Alpha, _) => a.k,
        (_, Some(x)) => x,
        (_, None) => return Err(CliError::Usage("--x is required for pdf and cdf".into())),
    };
    let sample = SampleData::from_values(read_sample(&a.data)?, a.k)?;
    println!("{}", short(kind.evaluate(&sample, x)?));
    Ok(())
}

const VALID_COMBOS: &str = "closed, quadrature, mc: any estimator and target; \
bessel: mle with pdf or cdf; kummer: umvue with pdf or cdf";

fn check_engine(engine: EngineArg, kind: EstimatorKind) -> CliResult {
    let ok = match engine {
        EngineArg::Closed | EngineArg::Quadrature | EngineArg::Mc => true,
        EngineArg::Bessel => kind.method == Method::Mle && kind.target != Target::Alpha,
        EngineArg::Kummer => kind.method == Method::Umvue && kind.target != Target::Alpha,
    };
    if ok {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "engine does not support {}/{}; valid combinations are {VALID_COMBOS}",
            kind.method, kind.target
        )))
    }
}

fn raw_moment(a: &MseArgs, kind: EstimatorKind, p: &ParetoParams, x: f64, r: u32, cfg: &QuadratureConfig) -> Result<(f64, Option<f64>), Error> {
    let n = a.n;
    let v = match (a.engine, kind.method, kind.target) {
        (EngineArg::Closed, m, Target::Alpha) => exact::alpha_raw_moment(m, n, p.alpha(), r)?,
        (EngineArg::Closed, Method::Mle, Target::Pdf) => exact::rth_moment_mle_pdf(p, n, x, r)?,
        (EngineArg::Closed, Method::Mle, Target::Cdf) => exact::rth_moment_mle_cdf(p, n, x, r)?,
        (EngineArg::Closed, Method::Umvue, Target::Pdf) => exact::rth_moment_umvue_pdf(p, n, x, r)?,
        (EngineArg::Closed, Method::Umvue, Target::Cdf) => exact::rth_moment_umvue_cdf(p, n, x, r)?,
        (EngineArg::Quadrature, ..) => oracle::moment(kind, r, p, n, x, cfg)?.value,
        (EngineArg::Mc, ..) => {
            let rep = mc::brute_force_moment(kind, r, p, n, x, a.reps, a.seed)?;
            return Ok((rep.mean, rep.std_error.map(|s| s.mean)));
        }
        (EngineArg::Bessel, _, Target::Pdf) => exact::exact_mle_moment_bessel(p, n, x, r, cfg)?,
        (EngineArg::Bessel, ..) => exact::exact_mle_cdf_moment_bessel(p, n, x, r, cfg)?,
        (EngineArg::Kummer, _, Target::Pdf) => exact::exact_umvue_pdf_moment_kummer(p, n, x, r, cfg)?,
        (EngineArg::Kummer, ..) => exact::exact_umvue_cdf_moment_kummer(p, n, x, r, cfg)?,
    };
    Ok((v, None))
}

fn engine_name(e: EngineArg) -> &'static str {
    match e {
        EngineArg::Closed => "closed_form",
        EngineArg::Quadrature => "quadrature",
        EngineArg::Mc => "monte_carlo",
        EngineArg::Bessel => "bessel_exact",
        EngineArg::Kummer => "kummer_exact",
    }
}

pub fn mse(a: &MseArgs) -> CliResult {
    let p = params(a.alpha, a.k)?;
    let kind = kind(a.estimator, a.target);
    check_engine(a.engine, kind)?;
    let cfg = quad_config(&a.quad)?;
    let x = a.x.unwrap_or(a.k);
    let stdout = io::stdout().lock();

    if let Some(r) = a.r {
        if r == 0 {
            return Err(CliError::Usage("--r must be at least 1".into()));
        }
        let (v, se) = raw_moment(a, kind, &p, x, r, &cfg)?;
        let xs = (kind.target != Target::Alpha).then_some(x);
        return write_raw_moment(stdout, a.format, a.engine, kind, xs, r, v, se);
    }

    let report = match a.engine {
        EngineArg::Closed => exact::closed_form_report(kind, &p, a.n, x)?,
        EngineArg::Quadrature => oracle::mse_via_quadrature(kind, &p, a.n, x, &cfg)?,
        EngineArg::Mc => mc::brute_force_moment(kind, 1, &p, a.n, x, a.reps, a.seed)?,
        EngineArg::Bessel => exact::bessel_report(kind, &p, a.n, x, &cfg)?,
        EngineArg::Kummer => exact::kummer_report(kind, &p, a.n, x, &cfg)?,
    };
    format::write_report(stdout, &report, a.format)?;
    Ok(())
}

#[derive(serde::Serialize)]
struct RawMomentRecord {
    engine: &'static str,
    estimator: String,
    target: String,
    x: Option<f64>,
    r: u32,
    moment: f64,
    std_error: Option<f64>,
}

#[allow(clippy::too_many_arguments)]
fn write_raw_moment<W: Write>(
    mut out: W,
    format: Format,
    engine: EngineArg,
    kind: EstimatorKind,
    x: Option<f64>,
    r: u32,
    v: f64,
    se: Option<f64>,
) -> CliResult {
    let rec = RawMomentRecord {
        engine: engine_name(engine),
        estimator: kind.method.to_string(),
        target: kind.target.to_string(),
        x,
        r,
        moment: v,
        std_error: se,
    };
    match format {
        Format::Text => {
            writeln!(out, "engine      {}", rec.engine)?;
            writeln!(out, "estimator   {}/{}", rec.estimator, rec.target)?;
            if let Some(x) = x {
                writeln!(out, "x           {}", short(x))?;
            }
            writeln!(out, "r           {r}")?;
            writeln!(out, "moment      {}", short(v))?;
            if let Some(se) = se {
                writeln!(out, "std_error   {}", short(se))?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["engine", "estimator", "target", "x", "r", "moment", "std_error"])?;
            w.write_record([
                rec.engine.to_string(),
                rec.estimator.clone(),
                rec.target.clone(),
                full_opt(x),
                r.to_string(),
                full(v),
                full_opt(se),
            ])?;
            w.flush()?;
        }
        Format::Json => format::write_json(out, &[rec])?,
    }
    Ok(())
}

/// `a,b,c` or `start:step:end` (inclusive, with a small tolerance on the end point).
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [start, step, end] => {
            let num = |t: &str| t.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad grid bound {t:?}")));
            let (start, step, end) = (num(start)?, num(step)?, num(end)?);
            if step.is_nan() || step <= 0.0 || end < start {
                return Err(CliError::Usage(format!("grid {s:?} needs step > 0 and end >= start")));
            }
            let count = ((end - start) / step + 1e-9).floor() as usize + 1;
            (0..count).map(|i| start + step * i as f64).collect()
        }
        [_] => parse_list(s)?,
        _ => return Err(CliError::Usage(format!("cannot parse grid {s:?}"))),
    };
    if grid.is_empty() {
        return Err(CliError::Usage("the x grid is empty".into()));
    }
    Ok(grid)
}

pub const ADJUDICATE_HEADER: [&str; 11] =
    ["n", "alpha", "k", "x", "estimator", "target", "closed", "quadrature", "exact_special", "rel_dev", "flag"];

fn write_deviation_csv<W: Write>(out: W, rows: &[DeviationRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ADJUDICATE_HEADER)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            full(r.alpha),
            full(r.k),
            full_opt(r.x),
            r.estimator.method.to_string(),
            r.estimator.target.to_string(),
            full_opt(r.closed),
            full_opt(r.quadrature),
            full_opt(r.exact_special),
            full_opt(r.rel_dev),
            r.flag.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn open_out(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn adjudicate(a: &AdjudicateArgs) -> CliResult {
    let p = params(a.alpha, a.k)?;
    let cfg = quad_config(&a.quad)?;
    let grid = parse_grid(&a.x_grid)?;
    if let Some(&x) = grid.iter().find(|&&x| x < a.k) {
        return Err(CliError::Usage(format!("grid point {x} lies below k = {}", a.k)));
    }
    let rows = oracle::deviation_report(&p, a.n, &grid, a.include_alpha, &cfg)?;
    write_deviation_csv(open_out(a.out.as_deref())?, &rows)?;
    if rows.iter().all(|r| r.flag == DeviationFlag::QuadratureFailed) {
        return Err(CliError::Op(Error::Unsupported("quadrature failed on every row".into())));
    }
    Ok(())
}

pub const TABLE_HEADER: [&str; 12] = [
    "n",
    "alpha",
    "k",
    "mse_umvue_pdf",
    "mse_mle_pdf",
    "mse_umvue_cdf",
    "mse_mle_cdf",
    "se_umvue_pdf",
    "se_mle_pdf",
    "se_umvue_cdf",
    "se_mle_cdf",
    "failed",
];

fn write_table_csv<W: Write>(out: W, rows: &[TableRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TABLE_HEADER)?;
    for r in rows {
        let mut rec = vec![r.n.to_string(), full(r.alpha), full(r.k)];
        rec.extend(
            [
                r.mse_umvue_pdf,
                r.mse_mle_pdf,
                r.mse_umvue_cdf,
                r.mse_mle_cdf,
                r.se_umvue_pdf,
                r.se_mle_pdf,
                r.se_umvue_cdf,
                r.se_mle_cdf,
            ]
            .map(full),
        );
        rec.push(r.failed.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn write_plot_files(dir: &Path, rows: &[TableRow], pairs: &[(f64, f64)]) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for &(alpha, k) in pairs {
        let mut cell: Vec<&TableRow> = rows.iter().filter(|r| r.alpha == alpha && r.k == k).collect();
        cell.sort_by_key(|r| r.n);
        cell.dedup_by_key(|r| r.n);
        for (name, umvue, mle) in [
            ("pdf", EstimatorKind::UMVUE_PDF, EstimatorKind::MLE_PDF),
            ("cdf", EstimatorKind::UMVUE_CDF, EstimatorKind::MLE_CDF),
        ] {
            let path = dir.join(format!("{name}_alpha{alpha}_k{k}.tsv"));
            let mut f = io::BufWriter::new(File::create(path)?);
            writeln!(f, "n\tmse_umvue\tmse_mle")?;
            for r in &cell {
                writeln!(f, "{}\t{}\t{}", r.n, full(r.mse(umvue).unwrap().0), full(r.mse(mle).unwrap().0))?;
            }
            f.flush()?;
        }
    }
    Ok(())
}

pub fn table(a: &TableArgs) -> CliResult {
    let quadrature = quad_config(&a.quad)?;
    let mut config = if a.published_design {
        SimulationConfig::published_design(a.seed)
    } else {
        SimulationConfig {
            n_grid: a.n_grid.clone(),
            alpha_grid: a.alpha_grid.clone(),
            k_grid: a.k_grid.clone(),
            pairing: match a.pairing {
                PairingArg::Product => GridPairing::Product,
                PairingArg::Zip => GridPairing::Zip,
            },
            seed: a.seed,
            ..SimulationConfig::default()
        }
    };
    config.reps = a.reps;
    config.quadrature = quadrature;
    config.parallel = !a.serial;
    config.x_policy = match (a.x, a.x_min) {
        (Some(x), _) => XPolicy::FixedPoint(x),
        (None, true) => XPolicy::SampleMinimum,
        (None, false) => XPolicy::FirstObservation,
    };
    config.engine_for_per_rep_mse = match a.engine {
        PerRepArg::Closed => PerRepEngine::ClosedForm,
        PerRepArg::Quadrature => PerRepEngine::Quadrature,
    };
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let rows = mc::simulate_table(&config)?;
    let out = open_out(a.out.as_deref())?;
    match a.format {
        TableFormat::Csv => write_table_csv(out, &rows)?,
        TableFormat::Json => format::write_json(out, &rows)?,
    }
    if let Some(dir) = &a.plot_dir {
        write_plot_files(dir, &rows, &config.pairs())?;
    }
    let summary = mc::efficiency_report(&rows, None)?;
    eprintln!(
        "{} cells: MLE has the smaller MSE in {} (pdf) and {} (cdf)",
        rows.len(),
        summary.pdf_mle_better,
        summary.cdf_mle_better
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        assert_eq!(parse_grid("1:0.5:3").unwrap(), vec![1.0, 1.5, 2.0, 2.5, 3.0]);
        assert_eq!(parse_grid("1, 2,4").unwrap(), vec![1.0, 2.0, 4.0]);
        assert_eq!(parse_grid("0.1:0.1:0.3").unwrap().len(), 3);
        assert!(parse_grid("1:0:3").is_err());
        assert!(parse_grid("a,b").is_err());
        assert!(parse_grid("").is_err());
    }
}
