//! Number formatting: 17 significant digits for files, 6 for the console.

use std::io::Write;

use pareto_core::MomentReport;
use serde::Serialize;

/// Scientific notation with 17 significant digits; parses back to the same f64.
pub fn full(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

pub fn full_opt(v: Option<f64>) -> String {
    v.map(full).unwrap_or_default()
}

/// Rounded to 6 significant digits, printed in shortest form.
pub fn short(v: f64) -> String {
    if !v.is_finite() || v == 0.0 {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.5e}").parse().unwrap_or(v);
    rounded.to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// Flat view of a [`MomentReport`] shared by the CSV and JSON writers.
#[derive(Serialize)]
pub struct ReportRecord {
    pub engine: String,
    pub estimator: String,
    pub target: String,
    pub x: Option<f64>,
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
    pub bias: f64,
    pub mse: f64,
    pub se_mean: Option<f64>,
    pub se_second_moment: Option<f64>,
    pub se_mse: Option<f64>,
    pub flags: String,
}

impl From<&MomentReport> for ReportRecord {
    fn from(r: &MomentReport) -> Self {
        let flags: Vec<String> = r
            .flags
            .iter()
            .map(|f| serde_json::to_value(f).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default())
            .collect();
        Self {
            engine: r.engine.to_string(),
            estimator: r.estimator.method.to_string(),
            target: r.estimator.target.to_string(),
            x: r.eval_x,
            mean: r.mean,
            second_moment: r.second_moment,
            variance: r.variance,
            bias: r.bias,
            mse: r.mse,
            se_mean: r.std_error.map(|s| s.mean),
            se_second_moment: r.std_error.map(|s| s.second_moment),
            se_mse: r.std_error.map(|s| s.mse),
            flags: flags.join(";"),
        }
    }
}

const REPORT_HEADER: [&str; 13] = [
    "engine",
    "estimator",
    "target",
    "x",
    "mean",
    "second_moment",
    "variance",
    "bias",
    "mse",
    "se_mean",
    "se_second_moment",
    "se_mse",
    "flags",
];

pub fn write_report<W: Write>(out: W, r: &MomentReport, format: Format) -> std::io::Result<()> {
    let rec = ReportRecord::from(r);
    match format {
        Format::Text => {
            let mut out = out;
            writeln!(out, "engine      {}", rec.engine)?;
            writeln!(out, "estimator   {}/{}", rec.estimator, rec.target)?;
            if let Some(x) = rec.x {
                writeln!(out, "x           {}", short(x))?;
            }
            writeln!(out, "mean        {}", short(rec.mean))?;
            writeln!(out, "second      {}", short(rec.second_moment))?;
            writeln!(out, "variance    {}", short(rec.variance))?;
            writeln!(out, "bias        {}", short(rec.bias))?;
            writeln!(out, "mse         {}", short(rec.mse))?;
            if let (Some(a), Some(b), Some(c)) = (rec.se_mean, rec.se_second_moment, rec.se_mse) {
                writeln!(out, "std_error   mean {}  second {}  mse {}", short(a), short(b), short(c))?;
            }
            if !rec.flags.is_empty() {
                writeln!(out, "flags       {}", rec.flags)?;
            }
            Ok(())
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(REPORT_HEADER)?;
            w.write_record([
                rec.engine.clone(),
                rec.estimator.clone(),
                rec.target.clone(),
                full_opt(rec.x),
                full(rec.mean),
                full(rec.second_moment),
                full(rec.variance),
                full(rec.bias),
                full(rec.mse),
                full_opt(rec.se_mean),
                full_opt(rec.se_second_moment),
                full_opt(rec.se_mse),
                rec.flags.clone(),
            ])?;
            w.flush()
        }
        Format::Json => write_json(out, &[rec]),
    }
}

pub fn write_json<W: Write, T: Serialize>(mut out: W, rows: &[T]) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_round_trips() {
        for v in [0.1, 1.0 / 3.0, 7.0 / 12.0, 1e-300, 123456789.12345679, -2.5e-7] {
            let s = full(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
    }

    #[test]
    fn short_has_six_digits() {
        assert_eq!(short(7.0 / 12.0), "0.583333");
        assert_eq!(short(1.0), "1");
        assert_eq!(short(2.5), "2.5");
        assert_eq!(short(1234567.0), "1234570");
    }
}
