use std::path::PathBuf;
use std::process::{Command, Output};

fn pareto_est(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pareto-est")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn eval_single_observation_collapse() {
    let o = pareto_est(&["eval", "--data", "2.718281828", "--k", "1", "--target", "alpha", "--estimator", "mle"]);
    assert!(o.status.success());
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 1.0).abs() < 1e-6, "{v}");
}

#[test]
fn eval_umvue_alpha_from_file() {
    let path = tmp("two_obs.txt");
    std::fs::write(&path, "2.718281828\n2.718281828\n").unwrap();
    let o = pareto_est(&["eval", "--data", path.to_str().unwrap(), "--k", "1", "--target", "alpha", "--estimator", "umvue"]);
    assert!(o.status.success());
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 0.5).abs() < 1e-6, "{v}");
}

#[test]
fn eval_rejects_bad_input() {
    let bad_k = pareto_est(&["eval", "--data", "2", "--k", "0", "--target", "alpha", "--estimator", "mle"]);
    assert_eq!(bad_k.status.code(), Some(2));
    let no_x = pareto_est(&["eval", "--data", "2,3", "--k", "1", "--target", "pdf", "--estimator", "mle"]);
    assert_eq!(no_x.status.code(), Some(2));
    let garbage = pareto_est(&["eval", "--data", "2,abc", "--k", "1", "--target", "alpha", "--estimator", "mle"]);
    assert!(!garbage.status.success());
    assert!(!garbage.stderr.is_empty());
}

#[test]
fn mse_collapse_value() {
    let o = pareto_est(&[
        "mse", "--n", "5", "--alpha", "1", "--k", "1", "--x", "1", "--estimator", "mle", "--target", "pdf", "--engine",
        "closed", "--format", "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let mse = v[0]["mse"].as_f64().unwrap();
    assert!((mse - 7.0 / 12.0).abs() < 1e-12, "{mse}");
}

#[test]
fn mse_engines_agree_at_collapse() {
    let run = |engine: &str| {
        let o = pareto_est(&[
            "mse", "--n", "6", "--alpha", "2", "--k", "0.5", "--estimator", "umvue", "--target", "pdf", "--engine", engine,
            "--format", "json",
        ]);
        assert!(o.status.success(), "{engine}: {}", String::from_utf8_lossy(&o.stderr));
        serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap()[0]["mse"].as_f64().unwrap()
    };
    let closed = run("closed");
    for engine in ["quadrature", "kummer"] {
        let v = run(engine);
        assert!(((v - closed) / closed).abs() < 1e-8, "{engine}: {v} vs {closed}");
    }
}

#[test]
fn mse_n2_moment_does_not_exist() {
    let o = pareto_est(&[
        "mse", "--n", "2", "--alpha", "1", "--k", "1", "--x", "1", "--estimator", "mle", "--target", "pdf", "--engine",
        "closed",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("does not exist"));
}

#[test]
fn mse_unsupported_combination_lists_valid_ones() {
    let o = pareto_est(&[
        "mse", "--n", "5", "--alpha", "1", "--k", "1", "--x", "2", "--estimator", "umvue", "--target", "cdf", "--engine",
        "bessel",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("kummer"), "{err}");
}

#[test]
fn mse_monte_carlo_is_repeatable() {
    let args = [
        "mse", "--n", "5", "--alpha", "1", "--k", "1", "--x", "1.3", "--estimator", "mle", "--target", "cdf", "--engine",
        "mc", "--reps", "20000", "--seed", "7", "--format", "csv",
    ];
    let a = pareto_est(&args);
    let b = pareto_est(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn mse_raw_moment() {
    let o = pareto_est(&[
        "mse", "--n", "5", "--alpha", "1", "--k", "1", "--x", "1", "--estimator", "mle", "--target", "pdf", "--engine",
        "closed", "--r", "1",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("moment")).expect("moment line");
    let v: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((v - 1.25).abs() < 1e-5, "{v}");
}

#[test]
fn adjudicate_shape_and_collapse_rows() {
    let path = tmp("adjudicate.csv");
    let o = pareto_est(&[
        "adjudicate", "--n", "6", "--alpha", "1", "--k", "1", "--x-grid", "1:0.5:3", "--out", path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_path(&path).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(str::to_owned).collect();
    assert_eq!(header.join(","), "n,alpha,k,x,estimator,target,closed,quadrature,exact_special,rel_dev,flag");
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 20);
    for r in rows.iter().filter(|r| r[3].parse::<f64>().unwrap() == 1.0) {
        let d: f64 = r[9].parse().unwrap();
        assert!(d <= 1e-8, "{r:?}");
        assert_eq!(&r[10], "ok");
    }
}

#[test]
fn table_csv_round_trips_and_plot_files_are_ordered() {
    let out = tmp("table.csv");
    let plots = tmp("plots");
    let o = pareto_est(&[
        "table", "--reps", "120", "--seed", "3", "--n-grid", "10,4,6", "--alpha-grid", "1", "--k-grid", "2", "--out",
        out.to_str().unwrap(), "--plot-dir", plots.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let text = std::fs::read_to_string(&out).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(str::to_owned).collect();
    assert!(header.iter().any(|h| h == "se_mle_pdf"));
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        rows += 1;
        for field in rec.iter().skip(3).take(8) {
            let v: f64 = field.parse().unwrap();
            // 17 significant digits: reformatting reproduces the same bits
            let again: f64 = format!("{v:.16e}").parse().unwrap();
            assert_eq!(v.to_bits(), again.to_bits());
            assert_eq!(format!("{v:.16e}"), field);
        }
    }
    assert_eq!(rows, 3);

    for target in ["pdf", "cdf"] {
        let tsv = std::fs::read_to_string(plots.join(format!("{target}_alpha1_k2.tsv"))).unwrap();
        let mut lines = tsv.lines();
        assert_eq!(lines.next(), Some("n\tmse_umvue\tmse_mle"));
        let ns: Vec<usize> = lines.map(|l| l.split('\t').next().unwrap().parse().unwrap()).collect();
        assert_eq!(ns.len(), 3);
        assert!(ns.windows(2).all(|w| w[0] < w[1]), "{ns:?}");
    }
}

#[test]
fn table_published_design_shape() {
    let o = pareto_est(&["table", "--paper-grid", "--reps", "100", "--seed", "1", "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 29 * 6);
    let mut pairs: Vec<(f64, f64)> =
        rows.iter().map(|r| (r["alpha"].as_f64().unwrap(), r["k"].as_f64().unwrap())).collect();
    pairs.dedup();
    assert_eq!(pairs.len(), 6);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(pareto_est(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(pareto_est(&["table", "--x", "1", "--x-min"]).status.code(), Some(2));
}
