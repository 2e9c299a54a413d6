use pareto_core::exact::{
    closed_form_report, e_mle_cdf, e_mle_pdf, mle_alpha_moments, rth_moment_mle_cdf, rth_moment_mle_pdf,
    rth_moment_umvue_cdf, rth_moment_umvue_pdf, second_moment_mle_cdf, second_moment_mle_pdf, second_moment_umvue_cdf,
    second_moment_umvue_pdf,
};
use pareto_core::{EstimatorKind, ParetoParams};
use proptest::prelude::*;

fn fact(m: usize) -> f64 {
    (1..=m).map(|i| i as f64).product()
}

fn gamma_int(m: usize) -> f64 {
    fact(m - 1)
}

fn choose(m: usize, j: usize) -> f64 {
    fact(m) / (fact(j) * fact(m - j))
}

fn exp_partial(y: f64, m: usize) -> f64 {
    (0..=m).map(|i| y.powi(i as i32) / fact(i)).sum()
}

// Plain floating-point accumulation of the same series, term by term.
struct Naive {
    n: usize,
    alpha: f64,
    k: f64,
    x: f64,
}

impl Naive {
    fn neg_c(&self) -> f64 {
        (self.k / self.x).ln()
    }

    fn e_mle_pdf(&self) -> f64 {
        let (n, an, l) = (self.n, self.alpha * self.n as f64, self.neg_c());
        let s: f64 = (0..=n - 2).map(|j| an.powi(j as i32 + 1) / fact(j) * gamma_int(n - j - 1) * l.powi(j as i32)).sum();
        s / (gamma_int(n) * self.x)
    }

    fn second_mle_pdf(&self) -> f64 {
        let (n, an, l) = (self.n, self.alpha * self.n as f64, self.neg_c());
        let s: f64 = (0..=n - 3)
            .map(|j| (2.0 * l).powi(j as i32) / fact(j) * gamma_int(n - j - 2) * an.powi(j as i32 + 2))
            .sum();
        s / (gamma_int(n) * self.x * self.x)
    }

    fn mle_block(&self, m: f64) -> f64 {
        let (n, an, l) = (self.n, self.alpha * self.n as f64, self.neg_c());
        (0..n).map(|j| (m * an * l).powi(j as i32) / fact(j) * gamma_int(n - j)).sum::<f64>() / gamma_int(n)
    }

    fn e_mle_cdf(&self) -> f64 {
        1.0 - self.mle_block(1.0)
    }

    fn second_mle_cdf(&self) -> f64 {
        1.0 - 2.0 * self.mle_block(1.0) + self.mle_block(2.0)
    }

    fn second_umvue_pdf(&self) -> f64 {
        let (n, a, l) = (self.n, self.alpha, self.neg_c());
        let ac = -a * l;
        let s: f64 = (0..=n - 3)
            .map(|j| {
                choose(2 * n - 4, j) * a.powi(j as i32) * gamma_int(n - j - 2) * l.powi(j as i32) * exp_partial(ac, n - 3 - j)
            })
            .sum();
        (n as f64 - 1.0) * a * a * (-ac).exp() / (self.x * self.x * gamma_int(n - 1)) * s
    }

    fn second_umvue_cdf(&self) -> f64 {
        let (n, a, l) = (self.n, self.alpha, self.neg_c());
        let ac = -a * l;
        let s: f64 = (0..n)
            .map(|j| choose(2 * n - 2, j) * a.powi(j as i32) * gamma_int(n - j) * l.powi(j as i32) * exp_partial(ac, n - 1 - j))
            .sum();
        let q = (-ac).exp();
        1.0 - 2.0 * q + q * s / gamma_int(n)
    }
}

#[test]
fn log_domain_series_match_naive_accumulation() {
    let mut worst = 0.0f64;
    for n in 3..=20 {
        for alpha in [0.5, 1.0, 2.0] {
            for k in [0.5, 2.0] {
                for ratio in [1.0, 1.05, 1.3, 2.0] {
                    let x = k * ratio;
                    let p = ParetoParams::new(alpha, k).unwrap();
                    let nv = Naive { n, alpha, k, x };
                    let pairs = [
                        ("E f~", e_mle_pdf(&p, n, x).unwrap(), nv.e_mle_pdf()),
                        ("E f~^2", second_moment_mle_pdf(&p, n, x).unwrap(), nv.second_mle_pdf()),
                        ("E F~", e_mle_cdf(&p, n, x).unwrap(), nv.e_mle_cdf()),
                        ("E F~^2", second_moment_mle_cdf(&p, n, x).unwrap(), nv.second_mle_cdf()),
                        ("E f^^2", second_moment_umvue_pdf(&p, n, x).unwrap(), nv.second_umvue_pdf()),
                        ("E F^^2", second_moment_umvue_cdf(&p, n, x).unwrap(), nv.second_umvue_cdf()),
                    ];
                    for (name, lib, naive) in pairs {
                        let d = if lib == naive { 0.0 } else { (lib - naive).abs() / lib.abs().max(naive.abs()) };
                        worst = worst.max(d);
                        assert!(d <= 1e-9, "n={n} alpha={alpha} k={k} x={x} {name}: {lib:e} vs naive {naive:e}");
                    }
                }
            }
        }
    }
    eprintln!("largest relative difference {worst:.2e}");
}

#[test]
fn alpha_mse_strictly_decreasing() {
    for alpha in [0.1, 1.0, 3.0] {
        let mut prev = f64::INFINITY;
        for n in 3..=200 {
            let mse = mle_alpha_moments(n, alpha).unwrap().mse;
            assert!(mse > 0.0 && mse < prev, "n={n}: {mse} !< {prev}");
            prev = mse;
        }
    }
}

proptest! {
    #[test]
    fn reports_are_internally_consistent(n in 3usize..60, alpha in 0.2f64..4.0, k in 0.1f64..5.0, t in 0.0f64..3.0) {
        let p = ParetoParams::new(alpha, k).unwrap();
        let x = k * (1.0 + t);
        for kind in EstimatorKind::POINTWISE.into_iter().chain([EstimatorKind::MLE_ALPHA, EstimatorKind::UMVUE_ALPHA]) {
            let r = closed_form_report(kind, &p, n, x).unwrap();
            prop_assert!(r.is_consistent(1e-12), "{:?}", r);
        }
    }

    #[test]
    fn general_order_series_reduce(n in 3usize..40, alpha in 0.2f64..4.0, k in 0.1f64..5.0, t in 0.0f64..0.3) {
        let p = ParetoParams::new(alpha, k).unwrap();
        let x = k * (1.0 + t);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300);
        // distribution-function moments are differences of O(1) terms: as x → k they
        // shrink like F(x)², so agreement is only meaningful on the O(1) scale too
        let close_cdf = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()) + 1e-14;
        prop_assert!(close(rth_moment_mle_pdf(&p, n, x, 1).unwrap(), e_mle_pdf(&p, n, x).unwrap()));
        prop_assert!(close(rth_moment_mle_pdf(&p, n, x, 2).unwrap(), second_moment_mle_pdf(&p, n, x).unwrap()));
        prop_assert!(close_cdf(rth_moment_mle_cdf(&p, n, x, 1).unwrap(), e_mle_cdf(&p, n, x).unwrap()));
        prop_assert!(close_cdf(rth_moment_mle_cdf(&p, n, x, 2).unwrap(), second_moment_mle_cdf(&p, n, x).unwrap()));
        prop_assert!(close(rth_moment_umvue_pdf(&p, n, x, 2).unwrap(), second_moment_umvue_pdf(&p, n, x).unwrap()));
        prop_assert!(close_cdf(rth_moment_umvue_cdf(&p, n, x, 2).unwrap(), second_moment_umvue_cdf(&p, n, x).unwrap()));
    }
}
