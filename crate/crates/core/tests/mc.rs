use pareto_core::mc::brute_force_moment;
use pareto_core::oracle::mse_via_quadrature;
use pareto_core::{EstimatorKind, ParetoParams, QuadratureConfig};

#[test]
fn brute_force_agrees_with_quadrature() {
    let cfg = QuadratureConfig::default();
    let cells = [(5, 1.0, 1.0, 1.4), (8, 0.5, 0.5, 0.6), (12, 2.0, 0.5, 1.5)];
    let mut checked = 0;
    for (i, &(n, alpha, k, x)) in cells.iter().enumerate() {
        let p = ParetoParams::new(alpha, k).unwrap();
        for (j, kind) in EstimatorKind::POINTWISE.into_iter().enumerate() {
            let exact = mse_via_quadrature(kind, &p, n, x, &cfg).unwrap();
            let mc = brute_force_moment(kind, 1, &p, n, x, 200_000, 1000 + (4 * i + j) as u64).unwrap();
            let se = mc.std_error.unwrap();
            assert!((mc.mean - exact.mean).abs() <= 4.0 * se.mean, "{kind:?} n={n}: mean {} vs {}", mc.mean, exact.mean);
            assert!((mc.mse - exact.mse).abs() <= 4.0 * se.mse, "{kind:?} n={n}: mse {} vs {}", mc.mse, exact.mse);
            checked += 1;
        }
    }
    assert_eq!(checked, 12);
}

#[test]
fn cdf_at_k_is_exact() {
    let p = ParetoParams::new(1.5, 2.0).unwrap();
    for kind in [EstimatorKind::MLE_CDF, EstimatorKind::UMVUE_CDF] {
        let r = brute_force_moment(kind, 1, &p, 6, 2.0, 500, 9).unwrap();
        assert_eq!(r.mean, 0.0);
        assert_eq!(r.mse, 0.0);
    }
}
