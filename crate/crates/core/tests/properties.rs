use mixcs::ensembles::{mixed_measurement, sample_mixed_adjacency, subsample_rows, MixedGraphModel};
use mixcs::experiments::relative_frobenius_error;
use mixcs::linalg::norm1;
use mixcs::rip::delta_exhaustive;
use mixcs::solver::{basis_pursuit, DEFAULT_MAX_ITER};
use mixcs::experiments::Ensemble;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn leading_rows_match_adjacency(vertices in 4usize..40, frac in 0.1f64..1.0, seed in any::<u64>()) {
        let n = ((vertices as f64 * frac).ceil() as usize).clamp(1, vertices);
        let model = MixedGraphModel::default_mixed(vertices);
        let a = sample_mixed_adjacency(&model, seed).unwrap();
        let theta: Vec<usize> = (0..n).collect();
        let sub = subsample_rows(&a, &theta, true).unwrap();
        let direct = mixed_measurement(&model, n, seed).unwrap();
        prop_assert_eq!(sub.entries(), direct.entries());
    }

    #[test]
    fn delta_grows_with_k(seed in any::<u64>()) {
        let phi = Ensemble::Gaussian.measurement(6, 9, seed).unwrap();
        let mut last = 0.0;
        for k in 1..=4 {
            let d = delta_exhaustive(&phi, k).unwrap().delta;
            prop_assert!(d >= last - 1e-12, "k={} delta {} < {}", k, d, last);
            last = d;
        }
    }

    #[test]
    fn objective_is_l1_norm(seed in any::<u64>(), y in prop::collection::vec(-3.0f64..3.0, 8)) {
        let phi = Ensemble::Gaussian.measurement(8, 20, seed).unwrap();
        let r = basis_pursuit(&phi, &y, 1e-8, DEFAULT_MAX_ITER).unwrap();
        prop_assert!((r.objective - norm1(&r.x_star)).abs() <= 1e-12 * r.objective.max(1.0));
    }

    #[test]
    fn frobenius_error_is_scale_free(
        pairs in prop::collection::vec((-10.0f64..10.0, 0.5f64..10.0), 1..30),
        c in 0.01f64..100.0,
    ) {
        let (x, m): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let e = relative_frobenius_error(&x, &m).unwrap();
        let xs: Vec<f64> = x.iter().map(|v| v * c).collect();
        let ms: Vec<f64> = m.iter().map(|v| v * c).collect();
        let es = relative_frobenius_error(&xs, &ms).unwrap();
        prop_assert!((e - es).abs() <= 1e-12 * e.max(1.0));
    }
}
