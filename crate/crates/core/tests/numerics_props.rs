use esl_core::numerics::{
    composite_gauss_legendre, hermite_phi, jacobi_eigs, sturm_count, sym_eigenvalues, tridiag_eigs,
    SymMatrix, TriDiag,
};
use proptest::prelude::*;

fn tridiag() -> impl Strategy<Value = TriDiag> {
    (2usize..40).prop_flat_map(|n| {
        (
            prop::collection::vec(-10.0..10.0f64, n),
            prop::collection::vec(-3.0..3.0f64, n - 1),
        )
            .prop_map(|(d, e)| TriDiag::new(d, e).unwrap())
    })
}

fn symmetric() -> impl Strategy<Value = SymMatrix> {
    (1usize..24).prop_flat_map(|n| {
        prop::collection::vec(-5.0..5.0f64, n * n)
            .prop_map(move |raw| SymMatrix::from_lower(n, |i, j| raw[i * n + j]))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sturm_count_is_monotone_and_saturates(t in tridiag(), xs in prop::collection::vec(-30.0..30.0f64, 2..12)) {
        let mut xs = xs;
        xs.sort_by(f64::total_cmp);
        let counts: Vec<usize> = xs.iter().map(|&x| sturm_count(&t, x)).collect();
        prop_assert!(counts.windows(2).all(|w| w[0] <= w[1]));
        let (_, hi) = t.gershgorin();
        prop_assert_eq!(sturm_count(&t, hi + 1.0), t.len());
    }

    #[test]
    fn tridiag_eigs_are_ascending_and_bracketed(t in tridiag()) {
        let values = tridiag_eigs(&t, t.len()).unwrap();
        prop_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        for (i, &v) in values.iter().enumerate() {
            let delta = 1e-9 * (1.0 + v.abs());
            // a cluster of equal values shares the lower count
            let below = sturm_count(&t, v - delta);
            prop_assert!(below <= i, "index {i}: count below {below}");
            prop_assert!(sturm_count(&t, v + delta) > i);
        }
        let trace: f64 = t.diag().iter().sum();
        let sum: f64 = values.iter().sum();
        prop_assert!((trace - sum).abs() <= 1e-9 * (1.0 + trace.abs()));
    }

    #[test]
    fn jacobi_vectors_are_orthonormal_and_trace_is_kept(s in symmetric()) {
        let eig = jacobi_eigs(&s).unwrap();
        let n = s.order();
        for a in 0..n {
            for b in 0..n {
                let dot: f64 = (0..n).map(|i| eig.vectors.get(i, a) * eig.vectors.get(i, b)).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                prop_assert!((dot - target).abs() <= 1e-12, "({a},{b}) {dot}");
            }
        }
        let sum: f64 = eig.values.iter().sum();
        let scale = eig.values.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        prop_assert!((sum - s.trace()).abs() <= 1e-10 * scale);
    }

    #[test]
    fn dense_solvers_agree(s in symmetric()) {
        let jac = jacobi_eigs(&s).unwrap().values;
        let ql = sym_eigenvalues(&s).unwrap();
        let scale = jac.iter().map(|v| v.abs()).fold(1.0, f64::max);
        for (a, b) in jac.iter().zip(&ql) {
            prop_assert!((a - b).abs() <= 1e-11 * scale);
        }
    }
}

#[test]
fn hermite_functions_solve_the_oscillator() {
    let h = 1e-3;
    for j in 1..=6 {
        let e = (2 * j - 1) as f64;
        for i in 0..=120 {
            let x = -6.0 + 0.1 * i as f64;
            let f = |t: f64| hermite_phi(j, t);
            let d2 = (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h)
                - f(x - 2.0 * h))
                / (12.0 * h * h);
            let residual = -d2 + x * x * f(x) - e * f(x);
            assert!(residual.abs() <= 1e-6, "j={j} x={x}: {residual}");
        }
    }
}

#[test]
fn hermite_functions_are_orthonormal() {
    let edges: Vec<f64> = (0..=48).map(|i| -12.0 + 0.5 * i as f64).collect();
    let rule = composite_gauss_legendre(12, &edges);
    for a in 1..=6 {
        for b in 1..=6 {
            let v = rule.integrate(|x| hermite_phi(a, x) * hermite_phi(b, x));
            if a == b {
                assert!((v - 1.0).abs() <= 1e-10, "norm {a}: {v}");
            } else {
                assert!(v.abs() <= 1e-10, "({a},{b}): {v}");
            }
        }
    }
}
