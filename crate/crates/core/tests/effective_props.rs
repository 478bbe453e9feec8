use esl_core::bands::InverseBand;
use esl_core::effective::{
    band_for_scheme, counting, coverage_momentum, ssf_bracket_with, toeplitz_vj_spectrum,
    SchemeOptions, SpectrumReport, SsfBracket, DEFAULT_COVERAGE,
};
use esl_core::fiber::FiberSpec;
use esl_core::potentials::PotentialModel;
use proptest::prelude::*;
use std::sync::OnceLock;

const R: f64 = 0.5;

fn band_one() -> &'static InverseBand {
    static BAND: OnceLock<InverseBand> = OnceLock::new();
    BAND.get_or_init(|| band_for_scheme(&FiberSpec::dirichlet(1.0), 1).unwrap())
}

fn radial() -> PotentialModel {
    PotentialModel::radial_power(1.0, 4.0)
}

fn run(lambda: f64, options: &SchemeOptions) -> (SsfBracket, SpectrumReport) {
    ssf_bracket_with(
        &radial(),
        &FiberSpec::dirichlet(1.0),
        band_one(),
        1,
        lambda,
        R,
        4.0,
        options,
    )
    .unwrap()
}

fn options(lambda: f64) -> SchemeOptions {
    SchemeOptions::new(
        20_000,
        coverage_momentum(&radial(), 1.0, lambda, R, DEFAULT_COVERAGE),
    )
}

fn counts(b: &SsfBracket) -> [usize; 4] {
    [
        b.counts_hi.n_plus,
        b.counts_lo.n_plus,
        b.counts_hi.n_minus,
        b.counts_lo.n_minus,
    ]
}

#[test]
fn below_threshold_the_matrix_is_nonpositive() {
    let (b, rep) = run(-1e-2, &options(1e-2));
    let peak = rep.eigenvalues[0].abs();
    assert!(rep.eigenvalues.iter().all(|&v| v <= 1e-10 * peak));
    assert_eq!(b.plus.lower, 0);
    assert_eq!(b.plus.upper, 0);
    assert!(b.minus.upper > 0);
    assert!(rep.eigenvalues.len() <= rep.nodes);
}

#[test]
fn above_threshold_both_signs_occur() {
    let (b, rep) = run(1e-2, &options(1e-2));
    assert!(rep.eigenvalues.iter().any(|&v| v > 0.0));
    assert!(rep.eigenvalues.iter().any(|&v| v < 0.0));
    assert!(b.plus.lower <= b.plus.upper && b.minus.lower <= b.minus.upper);
    assert_eq!(b.crossings.len(), 1);
}

#[test]
fn halving_the_excluded_window_moves_counts_by_at_most_one() {
    for lambda in [1e-2, 3e-3] {
        let o = options(lambda);
        let (a, _) = run(lambda, &o);
        let (b, _) = run(lambda, &o.with_epsilon_scale(0.5));
        assert!((b.epsilon - 0.5 * a.epsilon).abs() <= 1e-15);
        for (x, y) in counts(&a).iter().zip(counts(&b)) {
            assert!(
                x.abs_diff(y) <= 1,
                "lambda={lambda}: {:?} vs {:?}",
                counts(&a),
                counts(&b)
            );
        }
    }
}

#[test]
fn doubling_the_quadrature_keeps_counts() {
    for lambda in [1e-2, -1e-2_f64] {
        let o = options(lambda.abs());
        let (a, _) = run(lambda, &o);
        let (b, _) = run(lambda, &o.refined(2.0));
        assert!(b.nodes > a.nodes);
        for (x, y) in counts(&a).iter().zip(counts(&b)) {
            let allowed = if *x < 50 {
                1
            } else {
                (0.02 * *x as f64).floor() as usize
            };
            assert!(
                x.abs_diff(y) <= allowed,
                "lambda={lambda}: {:?} vs {:?}",
                counts(&a),
                counts(&b)
            );
        }
    }
}

#[test]
fn toeplitz_operator_is_positive_with_bounded_rank() {
    let p = radial();
    let n = 81;
    let rep = toeplitz_vj_spectrum(&p, 1, 1.0, (-10.0, 10.0), n).unwrap();
    let peak = rep.eigenvalues[0].abs();
    assert!(rep.eigenvalues.iter().all(|&v| v >= -1e-10 * peak));
    assert!(rep.eigenvalues.len() <= n);
    let trace: f64 = rep.eigenvalues.iter().sum();
    assert!((trace - rep.trace_norm).abs() <= 1e-9 * trace);
    // a scaled potential scales the operator
    let doubled = toeplitz_vj_spectrum(
        &PotentialModel::radial_power(2.0, 4.0),
        1,
        1.0,
        (-10.0, 10.0),
        n,
    )
    .unwrap();
    assert!((doubled.eigenvalues[0] - 2.0 * rep.eigenvalues[0]).abs() <= 1e-10 * peak);
}

fn report(values: Vec<f64>) -> SpectrumReport {
    SpectrumReport {
        trace_norm: values.iter().map(|v| v.abs()).sum(),
        nodes: values.len(),
        eigenvalues: values,
        lambda: None,
        epsilon: 0.0,
        grid_points: 0,
        dropped: 0,
    }
}

proptest! {
    #[test]
    fn counts_shrink_as_the_threshold_grows(values in prop::collection::vec(-5.0..5.0f64, 0..60), s in 0.01..4.0f64, t in 0.01..4.0f64) {
        let rep = report(values);
        let (lo, hi) = if s < t { (s, t) } else { (t, s) };
        let a = counting(&rep, lo);
        let b = counting(&rep, hi);
        prop_assert!(b.n_plus <= a.n_plus && b.n_minus <= a.n_minus);
        prop_assert!(a.n_plus + a.n_minus <= rep.eigenvalues.len());
    }
}
