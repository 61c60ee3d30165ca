use proptest::prelude::*;
use quasifix_core::{
    classify, limit_uniqueness_check, orbit, AsymmetricMetric, MapSpec, MetricSpec, Point, Verdict,
};

fn reals(xs: impl IntoIterator<Item = f64>) -> Vec<Point> {
    xs.into_iter().map(Point::Real).collect()
}

fn catalog() -> Vec<MetricSpec> {
    vec![
        MetricSpec::mat2_split(),
        MetricSpec::mat2_split_scaled(0.25).unwrap(),
        MetricSpec::periodic(2.0, 32).unwrap(),
        MetricSpec::scalar_forward_one(),
        MetricSpec::scalar_backward_one(),
    ]
}

#[test]
fn one_plus_one_over_n_forward_only() {
    let seq = reals((1..=200).map(|n| 1.0 + 1.0 / n as f64));
    let v = classify(
        &seq,
        &Point::Real(1.0),
        &MetricSpec::scalar_forward_one(),
        1e-2,
        100,
    )
    .unwrap();
    assert_eq!(v.forward, Verdict::Converges);
    assert_eq!(v.backward, Verdict::Diverges);
    assert_eq!(v.evidence.backward_tail_max, 1.0);
}

#[test]
fn geometric_orbit_tail_bound() {
    let seq = orbit(&MapSpec::LinearQuarter, &Point::Real(5.0), 40).unwrap();
    let window = 20;
    let v = classify(
        &seq,
        &Point::Real(0.0),
        &MetricSpec::mat2_split(),
        1e-9,
        window,
    )
    .unwrap();
    assert_eq!(
        (v.forward, v.backward),
        (Verdict::Converges, Verdict::Converges)
    );
    let start = seq.len() - window;
    assert!(v.evidence.forward_tail_max <= 0.25_f64.powi(start as i32) * 5.0 + 1e-300);
}

/// Cauchy scalar sequences converge in the periodic space, with
/// `‖d(x, xₙ)‖ ∨ ‖d(xₙ, x)‖ ≤ ε max{1, T}` once `|xₙ − x| ≤ ε`.
#[test]
fn periodic_space_completeness_bound() {
    for period in [0.5, 1.0, 3.0] {
        let m = MetricSpec::periodic(period, 64).unwrap();
        let limit = 0.7;
        let seq = reals((0..200).map(|n| limit + (-0.5_f64).powi(n)));
        let eps = 0.5_f64.powi(100);
        let bound = eps * period.max(1.0);
        let v = classify(&seq, &Point::Real(limit), &m, bound, 90).unwrap();
        assert_eq!(v.forward, Verdict::Converges, "T = {period}");
        assert_eq!(v.backward, Verdict::Converges);
        assert_eq!(v.forward_cauchy, Verdict::Converges);
        for p in &seq[110..] {
            let x = Point::Real(limit);
            let d = m
                .distance_norm(&x, p)
                .unwrap()
                .max(m.distance_norm(p, &x).unwrap());
            assert!(d <= bound);
        }
    }
}

#[test]
fn limits_agree_on_contractive_orbits() {
    // the scalar metrics charge 1 for moving the wrong way, so only the
    // matrix and periodic ones see both limits here
    for m in catalog().into_iter().take(3) {
        let seq = orbit(&MapSpec::LinearQuarter, &Point::Real(-3.0), 60).unwrap();
        let zero = Point::Real(0.0);
        assert!(
            limit_uniqueness_check(&seq, &zero, &zero, &m, 1e-12, 20).unwrap(),
            "{}",
            m.name()
        );
    }
}

proptest! {
    #[test]
    fn monotone_in_eps(xs in prop::collection::vec(-2.0..2.0f64, 5..40), eps in 1e-3..1.0f64, extra in 0.0..1.0f64) {
        let seq = reals(xs);
        let window = seq.len() / 2;
        for m in catalog() {
            let tight = classify(&seq, &Point::Real(0.0), &m, eps, window).unwrap();
            let loose = classify(&seq, &Point::Real(0.0), &m, eps + extra, window).unwrap();
            for (a, b) in [
                (tight.forward, loose.forward),
                (tight.backward, loose.backward),
                (tight.forward_cauchy, loose.forward_cauchy),
                (tight.backward_cauchy, loose.backward_cauchy),
            ] {
                prop_assert!(a != Verdict::Converges || b == Verdict::Converges);
            }
        }
    }

    #[test]
    fn dual_swaps_verdicts(xs in prop::collection::vec(-2.0..2.0f64, 5..40), c in -1.0..1.0f64, eps in 1e-3..1.0f64) {
        let seq = reals(xs);
        let window = seq.len() / 2;
        for m in catalog() {
            let v = classify(&seq, &Point::Real(c), &m, eps, window).unwrap();
            let d = classify(&seq, &Point::Real(c), &m.clone().dual(), eps, window).unwrap();
            prop_assert_eq!(v.forward, d.backward);
            prop_assert_eq!(v.backward, d.forward);
            prop_assert_eq!(v.forward_cauchy, d.backward_cauchy);
            prop_assert_eq!(v.backward_cauchy, d.forward_cauchy);
        }
    }

    #[test]
    fn forward_and_backward_limits_are_close(
        x in -2.0..2.0f64,
        seed in -3.0..3.0f64,
        ratio in 0.05..0.9f64,
        delta in -2e-3..2e-3f64,
    ) {
        let seq = reals((0..80).map(|n| x + (seed - x) * ratio.powi(n)));
        let eps = 1e-3;
        let (fx, by) = (Point::Real(x), Point::Real(x + delta));
        for m in catalog() {
            let f = classify(&seq, &fx, &m, eps / 2.0, 20).unwrap().forward;
            let b = classify(&seq, &by, &m, eps / 2.0, 20).unwrap().backward;
            if f == Verdict::Converges && b == Verdict::Converges {
                prop_assert!(limit_uniqueness_check(&seq, &fx, &by, &m, eps, 20).unwrap());
            }
        }
    }
}
