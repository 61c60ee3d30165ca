use proptest::prelude::*;
use quasifix_core::{
    all_pairs, apriori_bound, linspace, picard_solve, search_scalar_coefficient, uniqueness_probe,
    verify_global, verify_orbital_commuting, verify_orbital_type, AlgebraElement, AsymmetricMetric,
    BoundMode, ContractionCertificate, Direction, MapSpec, MetricSpec, NormKind, Point, Regime,
    SearchTarget, SolveStatus, SolverConfig,
};

fn quarter() -> (MetricSpec, ContractionCertificate) {
    let metric = MetricSpec::mat2_split_scaled(0.25).unwrap();
    let a = AlgebraElement::diag(0.5, 0.5).unwrap();
    let pairs = all_pairs(&linspace(-10.0, 10.0, 21));
    let cert = verify_global(
        &MapSpec::LinearQuarter,
        &metric,
        &a,
        &pairs,
        Direction::Forward,
        1e-12,
    )
    .unwrap();
    (metric, cert)
}

#[test]
fn seed_one_reaches_zero_quickly() {
    let (metric, cert) = quarter();
    let r = picard_solve(
        &MapSpec::LinearQuarter,
        &metric,
        &Point::Real(1.0),
        &cert,
        &SolverConfig::default(),
    )
    .unwrap();
    assert_eq!(r.status, SolveStatus::Converged);
    assert!(r.iterations <= 20);
    assert!(r.fixed_point.as_real().unwrap().abs() <= 1e-10);
}

#[test]
fn piecewise_quarter_orbital_run() {
    let metric = MetricSpec::mat2_split();
    let s = 1.0 / 3.0_f64.sqrt();
    let a = AlgebraElement::diag(s, s).unwrap();
    let map = MapSpec::PiecewiseQuarter;
    let cert = verify_orbital_type(&map, &metric, &a, &Point::Real(1.0), 30, 1e-12).unwrap();
    assert!(cert.is_valid());
    let r = picard_solve(
        &map,
        &metric,
        &Point::Real(1.0),
        &cert,
        &SolverConfig::default(),
    )
    .unwrap();
    assert_eq!(r.status, SolveStatus::Converged);
    assert!(r.lsc.holds);
    assert!(r.fixed_point.as_real().unwrap().abs() <= 1e-10);
    assert!(r.backward_envelope.is_empty());
    assert!(r.envelope_holds(1e-10));
}

#[test]
fn apriori_bound_arithmetic() {
    let d1 = AlgebraElement::Scalar(0.75);
    let b = apriori_bound(
        &d1,
        std::f64::consts::FRAC_1_SQRT_2,
        4,
        BoundMode::SquaredCoefficient,
    )
    .unwrap();
    assert!((b - 3.0 / 32.0).abs() < 1e-15);
    let b0 = apriori_bound(&d1, 0.5, 0, BoundMode::SquaredCoefficient).unwrap();
    assert!((b0 - 0.75 / 0.75).abs() < 1e-15);
    for p in 0..20 {
        let bp = apriori_bound(&d1, 0.5, p, BoundMode::SquaredCoefficient).unwrap();
        let bq = apriori_bound(&d1, 0.5, p + 1, BoundMode::SquaredCoefficient).unwrap();
        assert!((bq / bp - 0.25).abs() < 1e-14);
    }
}

#[test]
fn single_seed_has_no_spread() {
    let (metric, cert) = quarter();
    let spread = uniqueness_probe(
        &MapSpec::LinearQuarter,
        &metric,
        &cert,
        &[Point::Real(2.0)],
        &SolverConfig::default(),
    )
    .unwrap();
    assert_eq!(spread, 0.0);
}

#[test]
fn reports_are_deterministic() {
    let (metric, cert) = quarter();
    let cfg = SolverConfig {
        record_trace: true,
        ..SolverConfig::default()
    };
    let run = || {
        let r = picard_solve(
            &MapSpec::LinearQuarter,
            &metric,
            &Point::Real(-3.0),
            &cert,
            &cfg,
        )
        .unwrap();
        serde_json::to_string(&r).unwrap()
    };
    assert_eq!(run(), run());
}

proptest! {
    /// Forward series pairs with `d(x₀, x₁)`, backward with `d(x₁, x₀)`;
    /// the bounds are computed here from `xₙ = s·4⁻ⁿ` directly.
    #[test]
    fn envelope_matches_geometric_oracle(s in -50.0..50.0f64) {
        prop_assume!(s.abs() > 1e-6);
        let (metric, cert) = quarter();
        let r = picard_solve(&MapSpec::LinearQuarter, &metric, &Point::Real(s), &cert, &SolverConfig::default())
            .unwrap();
        prop_assert_eq!(r.status, SolveStatus::Converged);
        prop_assert!(r.envelope_holds(1e-10));
        // ‖√d(x₀,x₁)‖² is the step 3|s|/4 (times β = 1/4 upward)
        let (fwd, bwd) = if s > 0.0 { (1.0, 0.25) } else { (0.25, 1.0) };
        for e in &r.forward_envelope {
            let oracle = fwd * 0.75 * s.abs() * 0.25_f64.powi(e.p as i32) / 0.75;
            prop_assert!((e.bound - oracle).abs() <= 1e-12 * (1.0 + oracle));
        }
        for e in &r.backward_envelope {
            let oracle = bwd * s.abs() * 0.25_f64.powi(e.p as i32);
            prop_assert!((e.bound - oracle).abs() <= 1e-12 * (1.0 + oracle));
        }
    }

    #[test]
    fn one_step_decay(s in -50.0..50.0f64, beta in 0.1..4.0f64) {
        let metric = MetricSpec::mat2_split_scaled(beta).unwrap();
        let pairs = all_pairs(&linspace(-50.0, 50.0, 11));
        let cert = search_scalar_coefficient(
            &MapSpec::LinearQuarter,
            &metric,
            Regime::ForwardGlobal,
            &SearchTarget::Pairs(pairs),
            1e-12,
        )
        .unwrap()
        .unwrap();
        let r2 = cert.a_operator_norm.powi(2);
        let cfg = SolverConfig { record_trace: true, ..SolverConfig::default() };
        let r = picard_solve(&MapSpec::LinearQuarter, &metric, &Point::Real(s), &cert, &cfg).unwrap();
        let steps = &r.trace.unwrap().steps;
        for w in steps.windows(2) {
            prop_assert!(w[1].backward_norm <= r2 * w[0].backward_norm + 1e-10);
            prop_assert!(w[1].forward_norm <= r2 * w[0].forward_norm + 1e-10);
        }
    }

    #[test]
    fn resolvent_rate_along_the_orbit(y in 1e-3..20.0f64, c in 0.2..0.5f64) {
        let metric = MetricSpec::scalar_backward_one();
        let a = AlgebraElement::Scalar(c);
        let cert = verify_orbital_commuting(&MapSpec::LinearQuarter, &metric, &a, &Point::Real(y), 30, 1e-12).unwrap();
        prop_assume!(cert.is_valid());
        let h = c / (1.0 - c);
        prop_assert!((cert.h_norm.unwrap() - h).abs() < 1e-14);
        prop_assume!(h < 1.0);
        let cfg = SolverConfig { record_trace: true, ..SolverConfig::default() };
        let r = picard_solve(&MapSpec::LinearQuarter, &metric, &Point::Real(y), &cert, &cfg).unwrap();
        prop_assert_eq!(r.status, SolveStatus::Converged);
        for w in r.trace.as_ref().unwrap().steps.windows(2) {
            prop_assert!(w[1].forward_norm <= h * w[0].forward_norm + 1e-10);
        }
        prop_assert!(r.envelope_holds(1e-10));
    }

    #[test]
    fn residual_below_tol_on_success(s in -10.0..10.0f64, tol in 1e-12..1e-4f64) {
        let (metric, cert) = quarter();
        let cfg = SolverConfig { tol, ..SolverConfig::default() };
        let r = picard_solve(&MapSpec::LinearQuarter, &metric, &Point::Real(s), &cert, &cfg).unwrap();
        prop_assert_eq!(r.status, SolveStatus::Converged);
        prop_assert!(r.residual_forward <= tol && r.residual_backward <= tol);
        let x = &r.fixed_point;
        let tx = Point::Real(x.as_real().unwrap() / 4.0);
        prop_assert_eq!(metric.distance(x, &tx).unwrap().norm(NormKind::Operator), r.residual_forward);
    }
}
