//! Criterion benchmarks for the hot kernels of `quasifix-core`; see `benches/`.
//!
//! Shared setup lives here so the bench bodies time only the kernel.

use quasifix_core::{
    all_pairs, linspace, verify_global, AlgebraElement, ContractionCertificate, Direction,
    IntegralProblem, MapSpec, MetricSpec, Quadrature,
};

/// A forward certificate for `x ↦ x/4` under the scaled split metric.
pub fn quarter_certificate() -> (MetricSpec, ContractionCertificate) {
    let metric = MetricSpec::mat2_split_scaled(0.25).expect("beta is positive");
    let a = AlgebraElement::diag(0.5, 0.5).expect("finite");
    let pairs = all_pairs(&linspace(-10.0, 10.0, 21));
    let cert = verify_global(
        &MapSpec::LinearQuarter,
        &metric,
        &a,
        &pairs,
        Direction::Forward,
        1e-12,
    )
    .expect("certificate check runs");
    (metric, cert)
}

pub fn integral_problem(n: usize) -> IntegralProblem {
    IntegralProblem::uniform(0.5, 4.0, n, Quadrature::Trapezoid).expect("valid parameters")
}
