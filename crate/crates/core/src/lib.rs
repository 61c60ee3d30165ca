//! Fixed points of self-maps on asymmetric metric spaces whose distances
//! take values in a C*-algebra.
//!
//! The algebra is realized concretely: real 2×2 matrices, functions sampled
//! on a grid, or plain scalars. On top of that sit metric-axiom checks,
//! forward/backward convergence tests, contraction certificates, a Picard
//! solver with a-priori error bounds, and a discretized integral equation.

pub mod algebra;
pub mod contraction;
pub mod convergence;
pub mod error;
pub mod integral;
pub mod map;
pub mod metric;
pub mod solver;

pub use algebra::{AlgebraElement, Grid, Mat2, NormKind, OrderKind, SampledFn, DEFAULT_TOL};
pub use contraction::{
    all_pairs, search_scalar_coefficient, verify_certificate, verify_global,
    verify_orbital_commuting, verify_orbital_type, ContractionCertificate, Direction, Regime,
    SearchTarget,
};
pub use convergence::{
    classify, limit_uniqueness_check, orbital_lsc_check, ConvergenceVerdict, LscCheck,
    SequenceTrace, Verdict,
};
pub use error::{Error, Result};
pub use integral::{
    apply_t, mult_op_distance, regime_report, run_demo, DemoRegime, DemoReport, IntegralProblem,
    Quadrature,
};
pub use map::{orbit, FnMap, MapSpec, SelfMap};
pub use metric::{
    check_axioms, linspace, AsymmetricMetric, AxiomReport, MetricKind, MetricSpec, Point,
};
pub use solver::{
    apriori_bound, picard_solve, uniqueness_probe, BoundMode, SolveStatus, SolverConfig,
    SolverReport,
};
