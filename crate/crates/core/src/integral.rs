//! The rank-one integral operator `(Tf)(x) = α x ∫₀¹ f(y)/(y² + k) dy` on
//! sampled functions over `(0, 1]`, its multiplication-operator metric, and
//! a regime analysis of `(α, k)`.
//!
//! Integrals use Lebesgue measure by default ([`Quadrature::Trapezoid`]);
//! [`Quadrature::MidpointLog`] integrates against `dt/t` instead.

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, Grid, NormKind, SampledFn};
use crate::contraction::verify_orbital_type;
use crate::error::{Error, Result};
use crate::map::{MapSpec, SelfMap};
use crate::metric::{MetricSpec, Point};
use crate::solver::{picard_solve, SolveStatus, SolverConfig};

/// Orbit length used for the monotonicity flags and the demo certificate.
pub const ORBIT_STEPS: usize = 30;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quadrature {
    /// Composite trapezoid in `dy`; the panel `[0, x₁]` is closed by linear
    /// extrapolation, and `[xₘ, 1]` likewise when the grid stops short of 1.
    #[default]
    Trapezoid,
    /// Midpoint rule in `u = ln t`, i.e. against `dt/t`, over the cells
    /// around the samples. Truncated below the first cell.
    MidpointLog,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegralProblem {
    pub alpha: f64,
    pub k: f64,
    pub grid: Grid,
    pub quadrature: Quadrature,
    pub f0: SampledFn,
    weights: Vec<f64>,
}

impl IntegralProblem {
    /// `f0` defaults to `x ↦ x`.
    pub fn new(alpha: f64, k: f64, grid: Grid, quadrature: Quadrature) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidConfig(format!("k must be positive, got {k}")));
        }
        let pts = grid.points();
        if pts[0] <= 0.0 || pts[pts.len() - 1] > 1.0 {
            return Err(Error::InvalidConfig("grid must lie in (0, 1]".into()));
        }
        let weights = quadrature_weights(&grid, quadrature);
        let f0 = SampledFn::from_fn(&grid, |x| x)?;
        Ok(Self {
            alpha,
            k,
            grid,
            quadrature,
            f0,
            weights,
        })
    }

    /// Grid `i/n`, `i = 1..n`.
    pub fn uniform(alpha: f64, k: f64, n: usize, quadrature: Quadrature) -> Result<Self> {
        Self::new(alpha, k, Grid::unit_interval(n)?, quadrature)
    }

    pub fn with_f0(mut self, f0: SampledFn) -> Result<Self> {
        if !f0.grid().same_as(&self.grid) {
            return Err(Error::GridMismatch);
        }
        self.f0 = f0;
        Ok(self)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Q(g)` for samples `g` on the grid, summed in grid order.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// `Q(y ↦ g(y))` for a closed-form integrand.
    pub fn integrate_fn(&self, g: impl Fn(f64) -> f64) -> f64 {
        let vals: Vec<f64> = self.grid.points().iter().map(|&y| g(y)).collect();
        self.integrate(&vals)
    }

    pub fn apply(&self, f: &SampledFn) -> Result<SampledFn> {
        if !f.grid().same_as(&self.grid) {
            return Err(Error::GridMismatch);
        }
        let k = self.k;
        let q = self.integrate_fn_sampled(f, |y, v| v / (y * y + k));
        let alpha = self.alpha;
        SampledFn::from_fn(&self.grid, |x| alpha * x * q)
    }

    fn integrate_fn_sampled(&self, f: &SampledFn, g: impl Fn(f64, f64) -> f64) -> f64 {
        let vals: Vec<f64> = self
            .grid
            .points()
            .iter()
            .zip(f.values())
            .map(|(&y, &v)| g(y, v))
            .collect();
        self.integrate(&vals)
    }

    /// `α · arctan(1/√k)/√k`, the Lipschitz constant of `T` in the sup norm.
    pub fn lambda(&self) -> f64 {
        let s = self.k.sqrt();
        self.alpha * (1.0 / s).atan() / s
    }

    /// `α Q(1/(y² + k))`, the discretized counterpart of [`Self::lambda`].
    pub fn lambda_discrete(&self) -> f64 {
        let k = self.k;
        self.alpha * self.integrate_fn(|y| 1.0 / (y * y + k))
    }

    /// `(α/2) ln(1/k + 1)`: `T f₀ = growth · f₀` for `f₀(x) = x`.
    pub fn growth(&self) -> f64 {
        0.5 * self.alpha * (1.0 / self.k + 1.0).ln()
    }

    /// `growth > 1` iff `k` is below this.
    pub fn growth_threshold_k(&self) -> f64 {
        1.0 / ((0.5 * self.alpha).exp() - 1.0)
    }

    /// `α/k`, a cruder Lipschitz bound.
    pub fn lambda_loose(&self) -> f64 {
        self.alpha / self.k
    }

    /// `α e^{α/2} − α − 1`.
    pub fn feasibility(&self) -> f64 {
        self.alpha * (0.5 * self.alpha).exp() - self.alpha - 1.0
    }
}

/// `T f` for `f` on `prob.grid`.
pub fn apply_t(f: &SampledFn, prob: &IntegralProblem) -> Result<SampledFn> {
    prob.apply(f)
}

pub fn quadrature_weights(grid: &Grid, quadrature: Quadrature) -> Vec<f64> {
    let x = grid.points();
    let m = x.len();
    let mut w = vec![0.0; m];
    match quadrature {
        Quadrature::Trapezoid => {
            for i in 0..m - 1 {
                let h = x[i + 1] - x[i];
                w[i] += h / 2.0;
                w[i + 1] += h / 2.0;
            }
            // [0, x₁] with g(0) ≈ g₁ − s (g₂ − g₁)
            let s = x[0] / (x[1] - x[0]);
            w[0] += x[0] * (2.0 + s) / 2.0;
            w[1] -= x[0] * s / 2.0;
            let tail = 1.0 - x[m - 1];
            if tail > 0.0 {
                let r = tail / (x[m - 1] - x[m - 2]);
                w[m - 1] += tail * (2.0 + r) / 2.0;
                w[m - 2] -= tail * r / 2.0;
            }
        }
        Quadrature::MidpointLog => {
            let u: Vec<f64> = x.iter().map(|t| t.ln()).collect();
            let mut lower = u[0] - (u[1] - u[0]) / 2.0;
            for i in 0..m {
                let upper = if i + 1 < m {
                    (u[i] + u[i + 1]) / 2.0
                } else {
                    0.0
                };
                w[i] = upper - lower;
                lower = upper;
            }
        }
    }
    w
}

/// `d(f, g)` as the sampled function `½(f−g)` where `f > g`, `g−f` where
/// `g > f`, and `0` on ties. Its multiplication-operator norm is the sup.
pub fn mult_op_distance(f: &SampledFn, g: &SampledFn) -> Result<AlgebraElement> {
    if !f.grid().same_as(g.grid()) {
        return Err(Error::GridMismatch);
    }
    Ok(AlgebraElement::Sampled(f.zip_with(g, |a, b| {
        if a > b {
            0.5 * (a - b)
        } else if b > a {
            b - a
        } else {
            0.0
        }
    })))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DemoRegime {
    /// `λ < 1`.
    Contractive,
    /// `λ < 1` and `growth > 1`. Not attainable since `λ ≥ growth`.
    GrowingContractive,
    /// `growth > 1` but `λ ≥ 1`: orbits from `f₀` grow, and `T` is no
    /// contraction in the sup norm.
    Inconsistent,
    /// `λ ≥ 1` and `growth ≤ 1`.
    NotContractive,
}

impl DemoRegime {
    pub fn classify(lambda: f64, growth: f64) -> Self {
        match (lambda < 1.0, growth > 1.0) {
            (true, true) => DemoRegime::GrowingContractive,
            (true, false) => DemoRegime::Contractive,
            (false, true) => DemoRegime::Inconsistent,
            (false, false) => DemoRegime::NotContractive,
        }
    }

    pub fn is_contractive(self) -> bool {
        matches!(
            self,
            DemoRegime::Contractive | DemoRegime::GrowingContractive
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DemoSolve {
    pub status: SolveStatus,
    pub iterations: usize,
    pub residual_forward: f64,
    pub residual_backward: f64,
    /// `sup |f* − T f*|` over the grid.
    pub equation_residual: f64,
    pub equation_ok: bool,
    /// `c` in the certificate `a = c · 1`.
    pub certificate_coefficient: f64,
    pub fixed_point_sup: f64,
    #[serde(skip)]
    pub fixed_point: SampledFn,
}

impl DemoSolve {
    /// Two columns `x, f*(x)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,f*(x)\n");
        for (x, v) in self
            .fixed_point
            .grid()
            .points()
            .iter()
            .zip(self.fixed_point.values())
        {
            out.push_str(&format!("{x},{v}\n"));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DemoReport {
    pub alpha: f64,
    pub k: f64,
    pub grid_size: usize,
    pub quadrature: Quadrature,
    pub lambda: f64,
    pub lambda_discrete: f64,
    pub lambda_loose: f64,
    pub growth: f64,
    pub growth_threshold_k: f64,
    pub feasibility: f64,
    /// `|Q(y/(y²+k)) − ½ ln(1 + 1/k)|`
    pub quad_error_log: f64,
    /// `|Q(1/(y²+k)) − arctan(1/√k)/√k|`
    pub quad_error_arctan: f64,
    /// `max |(T f₀)(xᵢ) − growth · xᵢ|` for `f₀(x) = x`.
    pub tf0_closed_form_error: f64,
    pub tf0_exceeds_f0: bool,
    /// `Tⁿ⁺¹f₀ > Tⁿf₀` pointwise for every `n ≤ monotone_steps`.
    pub orbit_increasing: bool,
    pub monotone_steps: usize,
    /// `‖d(Tⁿf₀, Tⁿ⁺¹f₀)‖ ≤ λⁿ ‖d(f₀, Tf₀)‖ + tol` for `n ≤ 30`; only
    /// evaluated when `λ < 1`.
    pub contraction_evidence: Option<bool>,
    pub regime: DemoRegime,
    pub solve: Option<DemoSolve>,
}

fn strictly_above(a: &SampledFn, b: &SampledFn) -> bool {
    a.values().iter().zip(b.values()).all(|(x, y)| x > y)
}

/// Closed-form checks, monotonicity flags, and the regime of `(α, k)`.
pub fn regime_report(prob: &IntegralProblem) -> Result<DemoReport> {
    let k = prob.k;
    let lambda = prob.lambda();
    let growth = prob.growth();
    let s = k.sqrt();
    let quad_error_log =
        (prob.integrate_fn(|y| y / (y * y + k)) - 0.5 * (1.0 + 1.0 / k).ln()).abs();
    let quad_error_arctan = (prob.integrate_fn(|y| 1.0 / (y * y + k)) - (1.0 / s).atan() / s).abs();

    let identity = SampledFn::from_fn(&prob.grid, |x| x)?;
    let t_id = prob.apply(&identity)?;
    let tf0_closed_form_error = prob
        .grid
        .points()
        .iter()
        .zip(t_id.values())
        .map(|(x, v)| (v - growth * x).abs())
        .fold(0.0, f64::max);

    let mut orbit = vec![prob.f0.clone()];
    for n in 0..=ORBIT_STEPS {
        let next = prob.apply(&orbit[n])?;
        orbit.push(next);
    }
    let tf0_exceeds_f0 = strictly_above(&orbit[1], &orbit[0]);
    let monotone_steps = 10;
    let orbit_increasing = (0..=monotone_steps).all(|n| strictly_above(&orbit[n + 1], &orbit[n]));

    let contraction_evidence = if lambda < 1.0 {
        let d = |n: usize| -> Result<f64> {
            Ok(mult_op_distance(&orbit[n], &orbit[n + 1])?.norm(NormKind::Operator))
        };
        let d0 = d(0)?;
        let tol = crate::algebra::DEFAULT_TOL;
        let mut ok = true;
        for n in 0..=ORBIT_STEPS {
            ok &= d(n)? <= lambda.powi(n as i32) * d0 + tol;
        }
        Some(ok)
    } else {
        None
    };

    Ok(DemoReport {
        alpha: prob.alpha,
        k,
        grid_size: prob.grid.len(),
        quadrature: prob.quadrature,
        lambda,
        lambda_discrete: prob.lambda_discrete(),
        lambda_loose: prob.lambda_loose(),
        growth,
        growth_threshold_k: prob.growth_threshold_k(),
        feasibility: prob.feasibility(),
        quad_error_log,
        quad_error_arctan,
        tf0_closed_form_error,
        tf0_exceeds_f0,
        orbit_increasing,
        monotone_steps,
        contraction_evidence,
        regime: DemoRegime::classify(lambda, growth),
        solve: None,
    })
}

/// Certifies `T` along the orbit of `f₀` with `a = √λ_Q · 1`, solves by
/// Picard iteration, and checks the discretized equation `f* = T f*`.
pub fn run_demo(prob: &IntegralProblem, cfg: &SolverConfig) -> Result<DemoReport> {
    let mut report = regime_report(prob)?;
    let rate = prob.lambda().max(prob.lambda_discrete());
    if rate >= 1.0 {
        return Err(Error::NotContractive {
            lambda: report.lambda,
        });
    }

    let map = MapSpec::IntegralOp(prob.clone());
    let metric = MetricSpec::mult_op(prob.grid.clone());
    let c = rate.sqrt();
    let a = AlgebraElement::Sampled(SampledFn::constant(&prob.grid, c)?);
    let seed = Point::Func(prob.f0.clone());
    let cert = verify_orbital_type(&map, &metric, &a, &seed, ORBIT_STEPS, cfg.tol)?;
    if !cert.is_valid() {
        return Err(Error::CertificateInvalid(format!(
            "{} violations along the orbit of f0",
            cert.violations.len()
        )));
    }

    let solved = picard_solve(&map, &metric, &seed, &cert, cfg)?;
    let Point::Func(fixed) = solved.fixed_point else {
        return Err(Error::DomainMismatch {
            context: map.name(),
            detail: "solver returned a real point".into(),
        });
    };
    let tf = prob.apply(&fixed)?;
    let equation_residual = fixed
        .values()
        .iter()
        .zip(tf.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    report.solve = Some(DemoSolve {
        status: solved.status,
        iterations: solved.iterations,
        residual_forward: solved.residual_forward,
        residual_backward: solved.residual_backward,
        equation_residual,
        equation_ok: equation_residual <= cfg.tol && solved.status == SolveStatus::Converged,
        certificate_coefficient: c,
        fixed_point_sup: fixed.sup_norm(),
        fixed_point: fixed,
    });
    Ok(report)
}
