//! Algebra-valued asymmetric metrics and an empirical axiom checker.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, Grid, NormKind, OrderKind, SampledFn};
use crate::error::{Error, Result};
use crate::integral::mult_op_distance;

/// A point of the underlying set: a real number or a sampled function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Real(f64),
    Func(SampledFn),
}

impl Point {
    pub fn as_real(&self) -> Option<f64> {
        match self {
            Point::Real(x) => Some(*x),
            Point::Func(_) => None,
        }
    }

    pub fn as_func(&self) -> Option<&SampledFn> {
        match self {
            Point::Func(f) => Some(f),
            Point::Real(_) => None,
        }
    }

    /// One number summarizing the point: the value itself, or the sup norm.
    pub fn summary(&self) -> f64 {
        match self {
            Point::Real(x) => *x,
            Point::Func(f) => f.sup_norm(),
        }
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point::Real(x)
    }
}

impl From<SampledFn> for Point {
    fn from(f: SampledFn) -> Self {
        Point::Func(f)
    }
}

/// `d: X × X → 𝔸` together with the order and norm it is read in.
pub trait AsymmetricMetric: Sync {
    fn name(&self) -> String;

    fn distance(&self, x: &Point, y: &Point) -> Result<AlgebraElement>;

    fn order(&self) -> OrderKind;

    fn norm_kind(&self) -> NormKind;

    fn distance_norm(&self, x: &Point, y: &Point) -> Result<f64> {
        Ok(self.distance(x, y)?.norm(self.norm_kind()))
    }
}

impl<M: AsymmetricMetric + ?Sized> AsymmetricMetric for &M {
    fn name(&self) -> String {
        (**self).name()
    }

    fn distance(&self, x: &Point, y: &Point) -> Result<AlgebraElement> {
        (**self).distance(x, y)
    }

    fn order(&self) -> OrderKind {
        (**self).order()
    }

    fn norm_kind(&self) -> NormKind {
        (**self).norm_kind()
    }
}

/// The built-in metrics.
#[derive(Clone, Debug, PartialEq)]
pub enum MetricKind {
    /// `diag(x−y, 0)` if `x ≥ y`, else `diag(0, y−x)`.
    Mat2Split,
    /// As `Mat2Split` with the lower-right block scaled: `diag(0, β(y−x))`.
    Mat2SplitScaled { beta: f64 },
    /// `t ↦ (x−y)t` if `x ≥ y`, `t ↦ (y−x)(T−t)/T` otherwise, sampled on `[0, T)`.
    PeriodicFn { period: f64, grid: Grid },
    /// `y − x` if `y ≥ x`, else 1.
    ScalarForwardOne,
    /// `x − y` if `x ≥ y`, else 1.
    ScalarBackwardOne,
    /// Multiplication-operator metric on functions over `grid`.
    MultOp { grid: Grid },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricSpec {
    pub kind: MetricKind,
    pub order: OrderKind,
    pub norm: NormKind,
    /// Evaluate `d(y, x)` instead of `d(x, y)`.
    pub dual: bool,
}

impl MetricSpec {
    pub fn new(kind: MetricKind) -> Self {
        Self {
            kind,
            order: OrderKind::PositiveCone,
            norm: NormKind::Operator,
            dual: false,
        }
    }

    pub fn mat2_split() -> Self {
        Self::new(MetricKind::Mat2Split)
    }

    pub fn mat2_split_scaled(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "beta must be positive, got {beta}"
            )));
        }
        Ok(Self::new(MetricKind::Mat2SplitScaled { beta }))
    }

    pub fn periodic(period: f64, samples: usize) -> Result<Self> {
        let grid = Grid::period(period, samples)?;
        Ok(Self::new(MetricKind::PeriodicFn { period, grid }))
    }

    pub fn scalar_forward_one() -> Self {
        Self::new(MetricKind::ScalarForwardOne)
    }

    pub fn scalar_backward_one() -> Self {
        Self::new(MetricKind::ScalarBackwardOne)
    }

    pub fn mult_op(grid: Grid) -> Self {
        Self::new(MetricKind::MultOp { grid })
    }

    pub fn with_norm(mut self, norm: NormKind) -> Self {
        self.norm = norm;
        self
    }

    pub fn with_order(mut self, order: OrderKind) -> Self {
        self.order = order;
        self
    }

    /// The conjugate metric `(x, y) ↦ d(y, x)`.
    pub fn dual(mut self) -> Self {
        self.dual = !self.dual;
        self
    }

    fn real(&self, p: &Point) -> Result<f64> {
        match p {
            Point::Real(x) if x.is_finite() => Ok(*x),
            Point::Real(x) => Err(self.domain_error(format!("non-finite point {x}"))),
            Point::Func(_) => {
                Err(self.domain_error("expected a real point, got a function".into()))
            }
        }
    }

    fn func<'a>(&self, p: &'a Point, grid: &Grid) -> Result<&'a SampledFn> {
        match p {
            Point::Func(f) if f.grid().same_as(grid) => Ok(f),
            Point::Func(_) => Err(self.domain_error("function sampled on a different grid".into())),
            Point::Real(_) => {
                Err(self.domain_error("expected a function, got a real point".into()))
            }
        }
    }

    fn domain_error(&self, detail: String) -> Error {
        Error::DomainMismatch {
            context: self.name(),
            detail,
        }
    }
}

impl AsymmetricMetric for MetricSpec {
    fn name(&self) -> String {
        let base = match &self.kind {
            MetricKind::Mat2Split => "mat2-split".to_string(),
            MetricKind::Mat2SplitScaled { beta } => format!("mat2-split-scaled(beta={beta})"),
            MetricKind::PeriodicFn { period, grid } => {
                format!("periodic(T={period},samples={})", grid.len())
            }
            MetricKind::ScalarForwardOne => "scalar-forward-one".to_string(),
            MetricKind::ScalarBackwardOne => "scalar-backward-one".to_string(),
            MetricKind::MultOp { grid } => format!("mult-op(samples={})", grid.len()),
        };
        if self.dual {
            format!("dual({base})")
        } else {
            base
        }
    }

    fn distance(&self, x: &Point, y: &Point) -> Result<AlgebraElement> {
        let (x, y) = if self.dual { (y, x) } else { (x, y) };
        match &self.kind {
            MetricKind::Mat2Split => {
                let (x, y) = (self.real(x)?, self.real(y)?);
                split(x, y, 1.0)
            }
            MetricKind::Mat2SplitScaled { beta } => {
                let (x, y) = (self.real(x)?, self.real(y)?);
                split(x, y, *beta)
            }
            MetricKind::PeriodicFn { period, grid } => {
                let (x, y) = (self.real(x)?, self.real(y)?);
                let t_max = *period;
                let f = if x >= y {
                    SampledFn::from_fn(grid, |t| (x - y) * t)?
                } else {
                    SampledFn::from_fn(grid, |t| (y - x) * (t_max - t) / t_max)?
                };
                Ok(AlgebraElement::Sampled(f))
            }
            MetricKind::ScalarForwardOne => {
                let (x, y) = (self.real(x)?, self.real(y)?);
                Ok(AlgebraElement::Scalar(if y >= x { y - x } else { 1.0 }))
            }
            MetricKind::ScalarBackwardOne => {
                let (x, y) = (self.real(x)?, self.real(y)?);
                Ok(AlgebraElement::Scalar(if x >= y { x - y } else { 1.0 }))
            }
            MetricKind::MultOp { grid } => {
                let (f, g) = (self.func(x, grid)?, self.func(y, grid)?);
                mult_op_distance(f, g)
            }
        }
    }

    fn order(&self) -> OrderKind {
        self.order
    }

    fn norm_kind(&self) -> NormKind {
        self.norm
    }
}

fn split(x: f64, y: f64, beta: f64) -> Result<AlgebraElement> {
    if x >= y {
        AlgebraElement::diag(x - y, 0.0)
    } else {
        AlgebraElement::diag(0.0, beta * (y - x))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairViolation {
    pub x: Point,
    pub y: Point,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleViolation {
    pub x: Point,
    pub y: Point,
    pub z: Point,
    /// `d(x, y)`
    pub lhs: AlgebraElement,
    /// `d(x, z) + d(z, y)`
    pub rhs: AlgebraElement,
}

/// Outcome of an axiom sweep. Violations are listed in sample order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub metric: String,
    pub points: usize,
    pub triples_tested: usize,
    pub tol: f64,
    pub positivity_ok: bool,
    pub identity_ok: bool,
    pub triangle_ok: bool,
    pub positivity_violations: Vec<PairViolation>,
    pub identity_violations: Vec<PairViolation>,
    pub triangle_violations: Vec<TriangleViolation>,
    /// Last pair `(xᵢ, xⱼ)`, `i < j` in sample order, with `d(xᵢ,xⱼ) ≠ d(xⱼ,xᵢ)`.
    pub asymmetry_witness: Option<(Point, Point)>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.positivity_ok && self.identity_ok && self.triangle_ok
    }

    pub fn violation_count(&self) -> usize {
        self.positivity_violations.len()
            + self.identity_violations.len()
            + self.triangle_violations.len()
    }
}

/// `lhs ⪯ rhs` up to `tol · (1 + ‖rhs‖)`.
pub(crate) fn order_holds<M: AsymmetricMetric + ?Sized>(
    metric: &M,
    lhs: &AlgebraElement,
    rhs: &AlgebraElement,
    tol: f64,
) -> Result<bool> {
    let scaled = tol * (1.0 + rhs.norm(metric.norm_kind()));
    lhs.leq(rhs, metric.order(), scaled)
}

/// Checks positivity, identity of indiscernibles, and the triangle
/// inequality over every pair and ordered triple of `points`.
pub fn check_axioms<M: AsymmetricMetric + ?Sized>(
    metric: &M,
    points: &[Point],
    tol: f64,
) -> Result<AxiomReport> {
    let n = points.len();
    let table: Vec<Vec<AlgebraElement>> = points
        .par_iter()
        .map(|x| {
            points
                .iter()
                .map(|y| metric.distance(x, y))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut positivity_violations = Vec::new();
    let mut identity_violations = Vec::new();
    let mut asymmetry_witness = None;
    for i in 0..n {
        for j in 0..n {
            let d = &table[i][j];
            let pair = |detail: String| PairViolation {
                x: points[i].clone(),
                y: points[j].clone(),
                detail,
            };
            let min = d.min_spectrum(tol)?;
            if min < -tol {
                positivity_violations.push(pair(format!("smallest spectral value {min:e}")));
            }
            let same = points[i] == points[j];
            if same && !d.is_zero() {
                identity_violations.push(pair("d(x, x) is not zero".into()));
            } else if !same && d.is_zero() {
                identity_violations.push(pair("d(x, y) = 0 for x ≠ y".into()));
            }
            if i < j && table[i][j] != table[j][i] {
                asymmetry_witness = Some((points[i].clone(), points[j].clone()));
            }
        }
    }

    let triangle_violations: Vec<TriangleViolation> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut found = Vec::new();
            for j in 0..n {
                for k in 0..n {
                    let rhs = table[i][k].add(&table[k][j])?;
                    if !order_holds(metric, &table[i][j], &rhs, tol)? {
                        found.push(TriangleViolation {
                            x: points[i].clone(),
                            y: points[j].clone(),
                            z: points[k].clone(),
                            lhs: table[i][j].clone(),
                            rhs,
                        });
                    }
                }
            }
            Ok(found)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    Ok(AxiomReport {
        metric: metric.name(),
        points: n,
        triples_tested: n * n * n,
        tol,
        positivity_ok: positivity_violations.is_empty(),
        identity_ok: identity_violations.is_empty(),
        triangle_ok: triangle_violations.is_empty(),
        positivity_violations,
        identity_violations,
        triangle_violations,
        asymmetry_witness,
    })
}

/// `n` evenly spaced real points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<Point> {
    match n {
        0 => Vec::new(),
        1 => vec![Point::Real(start)],
        _ => (0..n)
            .map(|i| Point::Real(start + (stop - start) * i as f64 / (n - 1) as f64))
            .collect(),
    }
}
