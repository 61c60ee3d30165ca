//! Concrete unital C*-algebras: real 2×2 matrices, real functions sampled on a
//! grid, and real scalars.
//!
//! Every element carries its realization, and binary operations refuse to mix
//! realizations (or grids). The algebra is real, so the involution is the
//! transpose on matrices and the identity on functions and scalars.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance for positivity and order tests.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Which norm to measure an element with.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    /// The C*-norm: largest singular value, sup norm, or absolute value.
    #[default]
    Operator,
    /// Square root of the sum of squared entries (samples). Not a C*-norm:
    /// the unit of `Mat2` has norm √2.
    EntrySumSquares,
}

/// Which partial order to compare self-adjoint elements with.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderKind {
    /// `a ⪯ b` iff `b − a` is positive (spectrum in `[0, ∞)`).
    #[default]
    #[serde(rename = "cone")]
    PositiveCone,
    /// `a ⪯ b` iff `b_i ≥ a_i ≥ 0` entry by entry (sample by sample).
    Entrywise,
}

/// Strictly increasing, finite sample locations with at least two points.
///
/// Cloning is cheap; elements built from the same `Grid` share storage.
#[derive(Clone, Debug)]
pub struct Grid(Arc<[f64]>);

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidElement(format!(
                "grid needs at least 2 points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidElement("grid has non-finite points".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidElement(
                "grid is not strictly increasing".into(),
            ));
        }
        Ok(Self(points.into()))
    }

    /// `n` points `1/n, 2/n, …, 1` covering `(0, 1]`.
    pub fn unit_interval(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| i as f64 / n as f64).collect())
    }

    /// `n` points `0, T/n, …, (n−1)T/n` covering one period `[0, T)`.
    pub fn period(period: f64, n: usize) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidElement(format!(
                "period must be positive, got {period}"
            )));
        }
        Self::new((0..n).map(|j| j as f64 * period / n as f64).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

/// A real function known only through its values on a [`Grid`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSampled", into = "RawSampled")]
pub struct SampledFn {
    grid: Grid,
    values: Vec<f64>,
}

impl SampledFn {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidElement(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidElement(
                "sampled function has non-finite values".into(),
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.points().iter().map(|&t| f(t)).collect();
        Self::new(grid.clone(), values)
    }

    pub fn constant(grid: &Grid, c: f64) -> Result<Self> {
        Self::from_fn(grid, |_| c)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Pointwise combination; the caller guarantees matching grids.
    pub(crate) fn zip_with(&self, other: &SampledFn, f: impl Fn(f64, f64) -> f64) -> SampledFn {
        debug_assert!(self.grid.same_as(&other.grid));
        SampledFn {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub(crate) fn map(&self, f: impl Fn(f64) -> f64) -> SampledFn {
        SampledFn {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

#[derive(Clone, Serialize, Deserialize)]
struct RawSampled {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawSampled> for SampledFn {
    type Error = Error;

    fn try_from(raw: RawSampled) -> Result<Self> {
        SampledFn::new(Grid::new(raw.grid)?, raw.values)
    }
}

impl From<SampledFn> for RawSampled {
    fn from(f: SampledFn) -> Self {
        RawSampled {
            grid: f.grid.points().to_vec(),
            values: f.values,
        }
    }
}

/// Real 2×2 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[f64; 2]; 2]);

/// Eigenpairs of a symmetric 2×2 matrix, largest eigenvalue first.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetricEigen2 {
    pub values: [f64; 2],
    /// Unit eigenvectors matching `values`.
    pub vectors: [[f64; 2]; 2],
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);
    pub const ZERO: Mat2 = Mat2([[0.0, 0.0], [0.0, 0.0]]);

    pub fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Mat2([[m11, m12], [m21, m22]])
    }

    pub fn diag(d1: f64, d2: f64) -> Self {
        Mat2([[d1, 0.0], [0.0, d2]])
    }

    pub fn entries(&self) -> [f64; 4] {
        let [[a, b], [c, d]] = self.0;
        [a, b, c, d]
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|x| x.is_finite())
    }

    pub fn is_diagonal(&self) -> bool {
        self.0[0][1] == 0.0 && self.0[1][0] == 0.0
    }

    pub fn transpose(&self) -> Self {
        let [[a, b], [c, d]] = self.0;
        Mat2([[a, c], [b, d]])
    }

    pub fn matmul(&self, rhs: &Mat2) -> Self {
        let [[a, b], [c, d]] = self.0;
        let [[e, f], [g, h]] = rhs.0;
        Mat2([
            [a * e + b * g, a * f + b * h],
            [c * e + d * g, c * f + d * h],
        ])
    }

    pub fn zip_with(&self, rhs: &Mat2, f: impl Fn(f64, f64) -> f64) -> Self {
        let [[a, b], [c, d]] = self.0;
        let [[e, g], [h, k]] = rhs.0;
        Mat2([[f(a, e), f(b, g)], [f(c, h), f(d, k)]])
    }

    pub fn scale(&self, s: f64) -> Self {
        self.zip_with(self, |x, _| s * x)
    }

    pub fn determinant(&self) -> f64 {
        let [[a, b], [c, d]] = self.0;
        a * d - b * c
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.determinant();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let [[a, b], [c, d]] = self.0;
        Some(Mat2([[d / det, -b / det], [-c / det, a / det]]))
    }

    /// Largest singular value, in closed form.
    pub fn spectral_norm(&self) -> f64 {
        let [[a, b], [c, d]] = self.0;
        let s1 = (a + d).hypot(c - b);
        let s2 = (a - d).hypot(b + c);
        0.5 * (s1 + s2)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Closed-form eigendecomposition of the symmetric part.
    pub fn symmetric_eigen(&self) -> SymmetricEigen2 {
        let [[a, _], [_, d]] = self.0;
        let b = 0.5 * (self.0[0][1] + self.0[1][0]);
        let mean = 0.5 * (a + d);
        let radius = (0.5 * (a - d)).hypot(b);
        let (l1, l2) = (mean + radius, mean - radius);

        let v1 = if b == 0.0 {
            if a >= d {
                [1.0, 0.0]
            } else {
                [0.0, 1.0]
            }
        } else {
            let p = [l1 - d, b];
            let q = [b, l1 - a];
            let pick = if p[0].hypot(p[1]) >= q[0].hypot(q[1]) {
                p
            } else {
                q
            };
            let n = pick[0].hypot(pick[1]);
            [pick[0] / n, pick[1] / n]
        };
        let v2 = [-v1[1], v1[0]];
        SymmetricEigen2 {
            values: [l1, l2],
            vectors: [v1, v2],
        }
    }

    /// `Σ f(λᵢ) vᵢ vᵢᵀ` over the eigenpairs of the symmetric part.
    fn spectral_map(&self, f: impl Fn(f64) -> f64) -> Self {
        let eig = self.symmetric_eigen();
        let mut out = [[0.0; 2]; 2];
        for (lambda, v) in eig.values.iter().zip(eig.vectors.iter()) {
            let w = f(*lambda);
            for (i, row) in out.iter_mut().enumerate() {
                for (j, cell) in row.iter_mut().enumerate() {
                    *cell += w * v[i] * v[j];
                }
            }
        }
        // exact symmetry
        let off = 0.5 * (out[0][1] + out[1][0]);
        Mat2([[out[0][0], off], [off, out[1][1]]])
    }
}

/// An element of one of the concrete algebras.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawElement", into = "RawElement")]
pub enum AlgebraElement {
    Mat2(Mat2),
    Sampled(SampledFn),
    Scalar(f64),
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "realization", rename_all = "lowercase")]
enum RawElement {
    Mat2 { entries: [[f64; 2]; 2] },
    Sampled { grid: Vec<f64>, values: Vec<f64> },
    Scalar { value: f64 },
}

impl TryFrom<RawElement> for AlgebraElement {
    type Error = Error;

    fn try_from(raw: RawElement) -> Result<Self> {
        match raw {
            RawElement::Mat2 { entries } => AlgebraElement::mat2(Mat2(entries)),
            RawElement::Sampled { grid, values } => Ok(AlgebraElement::Sampled(SampledFn::new(
                Grid::new(grid)?,
                values,
            )?)),
            RawElement::Scalar { value } => AlgebraElement::scalar(value),
        }
    }
}

impl From<AlgebraElement> for RawElement {
    fn from(e: AlgebraElement) -> Self {
        match e {
            AlgebraElement::Mat2(m) => RawElement::Mat2 { entries: m.0 },
            AlgebraElement::Sampled(f) => RawElement::Sampled {
                grid: f.grid.points().to_vec(),
                values: f.values,
            },
            AlgebraElement::Scalar(value) => RawElement::Scalar { value },
        }
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraElement::Mat2(m) => {
                let [[a, b], [c, d]] = m.0;
                write!(f, "[[{a:.6}, {b:.6}], [{c:.6}, {d:.6}]]")
            }
            AlgebraElement::Sampled(s) => {
                write!(
                    f,
                    "sampled[{} pts, sup {:.6}]",
                    s.values.len(),
                    s.sup_norm()
                )
            }
            AlgebraElement::Scalar(x) => write!(f, "{x:.6}"),
        }
    }
}

impl AlgebraElement {
    pub fn mat2(m: Mat2) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::InvalidElement(
                "matrix has non-finite entries".into(),
            ));
        }
        Ok(AlgebraElement::Mat2(m))
    }

    pub fn scalar(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::InvalidElement(format!("scalar {x} is not finite")));
        }
        Ok(AlgebraElement::Scalar(x))
    }

    pub fn diag(d1: f64, d2: f64) -> Result<Self> {
        Self::mat2(Mat2::diag(d1, d2))
    }

    pub fn realization(&self) -> &'static str {
        match self {
            AlgebraElement::Mat2(_) => "mat2",
            AlgebraElement::Sampled(_) => "sampled",
            AlgebraElement::Scalar(_) => "scalar",
        }
    }

    /// The unit of the algebra this element lives in.
    pub fn unit_like(&self) -> Self {
        self.map_values(|_| 1.0, Mat2::IDENTITY)
    }

    pub fn zero_like(&self) -> Self {
        self.map_values(|_| 0.0, Mat2::ZERO)
    }

    fn map_values(&self, f: impl Fn(f64) -> f64, mat: Mat2) -> Self {
        match self {
            AlgebraElement::Mat2(_) => AlgebraElement::Mat2(mat),
            AlgebraElement::Sampled(s) => AlgebraElement::Sampled(s.map(f)),
            AlgebraElement::Scalar(x) => AlgebraElement::Scalar(f(*x)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            AlgebraElement::Mat2(m) => m.entries().iter().all(|&x| x == 0.0),
            AlgebraElement::Sampled(s) => s.values.iter().all(|&x| x == 0.0),
            AlgebraElement::Scalar(x) => *x == 0.0,
        }
    }

    /// True for realizations whose elements commute with the whole algebra
    /// in use: scalars, sampled functions, and diagonal matrices (inside the
    /// diagonal subalgebra).
    pub fn is_commuting(&self) -> bool {
        match self {
            AlgebraElement::Mat2(m) => m.is_diagonal(),
            AlgebraElement::Sampled(_) | AlgebraElement::Scalar(_) => true,
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64 + Copy) -> Result<Self> {
        match (self, other) {
            (AlgebraElement::Mat2(a), AlgebraElement::Mat2(b)) => {
                Ok(AlgebraElement::Mat2(a.zip_with(b, f)))
            }
            (AlgebraElement::Sampled(a), AlgebraElement::Sampled(b)) => {
                if !a.grid.same_as(&b.grid) {
                    return Err(Error::RealizationMismatch {
                        left: "sampled",
                        right: "sampled on another grid",
                    });
                }
                Ok(AlgebraElement::Sampled(a.zip_with(b, f)))
            }
            (AlgebraElement::Scalar(a), AlgebraElement::Scalar(b)) => {
                Ok(AlgebraElement::Scalar(f(*a, *b)))
            }
            _ => Err(Error::RealizationMismatch {
                left: self.realization(),
                right: other.realization(),
            }),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        match self {
            AlgebraElement::Mat2(m) => AlgebraElement::Mat2(m.scale(s)),
            AlgebraElement::Sampled(f) => AlgebraElement::Sampled(f.map(|v| s * v)),
            AlgebraElement::Scalar(x) => AlgebraElement::Scalar(s * x),
        }
    }

    /// Matrix product for `Mat2`, pointwise product otherwise.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (AlgebraElement::Mat2(a), AlgebraElement::Mat2(b)) => {
                Ok(AlgebraElement::Mat2(a.matmul(b)))
            }
            _ => self.zip(other, |a, b| a * b),
        }
    }

    /// `c* · self · c`
    pub fn sandwich(&self, c: &Self) -> Result<Self> {
        c.adjoint().mul(self)?.mul(c)
    }

    pub fn adjoint(&self) -> Self {
        match self {
            AlgebraElement::Mat2(m) => AlgebraElement::Mat2(m.transpose()),
            other => other.clone(),
        }
    }

    pub fn norm(&self, kind: NormKind) -> f64 {
        match (self, kind) {
            (AlgebraElement::Mat2(m), NormKind::Operator) => m.spectral_norm(),
            (AlgebraElement::Mat2(m), NormKind::EntrySumSquares) => m.frobenius_norm(),
            (AlgebraElement::Sampled(s), NormKind::Operator) => s.sup_norm(),
            (AlgebraElement::Sampled(s), NormKind::EntrySumSquares) => {
                s.values.iter().map(|v| v * v).sum::<f64>().sqrt()
            }
            (AlgebraElement::Scalar(x), _) => x.abs(),
        }
    }

    fn check_self_adjoint(&self, tol: f64) -> Result<()> {
        if let AlgebraElement::Mat2(m) = self {
            let asym = (m.0[0][1] - m.0[1][0]).abs();
            let scale = m.entries().iter().fold(1.0_f64, |s, x| s.max(x.abs()));
            if asym > tol * scale {
                return Err(Error::NotSelfAdjoint { asymmetry: asym });
            }
        }
        Ok(())
    }

    /// Smallest point of the spectrum of a self-adjoint element.
    pub fn min_spectrum(&self, tol: f64) -> Result<f64> {
        self.check_self_adjoint(tol)?;
        Ok(match self {
            AlgebraElement::Mat2(m) => m.symmetric_eigen().values[1],
            AlgebraElement::Sampled(s) => s.values.iter().copied().fold(f64::INFINITY, f64::min),
            AlgebraElement::Scalar(x) => *x,
        })
    }

    pub fn is_positive(&self, tol: f64) -> Result<bool> {
        Ok(self.min_spectrum(tol)? >= -tol)
    }

    /// `self ⪯ other` in the requested order.
    pub fn leq(&self, other: &Self, order: OrderKind, tol: f64) -> Result<bool> {
        match order {
            OrderKind::PositiveCone => {
                self.check_self_adjoint(tol)?;
                other.check_self_adjoint(tol)?;
                other.sub(self)?.is_positive(tol)
            }
            OrderKind::Entrywise => {
                let ok = |a: f64, b: f64| a >= -tol && b >= a - tol;
                Ok(match (self, other) {
                    (AlgebraElement::Mat2(a), AlgebraElement::Mat2(b)) => {
                        a.entries().iter().zip(b.entries()).all(|(&x, y)| ok(x, y))
                    }
                    (AlgebraElement::Sampled(a), AlgebraElement::Sampled(b)) => {
                        if !a.grid.same_as(&b.grid) {
                            return Err(Error::RealizationMismatch {
                                left: "sampled",
                                right: "sampled on another grid",
                            });
                        }
                        a.values.iter().zip(&b.values).all(|(&x, &y)| ok(x, y))
                    }
                    (AlgebraElement::Scalar(a), AlgebraElement::Scalar(b)) => ok(*a, *b),
                    _ => {
                        return Err(Error::RealizationMismatch {
                            left: self.realization(),
                            right: other.realization(),
                        })
                    }
                })
            }
        }
    }

    /// The positive square root of a positive element.
    pub fn sqrt_positive(&self, tol: f64) -> Result<Self> {
        let min = self.min_spectrum(tol)?;
        if min < -tol {
            return Err(Error::NotPositive { min_spectrum: min });
        }
        let root = |v: f64| v.max(0.0).sqrt();
        Ok(match self {
            AlgebraElement::Mat2(m) => AlgebraElement::Mat2(m.spectral_map(root)),
            AlgebraElement::Sampled(s) => AlgebraElement::Sampled(s.map(root)),
            AlgebraElement::Scalar(x) => AlgebraElement::Scalar(root(*x)),
        })
    }

    /// `(I − a)⁻¹` for positive `a` with `‖a‖ < 1/2`.
    pub fn inverse_one_minus(&self, tol: f64) -> Result<Self> {
        let min = self.min_spectrum(tol)?;
        if min < -tol {
            return Err(Error::NotPositive { min_spectrum: min });
        }
        let norm = self.norm(NormKind::Operator);
        if norm >= 0.5 {
            return Err(Error::PreconditionNormTooLarge { norm, limit: 0.5 });
        }
        self.invert_one_minus()
    }

    /// `(I − a)⁻¹` without the positivity and norm preconditions.
    pub(crate) fn invert_one_minus(&self) -> Result<Self> {
        let singular = || Error::InvalidElement("I − a is singular".into());
        match self {
            AlgebraElement::Mat2(m) => {
                let inv = Mat2::IDENTITY
                    .zip_with(m, |i, x| i - x)
                    .inverse()
                    .ok_or_else(singular)?;
                Ok(AlgebraElement::Mat2(inv))
            }
            AlgebraElement::Sampled(s) => {
                if s.values.contains(&1.0) {
                    return Err(singular());
                }
                Ok(AlgebraElement::Sampled(s.map(|v| 1.0 / (1.0 - v))))
            }
            AlgebraElement::Scalar(x) => {
                if *x == 1.0 {
                    return Err(singular());
                }
                Ok(AlgebraElement::Scalar(1.0 / (1.0 - x)))
            }
        }
    }

    /// Largest absolute entrywise difference; `None` across realizations.
    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        let d = self.sub(other).ok()?;
        Some(match d {
            AlgebraElement::Mat2(m) => m.entries().iter().fold(0.0_f64, |a, x| a.max(x.abs())),
            AlgebraElement::Sampled(s) => s.sup_norm(),
            AlgebraElement::Scalar(x) => x.abs(),
        })
    }
}
