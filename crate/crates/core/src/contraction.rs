//! Contraction certificates checked on finite samples.
//!
//! A certificate pairs a coefficient `a` with the inequality it satisfies
//! and the evidence it was checked on. The check is exact order comparison
//! up to `tol · (1 + ‖rhs‖)`; a certificate is valid iff it recorded no
//! violations.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, NormKind};
use crate::error::{Error, Result};
use crate::map::{orbit, SelfMap};
use crate::metric::{order_holds, AsymmetricMetric, Point};

/// Fraction of the norm cap the coefficient search stays below, so that a
/// strict `‖a‖ < 1` cap is not met "within tolerance".
pub const SEARCH_MARGIN: f64 = 1e-6;

/// Fixed number of bisection steps in [`search_scalar_coefficient`].
pub const SEARCH_ITERATIONS: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `d(Tx, Ty) ⪯ a* d(x, y) a` for all sampled pairs.
    ForwardGlobal,
    /// `d(Tx, Ty) ⪯ a* d(y, x) a` for all sampled pairs.
    BackwardGlobal,
    /// `d(Ty, T²y) ⪯ a* d(y, Ty) a` along one orbit.
    OrbitalType,
    /// `d(Ty, T²y) ⪯ a · d(y, T²y)` along one orbit, with `a` positive,
    /// commuting, and `‖a‖ ≤ 1/2`.
    OrbitalCommuting,
}

impl Regime {
    /// Upper limit on the coefficient norm and whether it is attained.
    pub fn cap(self) -> (f64, bool) {
        match self {
            Regime::OrbitalCommuting => (0.5, true),
            _ => (1.0, false),
        }
    }

    /// Norm the cap is measured in, given the metric's display norm.
    fn cap_norm(self, metric_norm: NormKind) -> NormKind {
        match self {
            Regime::OrbitalCommuting => NormKind::Operator,
            _ => metric_norm,
        }
    }

    pub fn is_orbital(self) -> bool {
        matches!(self, Regime::OrbitalType | Regime::OrbitalCommuting)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub index: usize,
    pub x: Point,
    pub y: Point,
    pub lhs: AlgebraElement,
    pub rhs: AlgebraElement,
}

/// A secondary inequality checked alongside the certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub description: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionCertificate {
    pub regime: Regime,
    pub map: String,
    pub metric: String,
    pub a: AlgebraElement,
    pub norm_kind: NormKind,
    /// `‖a‖` in `norm_kind`.
    pub a_norm: f64,
    pub a_operator_norm: f64,
    pub tol: f64,
    pub samples_checked: usize,
    /// Pairs checked by the global regimes.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pairs: Vec<(Point, Point)>,
    /// Seed and length of the orbit checked by the orbital regimes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit_len: Option<usize>,
    pub violations: Vec<Violation>,
    /// `h = a (I − a)⁻¹` for [`Regime::OrbitalCommuting`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<AlgebraElement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_norm: Option<f64>,
    #[serde(default)]
    pub diagnostics: Vec<Diagnostic>,
}

impl ContractionCertificate {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_cap(regime: Regime, a: &AlgebraElement, norm_kind: NormKind) -> Result<f64> {
    let norm = a.norm(regime.cap_norm(norm_kind));
    let (cap, inclusive) = regime.cap();
    if norm > cap || (!inclusive && norm == cap) {
        return Err(Error::CoefficientNormTooLarge { norm, cap });
    }
    Ok(norm)
}

fn base_certificate<T, M>(
    regime: Regime,
    map: &T,
    metric: &M,
    a: &AlgebraElement,
    tol: f64,
) -> ContractionCertificate
where
    T: SelfMap + ?Sized,
    M: AsymmetricMetric + ?Sized,
{
    ContractionCertificate {
        regime,
        map: map.name(),
        metric: metric.name(),
        a: a.clone(),
        norm_kind: metric.norm_kind(),
        a_norm: a.norm(metric.norm_kind()),
        a_operator_norm: a.norm(NormKind::Operator),
        tol,
        samples_checked: 0,
        pairs: Vec::new(),
        seed: None,
        orbit_len: None,
        violations: Vec::new(),
        h: None,
        h_norm: None,
        diagnostics: Vec::new(),
    }
}

/// Checks `d(Tx, Ty) ⪯ a* d(x, y) a` (forward) or `⪯ a* d(y, x) a`
/// (backward) on every pair.
pub fn verify_global<T, M>(
    map: &T,
    metric: &M,
    a: &AlgebraElement,
    pairs: &[(Point, Point)],
    direction: Direction,
    tol: f64,
) -> Result<ContractionCertificate>
where
    T: SelfMap + ?Sized,
    M: AsymmetricMetric + ?Sized,
{
    let regime = match direction {
        Direction::Forward => Regime::ForwardGlobal,
        Direction::Backward => Regime::BackwardGlobal,
    };
    check_cap(regime, a, metric.norm_kind())?;

    let checked: Vec<Option<Violation>> = pairs
        .par_iter()
        .enumerate()
        .map(|(index, (x, y))| {
            let lhs = metric.distance(&map.apply(x)?, &map.apply(y)?)?;
            let base = match direction {
                Direction::Forward => metric.distance(x, y)?,
                Direction::Backward => metric.distance(y, x)?,
            };
            let rhs = base.sandwich(a)?;
            Ok((!order_holds(metric, &lhs, &rhs, tol)?).then(|| Violation {
                index,
                x: x.clone(),
                y: y.clone(),
                lhs,
                rhs,
            }))
        })
        .collect::<Result<_>>()?;

    let mut cert = base_certificate(regime, map, metric, a, tol);
    cert.samples_checked = pairs.len();
    cert.pairs = pairs.to_vec();
    cert.violations = checked.into_iter().flatten().collect();
    Ok(cert)
}

/// Checks `d(Ty, T²y) ⪯ a* d(y, Ty) a` for `y = seed, T seed, …, Tⁿ seed`
/// with `n = orbit_len`. Also records whether the inequality would hold
/// with the right-hand arguments swapped to `d(Ty, y)`.
pub fn verify_orbital_type<T, M>(
    map: &T,
    metric: &M,
    a: &AlgebraElement,
    seed: &Point,
    orbit_len: usize,
    tol: f64,
) -> Result<ContractionCertificate>
where
    T: SelfMap + ?Sized,
    M: AsymmetricMetric + ?Sized,
{
    if orbit_len < 2 {
        return Err(Error::InvalidConfig(format!(
            "orbit_len must be at least 2, got {orbit_len}"
        )));
    }
    check_cap(Regime::OrbitalType, a, metric.norm_kind())?;
    let ys = orbit(map, seed, orbit_len + 2)?;

    let mut violations = Vec::new();
    let mut swapped_holds = true;
    for i in 0..=orbit_len {
        let lhs = metric.distance(&ys[i + 1], &ys[i + 2])?;
        let rhs = metric.distance(&ys[i], &ys[i + 1])?.sandwich(a)?;
        if !order_holds(metric, &lhs, &rhs, tol)? {
            violations.push(Violation {
                index: i,
                x: ys[i].clone(),
                y: ys[i + 1].clone(),
                lhs: lhs.clone(),
                rhs,
            });
        }
        let swapped = metric.distance(&ys[i + 1], &ys[i])?.sandwich(a)?;
        swapped_holds &= order_holds(metric, &lhs, &swapped, tol)?;
    }

    let mut cert = base_certificate(Regime::OrbitalType, map, metric, a, tol);
    cert.samples_checked = orbit_len + 1;
    cert.seed = Some(seed.clone());
    cert.orbit_len = Some(orbit_len);
    cert.violations = violations;
    cert.diagnostics.push(Diagnostic {
        description: "d(Ty, T²y) ⪯ a* d(Ty, y) a (right-hand arguments swapped)".into(),
        holds: swapped_holds,
    });
    Ok(cert)
}

/// Checks the one-sided orbital condition `d(Ty, T²y) ⪯ a · d(y, T²y)`
/// for a positive commuting `a` with `‖a‖ ≤ 1/2`, and attaches
/// `h = a (I − a)⁻¹` for the solver's rate.
pub fn verify_orbital_commuting<T, M>(
    map: &T,
    metric: &M,
    a: &AlgebraElement,
    seed: &Point,
    orbit_len: usize,
    tol: f64,
) -> Result<ContractionCertificate>
where
    T: SelfMap + ?Sized,
    M: AsymmetricMetric + ?Sized,
{
    if orbit_len < 2 {
        return Err(Error::InvalidConfig(format!(
            "orbit_len must be at least 2, got {orbit_len}"
        )));
    }
    let min = a.min_spectrum(tol)?;
    if min < -tol {
        return Err(Error::NotPositive { min_spectrum: min });
    }
    if !a.is_commuting() {
        return Err(Error::NotCommuting(
            "coefficient must be scalar, diagonal, or sampled",
        ));
    }
    check_cap(Regime::OrbitalCommuting, a, metric.norm_kind())?;
    let h = a.mul(&a.invert_one_minus()?)?;

    let ys = orbit(map, seed, orbit_len + 2)?;
    let mut violations = Vec::new();
    let mut chain_holds = true;
    for i in 0..=orbit_len {
        let lhs = metric.distance(&ys[i + 1], &ys[i + 2])?;
        let rhs = a.mul(&metric.distance(&ys[i], &ys[i + 2])?)?;
        if !order_holds(metric, &lhs, &rhs, tol)? {
            violations.push(Violation {
                index: i,
                x: ys[i].clone(),
                y: ys[i + 2].clone(),
                lhs: lhs.clone(),
                rhs,
            });
        }
        let step_bound = h.mul(&metric.distance(&ys[i], &ys[i + 1])?)?;
        chain_holds &= order_holds(metric, &lhs, &step_bound, tol)?;
    }

    let mut cert = base_certificate(Regime::OrbitalCommuting, map, metric, a, tol);
    cert.samples_checked = orbit_len + 1;
    cert.seed = Some(seed.clone());
    cert.orbit_len = Some(orbit_len);
    cert.violations = violations;
    cert.h_norm = Some(h.norm(NormKind::Operator));
    cert.h = Some(h);
    cert.diagnostics.push(Diagnostic {
        description: "d(Tⁿx, Tⁿ⁺¹x) ⪯ h d(Tⁿ⁻¹x, Tⁿx) with h = a (I − a)⁻¹".into(),
        holds: chain_holds,
    });
    Ok(cert)
}

/// What a coefficient search checks against.
#[derive(Clone, Debug, PartialEq)]
pub enum SearchTarget {
    Pairs(Vec<(Point, Point)>),
    Orbit { seed: Point, len: usize },
}

/// Checks `a` against `target` with the verifier for `regime`.
pub fn verify_certificate<T, M>(
    map: &T,
    metric: &M,
    regime: Regime,
    target: &SearchTarget,
    a: &AlgebraElement,
    tol: f64,
) -> Result<ContractionCertificate>
where
    T: SelfMap + ?Sized,
    M: AsymmetricMetric + ?Sized,
{
    match (regime, target) {
        (Regime::ForwardGlobal, SearchTarget::Pairs(p)) => {
            verify_global(map, metric, a, p, Direction::Forward, tol)
        }
        (Regime::BackwardGlobal, SearchTarget::Pairs(p)) => {
            verify_global(map, metric, a, p, Direction::Backward, tol)
        }
        (Regime::OrbitalType, SearchTarget::Orbit { seed, len }) => {
            verify_orbital_type(map, metric, a, seed, *len, tol)
        }
        (Regime::OrbitalCommuting, SearchTarget::Orbit { seed, len }) => {
            verify_orbital_commuting(map, metric, a, seed, *len, tol)
        }
        _ => Err(Error::InvalidConfig(format!(
            "{regime:?} cannot be checked against {}",
            match target {
                SearchTarget::Pairs(_) => "pairs",
                SearchTarget::Orbit { .. } => "an orbit",
            }
        ))),
    }
}

/// Smallest `c` such that `a = c·I` certifies the regime, by bisection.
///
/// Returns `None` when even the largest admissible `c` fails. The returned
/// certificate is the upper end of the final bracket, re-verified.
pub fn search_scalar_coefficient<T, M>(
    map: &T,
    metric: &M,
    regime: Regime,
    target: &SearchTarget,
    tol: f64,
) -> Result<Option<ContractionCertificate>>
where
    T: SelfMap + ?Sized,
    M: AsymmetricMetric + ?Sized,
{
    let probe = match target {
        SearchTarget::Pairs(p) => match p.first() {
            Some((x, y)) => metric.distance(x, y)?,
            None => return Err(Error::InvalidConfig("no pairs to search over".into())),
        },
        SearchTarget::Orbit { seed, .. } => metric.distance(seed, &map.apply(seed)?)?,
    };
    let unit = probe.unit_like();
    let (cap, inclusive) = regime.cap();
    let unit_norm = unit.norm(regime.cap_norm(metric.norm_kind()));
    let c_max = if inclusive {
        cap / unit_norm
    } else {
        cap * (1.0 - SEARCH_MARGIN) / unit_norm
    };

    let at = |c: f64| verify_certificate(map, metric, regime, target, &unit.scale(c), tol);
    if !at(c_max)?.is_valid() {
        return Ok(None);
    }
    let zero = at(0.0)?;
    if zero.is_valid() {
        return Ok(Some(zero));
    }
    let (mut lo, mut hi) = (0.0, c_max);
    for _ in 0..SEARCH_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if at(mid)?.is_valid() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    at(hi).map(Some)
}

/// All ordered pairs `(xᵢ, xⱼ)` of the given points, `i ≠ j`.
pub fn all_pairs(points: &[Point]) -> Vec<(Point, Point)> {
    let mut out = Vec::with_capacity(points.len() * points.len().saturating_sub(1));
    for (i, x) in points.iter().enumerate() {
        for (j, y) in points.iter().enumerate() {
            if i != j {
                out.push((x.clone(), y.clone()));
            }
        }
    }
    out
}
