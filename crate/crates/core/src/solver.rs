//! Picard iteration under a contraction certificate, with the a-priori
//! bound envelope the certificate implies.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, NormKind, DEFAULT_TOL};
use crate::contraction::{ContractionCertificate, Regime};
use crate::convergence::{orbital_lsc_check, LscCheck};
use crate::error::{Error, Result};
use crate::map::SelfMap;
use crate::metric::{AsymmetricMetric, Point};

/// Orbit points beyond this index are left out of the bound envelope, which
/// costs one distance per pair of points.
pub const ENVELOPE_POINTS: usize = 256;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundMode {
    /// Rate `‖a‖²` for sandwich-type certificates.
    #[default]
    SquaredCoefficient,
    /// Rate `‖h‖` with `h = a (I − a)⁻¹`.
    Resolvent,
}

impl BoundMode {
    pub fn for_regime(regime: Regime) -> Self {
        match regime {
            Regime::OrbitalCommuting => BoundMode::Resolvent,
            _ => BoundMode::SquaredCoefficient,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iter: usize,
    pub tol: f64,
    /// Norm used for the stopping rule and residuals.
    pub norm_kind: NormKind,
    /// `None` picks the mode that matches the certificate.
    pub bound_mode: Option<BoundMode>,
    pub record_trace: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            tol: 1e-10,
            norm_kind: NormKind::Operator,
            bound_mode: None,
            record_trace: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Converged,
    /// Steps vanished but `d(x, Tx)` is not lower semicontinuous along the
    /// orbit, so the limit is not certified as a fixed point.
    ForwardLimitOnly,
    MaxIterExceeded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitStep {
    pub n: usize,
    pub point: Point,
    /// `‖d(xₙ, xₙ₊₁)‖`
    pub forward_norm: f64,
    /// `‖d(xₙ₊₁, xₙ)‖`
    pub backward_norm: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OrbitTrace {
    pub steps: Vec<OrbitStep>,
}

/// Observed `maxₙ ‖d(xₚ, xₙ₊₁)‖` (or the reverse order) against `Bₚ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopePoint {
    pub p: usize,
    pub observed: f64,
    pub bound: f64,
}

impl EnvelopePoint {
    pub fn holds(&self, tol: f64) -> bool {
        self.observed <= self.bound + tol
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub map: String,
    pub metric: String,
    pub regime: Regime,
    pub status: SolveStatus,
    pub fixed_point: Point,
    /// Picard updates performed to reach `fixed_point`.
    pub iterations: usize,
    /// `‖d(x*, Tx*)‖`
    pub residual_forward: f64,
    /// `‖d(Tx*, x*)‖`
    pub residual_backward: f64,
    pub norm_kind: NormKind,
    pub bound_mode: BoundMode,
    pub rate: f64,
    /// `‖d(xₚ, xₙ₊₁)‖` against the bound built from `d(x₀, x₁)`.
    pub forward_envelope: Vec<EnvelopePoint>,
    /// `‖d(xₙ₊₁, xₚ)‖` against the bound built from `d(x₁, x₀)`; global
    /// certificates only.
    pub backward_envelope: Vec<EnvelopePoint>,
    pub lsc: LscCheck,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<OrbitTrace>,
}

impl SolverReport {
    pub fn envelope_holds(&self, tol: f64) -> bool {
        self.forward_envelope
            .iter()
            .chain(&self.backward_envelope)
            .all(|e| e.holds(tol))
    }

    /// Columns `n, x_n, fwd_step_norm, bwd_step_norm, bound_p`; the bound is
    /// blank past the envelope.
    pub fn trace_csv(&self) -> Option<String> {
        let trace = self.trace.as_ref()?;
        let mut out = String::from("n,x_n,fwd_step_norm,bwd_step_norm,bound_p\n");
        for s in &trace.steps {
            let bound = self
                .forward_envelope
                .get(s.n)
                .map(|e| e.bound.to_string())
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                s.n,
                s.point.summary(),
                s.forward_norm,
                s.backward_norm,
                bound
            ));
        }
        Some(out)
    }
}

/// `Bₚ = ‖√d₁‖² rᵖ / (1 − r)` with `r = a_norm²` or `r = a_norm`
/// (the latter taking `‖h‖`).
pub fn apriori_bound(d1: &AlgebraElement, a_norm: f64, p: usize, mode: BoundMode) -> Result<f64> {
    let r = match mode {
        BoundMode::SquaredCoefficient => a_norm * a_norm,
        BoundMode::Resolvent => a_norm,
    };
    if !(r < 1.0) {
        return Err(Error::RateNotLessThanOne(r));
    }
    let root = d1.sqrt_positive(DEFAULT_TOL)?.norm(NormKind::Operator);
    Ok(root * root * r.powi(p as i32) / (1.0 - r))
}

fn check_certificate<T, M>(
    map: &T,
    metric: &M,
    cert: &ContractionCertificate,
    cfg: &SolverConfig,
) -> Result<(BoundMode, f64)>
where
    T: SelfMap + ?Sized,
    M: AsymmetricMetric + ?Sized,
{
    if cfg.max_iter == 0 || !(cfg.tol > 0.0) {
        return Err(Error::InvalidConfig(
            "max_iter and tol must be positive".into(),
        ));
    }
    if !cert.is_valid() {
        return Err(Error::CertificateInvalid(format!(
            "{} recorded violations",
            cert.violations.len()
        )));
    }
    if cert.map != map.name() || cert.metric != metric.name() {
        return Err(Error::CertificateInvalid(format!(
            "certificate is for {} under {}, not {} under {}",
            cert.map,
            cert.metric,
            map.name(),
            metric.name()
        )));
    }
    let mode = BoundMode::for_regime(cert.regime);
    if cfg.bound_mode.is_some_and(|m| m != mode) {
        return Err(Error::InvalidConfig(format!(
            "bound mode {:?} does not fit a {:?} certificate",
            cfg.bound_mode.unwrap(),
            cert.regime
        )));
    }
    let coefficient = match mode {
        BoundMode::SquaredCoefficient => cert.a.norm(NormKind::Operator),
        BoundMode::Resolvent => cert
            .h_norm
            .ok_or_else(|| Error::CertificateInvalid("certificate has no h".into()))?,
    };
    Ok((mode, coefficient))
}

/// Iterates `xₙ₊₁ = T xₙ` from `seed` until a step and the residual that
/// follows it are both at most `tol` in both argument orders.
///
/// Running out of iterations yields a report with
/// [`SolveStatus::MaxIterExceeded`], not an error.
pub fn picard_solve<T, M>(
    map: &T,
    metric: &M,
    seed: &Point,
    cert: &ContractionCertificate,
    cfg: &SolverConfig,
) -> Result<SolverReport>
where
    T: SelfMap + ?Sized,
    M: AsymmetricMetric + ?Sized,
{
    let (mode, coefficient) = check_certificate(map, metric, cert, cfg)?;
    // rejects r ≥ 1 before iterating
    let unit = metric.distance(seed, seed)?.unit_like();
    apriori_bound(&unit, coefficient, 0, mode)?;

    let norm = |x: &Point, y: &Point| metric.distance(x, y).map(|d| d.norm(cfg.norm_kind));
    let mut points = vec![seed.clone()];
    let mut steps: Vec<(f64, f64)> = Vec::new();
    let mut status = SolveStatus::MaxIterExceeded;
    let mut n = 0;
    loop {
        let next = map.apply(&points[n])?;
        let step = (norm(&points[n], &next)?, norm(&next, &points[n])?);
        let small = |s: (f64, f64)| s.0 <= cfg.tol && s.1 <= cfg.tol;
        let done = n >= 1 && small(steps[n - 1]) && small(step);
        steps.push(step);
        if done {
            status = SolveStatus::Converged;
        }
        if done || n == cfg.max_iter {
            points.push(next);
            break;
        }
        points.push(next);
        n += 1;
    }
    // points = x₀ … x_{n+1}; x_n is the answer and step n its residual
    let fixed_point = points[n].clone();
    let (residual_forward, residual_backward) = steps[n];

    let lsc = orbital_lsc_check(&points[..=n], &fixed_point, map, metric, cfg.tol)?;
    if status == SolveStatus::Converged && cert.regime.is_orbital() && !lsc.holds {
        status = SolveStatus::ForwardLimitOnly;
    }

    let m = points.len().min(ENVELOPE_POINTS);
    let env = &points[..m];
    let d01 = metric.distance(&env[0], &env[1])?;
    let d10 = metric.distance(&env[1], &env[0])?;
    let (forward_seed, backward_seed) = match cert.regime {
        Regime::ForwardGlobal => (d01, Some(d10)),
        // steps alternate argument order, so either seed may be the larger
        Regime::BackwardGlobal => {
            let larger = if d01.norm(NormKind::Operator) >= d10.norm(NormKind::Operator) {
                d01
            } else {
                d10
            };
            (larger.clone(), Some(larger))
        }
        Regime::OrbitalType | Regime::OrbitalCommuting => (d01, None),
    };
    let forward_envelope = envelope(metric, env, &forward_seed, coefficient, mode, false)?;
    let backward_envelope = match backward_seed {
        Some(d) => envelope(metric, env, &d, coefficient, mode, true)?,
        None => Vec::new(),
    };

    let trace = cfg.record_trace.then(|| OrbitTrace {
        steps: steps
            .iter()
            .enumerate()
            .map(|(i, &(f, b))| OrbitStep {
                n: i,
                point: points[i].clone(),
                forward_norm: f,
                backward_norm: b,
            })
            .collect(),
    });

    Ok(SolverReport {
        map: map.name(),
        metric: metric.name(),
        regime: cert.regime,
        status,
        fixed_point,
        iterations: n,
        residual_forward,
        residual_backward,
        norm_kind: cfg.norm_kind,
        bound_mode: mode,
        rate: match mode {
            BoundMode::SquaredCoefficient => coefficient * coefficient,
            BoundMode::Resolvent => coefficient,
        },
        forward_envelope,
        backward_envelope,
        lsc,
        trace,
    })
}

fn envelope<M: AsymmetricMetric + ?Sized>(
    metric: &M,
    points: &[Point],
    d1: &AlgebraElement,
    coefficient: f64,
    mode: BoundMode,
    reversed: bool,
) -> Result<Vec<EnvelopePoint>> {
    (0..points.len() - 1)
        .into_par_iter()
        .map(|p| {
            let mut observed = 0.0_f64;
            for q in p + 1..points.len() {
                let d = if reversed {
                    metric.distance(&points[q], &points[p])?
                } else {
                    metric.distance(&points[p], &points[q])?
                };
                observed = observed.max(d.norm(NormKind::Operator));
            }
            Ok(EnvelopePoint {
                p,
                observed,
                bound: apriori_bound(d1, coefficient, p, mode)?,
            })
        })
        .collect()
}

/// Solves from every seed in parallel and returns the largest distance,
/// in either argument order, between two of the limits.
pub fn uniqueness_probe<T, M>(
    map: &T,
    metric: &M,
    cert: &ContractionCertificate,
    seeds: &[Point],
    cfg: &SolverConfig,
) -> Result<f64>
where
    T: SelfMap + ?Sized,
    M: AsymmetricMetric + ?Sized,
{
    if cert.regime != Regime::ForwardGlobal {
        return Err(Error::CertificateInvalid(
            "uniqueness needs a forward global certificate".into(),
        ));
    }
    let reports: Vec<SolverReport> = seeds
        .par_iter()
        .map(|s| picard_solve(map, metric, s, cert, cfg))
        .collect::<Result<_>>()?;
    if let Some(r) = reports.iter().find(|r| r.status != SolveStatus::Converged) {
        return Err(Error::PreconditionNotEstablished(format!(
            "solve did not converge ({:?}) after {} iterations",
            r.status, r.iterations
        )));
    }
    let mut spread = 0.0_f64;
    for (i, a) in reports.iter().enumerate() {
        for b in &reports[i + 1..] {
            let (x, y) = (&a.fixed_point, &b.fixed_point);
            let d = metric.distance(x, y)?.norm(cfg.norm_kind);
            let e = metric.distance(y, x)?.norm(cfg.norm_kind);
            spread = spread.max(d).max(e);
        }
    }
    Ok(spread)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contraction::{
        all_pairs, verify_global, verify_orbital_commuting, verify_orbital_type, Direction,
    };
    use crate::map::{FnMap, MapSpec};
    use crate::metric::{linspace, MetricSpec};

    fn quarter_cert() -> (MetricSpec, ContractionCertificate) {
        let metric = MetricSpec::mat2_split_scaled(0.25).unwrap();
        let a = AlgebraElement::diag(0.5, 0.5).unwrap();
        let pairs = all_pairs(&linspace(-8.0, 8.0, 17));
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
    fn linear_quarter_from_seven() {
        let (metric, cert) = quarter_cert();
        let cfg = SolverConfig {
            record_trace: true,
            ..SolverConfig::default()
        };
        let r = picard_solve(
            &MapSpec::LinearQuarter,
            &metric,
            &Point::Real(7.0),
            &cert,
            &cfg,
        )
        .unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert!(r.iterations <= 25);
        assert!(r.residual_forward <= 1e-10 && r.residual_backward <= 1e-10);
        assert!(r.fixed_point.as_real().unwrap().abs() < 1e-10);
        assert!((r.rate - 0.25).abs() < 1e-15);
        assert!(r.envelope_holds(1e-10));
        // the bound is attained in the limit: 7·4⁻ᵖ
        assert!((r.forward_envelope[0].bound - 7.0).abs() < 1e-12);
        let csv = r.trace_csv().unwrap();
        assert!(csv.starts_with("n,x_n,fwd_step_norm,bwd_step_norm,bound_p\n0,7,"));
    }

    #[test]
    fn fixed_seed_takes_one_iteration() {
        let (metric, cert) = quarter_cert();
        let r = picard_solve(
            &MapSpec::LinearQuarter,
            &metric,
            &Point::Real(0.0),
            &cert,
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(r.iterations, 1);
        assert_eq!(r.residual_forward, 0.0);
        assert_eq!(r.fixed_point, Point::Real(0.0));
    }

    #[test]
    fn max_iter_is_flagged() {
        let (metric, cert) = quarter_cert();
        let cfg = SolverConfig {
            max_iter: 3,
            ..SolverConfig::default()
        };
        let r = picard_solve(
            &MapSpec::LinearQuarter,
            &metric,
            &Point::Real(7.0),
            &cert,
            &cfg,
        )
        .unwrap();
        assert_eq!(r.status, SolveStatus::MaxIterExceeded);
        assert_eq!(r.iterations, 3);
        assert_eq!(r.fixed_point, Point::Real(7.0 / 64.0));
    }

    #[test]
    fn certificate_must_match() {
        let (metric, cert) = quarter_cert();
        let other = MetricSpec::mat2_split();
        let err = picard_solve(
            &MapSpec::LinearQuarter,
            &other,
            &Point::Real(1.0),
            &cert,
            &SolverConfig::default(),
        );
        assert!(matches!(err, Err(Error::CertificateInvalid(_))));
        let mut bad = cert.clone();
        bad.violations = verify_global(
            &MapSpec::Identity,
            &metric,
            &AlgebraElement::diag(0.5, 0.5).unwrap(),
            &[(Point::Real(1.0), Point::Real(0.0))],
            Direction::Forward,
            1e-12,
        )
        .unwrap()
        .violations;
        let err = picard_solve(
            &MapSpec::LinearQuarter,
            &metric,
            &Point::Real(1.0),
            &bad,
            &SolverConfig::default(),
        );
        assert!(matches!(err, Err(Error::CertificateInvalid(_))));
        let cfg = SolverConfig {
            bound_mode: Some(BoundMode::Resolvent),
            ..SolverConfig::default()
        };
        let err = picard_solve(
            &MapSpec::LinearQuarter,
            &metric,
            &Point::Real(1.0),
            &cert,
            &cfg,
        );
        assert!(matches!(err, Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn apriori_bound_values() {
        let d1 = AlgebraElement::diag(4.0, 0.0).unwrap();
        let b = apriori_bound(&d1, 0.5, 2, BoundMode::SquaredCoefficient).unwrap();
        assert!((b - 4.0 / 16.0 / 0.75).abs() < 1e-15);
        let b = apriori_bound(&d1, 0.5, 2, BoundMode::Resolvent).unwrap();
        assert!((b - 4.0 / 4.0 / 0.5).abs() < 1e-15);
        assert_eq!(
            apriori_bound(&d1, 1.0, 0, BoundMode::SquaredCoefficient),
            Err(Error::RateNotLessThanOne(1.0))
        );
        let not_positive = AlgebraElement::diag(-1.0, 0.0).unwrap();
        assert!(matches!(
            apriori_bound(&not_positive, 0.5, 0, BoundMode::SquaredCoefficient),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn orbital_commuting_rate() {
        let metric = MetricSpec::scalar_backward_one();
        let a = AlgebraElement::Scalar(1.0 / 3.0);
        let cert = verify_orbital_commuting(
            &MapSpec::LinearQuarter,
            &metric,
            &a,
            &Point::Real(1.0),
            30,
            1e-12,
        )
        .unwrap();
        let r = picard_solve(
            &MapSpec::LinearQuarter,
            &metric,
            &Point::Real(1.0),
            &cert,
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert_eq!(r.bound_mode, BoundMode::Resolvent);
        assert!((r.rate - 0.5).abs() < 1e-15);
        assert!(r.backward_envelope.is_empty());
        assert!(r.envelope_holds(1e-10));
    }

    #[test]
    fn one_sided_steps_do_not_converge() {
        // forward steps halve, backward steps stay at 1
        let map = FnMap::new("halving-with-jump", |p: &Point| {
            let x = p.as_real().unwrap();
            Ok(Point::Real(if x > 0.0 { x / 2.0 } else { 1.0 }))
        });
        let metric = MetricSpec::scalar_backward_one();
        let a = AlgebraElement::Scalar(0.75);
        let cert = verify_orbital_type(&map, &metric, &a, &Point::Real(1.0), 10, 1e-12).unwrap();
        let cfg = SolverConfig {
            tol: 1e-12,
            max_iter: 2000,
            ..SolverConfig::default()
        };
        let r = picard_solve(&map, &metric, &Point::Real(1.0), &cert, &cfg).unwrap();
        assert_eq!(r.status, SolveStatus::MaxIterExceeded);
        assert_eq!(r.residual_backward, 1.0);
    }

    #[test]
    fn uniqueness_probe_spread() {
        let (metric, cert) = quarter_cert();
        let seeds = [-3.0, 0.5, 7.0].map(Point::Real);
        let spread = uniqueness_probe(
            &MapSpec::LinearQuarter,
            &metric,
            &cert,
            &seeds,
            &SolverConfig::default(),
        )
        .unwrap();
        assert!(spread <= 2e-10, "{spread}");

        let orbital = verify_orbital_type(
            &MapSpec::LinearQuarter,
            &metric,
            &AlgebraElement::diag(0.5, 0.5).unwrap(),
            &Point::Real(1.0),
            5,
            1e-12,
        )
        .unwrap();
        assert!(uniqueness_probe(
            &MapSpec::LinearQuarter,
            &metric,
            &orbital,
            &seeds,
            &SolverConfig::default()
        )
        .is_err());
    }
}
