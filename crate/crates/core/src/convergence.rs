//! Forward and backward convergence of finite sequences.
//!
//! "d(x, xₙ) ⪯ ε" is read with `ε = eps·I`, i.e. as `‖d(x, xₙ)‖ ≤ eps` in the
//! metric's norm. A finite trace is evidence: the verdicts only look at the
//! last `window` points.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::SelfMap;
use crate::metric::{AsymmetricMetric, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Converges,
    Diverges,
    /// The tail exceeds the threshold but is still shrinking, or is too short.
    Inconclusive,
}

/// Distances along a sequence, measured against a candidate limit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceTrace {
    pub metric: String,
    pub candidate: Point,
    pub points: Vec<Point>,
    /// `‖d(x, xₙ)‖` for every `n`.
    pub forward_dists: Vec<f64>,
    /// `‖d(xₙ, x)‖` for every `n`.
    pub backward_dists: Vec<f64>,
    pub window: usize,
    /// For each tail index `n` after the first, `max ‖d(x_p, x_n)‖` over
    /// tail indices `p < n`.
    pub forward_pair_max: Vec<f64>,
    /// Same with `d(x_n, x_p)`.
    pub backward_pair_max: Vec<f64>,
}

impl SequenceTrace {
    pub fn build<M: AsymmetricMetric + ?Sized>(
        metric: &M,
        seq: &[Point],
        candidate: &Point,
        window: usize,
    ) -> Result<Self> {
        if window == 0 || window >= seq.len() {
            return Err(Error::WindowTooLarge {
                window,
                len: seq.len(),
            });
        }
        let forward_dists = seq
            .iter()
            .map(|xn| metric.distance_norm(candidate, xn))
            .collect::<Result<Vec<_>>>()?;
        let backward_dists = seq
            .iter()
            .map(|xn| metric.distance_norm(xn, candidate))
            .collect::<Result<Vec<_>>>()?;

        let tail = &seq[seq.len() - window..];
        let mut forward_pair_max = Vec::with_capacity(window.saturating_sub(1));
        let mut backward_pair_max = Vec::with_capacity(window.saturating_sub(1));
        for n in 1..tail.len() {
            let (mut f, mut b) = (0.0_f64, 0.0_f64);
            for p in 0..n {
                f = f.max(metric.distance_norm(&tail[p], &tail[n])?);
                b = b.max(metric.distance_norm(&tail[n], &tail[p])?);
            }
            forward_pair_max.push(f);
            backward_pair_max.push(b);
        }

        Ok(Self {
            metric: metric.name(),
            candidate: candidate.clone(),
            points: seq.to_vec(),
            forward_dists,
            backward_dists,
            window,
            forward_pair_max,
            backward_pair_max,
        })
    }

    pub fn tail_start(&self) -> usize {
        self.points.len() - self.window
    }

    /// CSV with columns `n, x_n, fwd_norm, bwd_norm`. Function points are
    /// summarized by their sup norm.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,x_n,fwd_norm,bwd_norm\n");
        for (n, p) in self.points.iter().enumerate() {
            let _ = writeln!(
                out,
                "{n},{},{},{}",
                p.summary(),
                self.forward_dists[n],
                self.backward_dists[n]
            );
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceEvidence {
    pub eps: f64,
    pub window: usize,
    pub tail_start: usize,
    pub forward_tail_max: f64,
    pub backward_tail_max: f64,
    pub forward_cauchy_max: Option<f64>,
    pub backward_cauchy_max: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceVerdict {
    pub forward: Verdict,
    pub backward: Verdict,
    pub forward_cauchy: Verdict,
    pub backward_cauchy: Verdict,
    pub evidence: ConvergenceEvidence,
}

fn judge(series: &[f64], eps: f64) -> (Verdict, Option<f64>) {
    let Some(max) = series.iter().copied().reduce(f64::max) else {
        return (Verdict::Inconclusive, None);
    };
    let verdict = if max <= eps {
        Verdict::Converges
    } else if series.last().is_some_and(|&l| l <= eps) || series.windows(2).all(|w| w[1] < w[0]) {
        Verdict::Inconclusive
    } else {
        Verdict::Diverges
    };
    (verdict, Some(max))
}

impl SequenceTrace {
    pub fn verdict(&self, eps: f64) -> ConvergenceVerdict {
        let start = self.tail_start();
        let (forward, fmax) = judge(&self.forward_dists[start..], eps);
        let (backward, bmax) = judge(&self.backward_dists[start..], eps);
        let (forward_cauchy, fc) = judge(&self.forward_pair_max, eps);
        let (backward_cauchy, bc) = judge(&self.backward_pair_max, eps);
        ConvergenceVerdict {
            forward,
            backward,
            forward_cauchy,
            backward_cauchy,
            evidence: ConvergenceEvidence {
                eps,
                window: self.window,
                tail_start: start,
                forward_tail_max: fmax.unwrap_or(f64::NAN),
                backward_tail_max: bmax.unwrap_or(f64::NAN),
                forward_cauchy_max: fc,
                backward_cauchy_max: bc,
            },
        }
    }
}

/// Forward/backward convergence to `candidate` and the two Cauchy
/// conditions, judged on the last `window` points of `seq`.
pub fn classify<M: AsymmetricMetric + ?Sized>(
    seq: &[Point],
    candidate: &Point,
    metric: &M,
    eps: f64,
    window: usize,
) -> Result<ConvergenceVerdict> {
    if !(eps > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "eps must be positive, got {eps}"
        )));
    }
    Ok(SequenceTrace::build(metric, seq, candidate, window)?.verdict(eps))
}

/// Given a sequence that forward-converges to `x` and backward-converges to
/// `y` at `eps/2`, reports whether `‖d(x, y)‖ ≤ eps`. With a genuine
/// asymmetric metric this always holds; `false` points at a broken metric.
pub fn limit_uniqueness_check<M: AsymmetricMetric + ?Sized>(
    seq: &[Point],
    x: &Point,
    y: &Point,
    metric: &M,
    eps: f64,
    window: usize,
) -> Result<bool> {
    let half = eps / 2.0;
    if classify(seq, x, metric, half, window)?.forward != Verdict::Converges {
        return Err(Error::PreconditionNotEstablished(
            "sequence does not forward-converge to x".into(),
        ));
    }
    if classify(seq, y, metric, half, window)?.backward != Verdict::Converges {
        return Err(Error::PreconditionNotEstablished(
            "sequence does not backward-converge to y".into(),
        ));
    }
    Ok(metric.distance_norm(x, y)? <= eps)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LscCheck {
    /// `‖G(x₀)‖ = ‖d(x₀, T x₀)‖`
    pub g0: f64,
    /// Minimum of `‖G(xₙ)‖` over the trailing half of the orbit.
    pub tail_liminf: f64,
    pub tail_len: usize,
    pub holds: bool,
}

/// Forward orbital lower semicontinuity of `G(x) = d(x, Tx)` at `x0`,
/// estimated on a finite orbit.
pub fn orbital_lsc_check<T, M>(
    orbit: &[Point],
    x0: &Point,
    map: &T,
    metric: &M,
    tol: f64,
) -> Result<LscCheck>
where
    T: SelfMap + ?Sized,
    M: AsymmetricMetric + ?Sized,
{
    if orbit.is_empty() {
        return Err(Error::InvalidConfig("orbit is empty".into()));
    }
    let g = |p: &Point| -> Result<f64> { metric.distance_norm(p, &map.apply(p)?) };
    let g0 = g(x0)?;
    let tail = &orbit[orbit.len() / 2..];
    let mut tail_liminf = f64::INFINITY;
    for p in tail {
        tail_liminf = tail_liminf.min(g(p)?);
    }
    Ok(LscCheck {
        g0,
        tail_liminf,
        tail_len: tail.len(),
        holds: g0 <= tail_liminf + tol,
    })
}
