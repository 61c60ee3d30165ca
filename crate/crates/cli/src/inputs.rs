//! Building metrics, maps, points and coefficients from arguments.

use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::{Args, ValueEnum};
use quasifix_core::{
    AlgebraElement, AsymmetricMetric, Grid, IntegralProblem, MapSpec, MetricSpec, NormKind,
    OrderKind, Point, Quadrature, SampledFn,
};
use serde::Serialize;

use crate::manifest::{read_input, RunManifest};
use crate::usage;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormArg {
    Operator,
    EntrySumSquares,
}

impl From<NormArg> for NormKind {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::Operator => NormKind::Operator,
            NormArg::EntrySumSquares => NormKind::EntrySumSquares,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderArg {
    Cone,
    Entrywise,
}

impl From<OrderArg> for OrderKind {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Cone => OrderKind::PositiveCone,
            OrderArg::Entrywise => OrderKind::Entrywise,
        }
    }
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct GlobalOpts {
    /// Seed for any random sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed_rng: u64,
    /// Comparison tolerance; each command has its own default.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Norm used to report algebra elements.
    #[arg(long, global = true, value_enum, default_value_t = NormArg::Operator)]
    pub norm: NormArg,
    /// Partial order on the algebra.
    #[arg(long, global = true, value_enum, default_value_t = OrderArg::Cone)]
    pub order: OrderArg,
    /// Directory that relative output paths are written under.
    #[arg(long, global = true, env = "QUASIFIX_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
}

impl GlobalOpts {
    pub fn tol_or(&self, default: f64) -> Result<f64> {
        let tol = self.tol.unwrap_or(default);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(usage(format!("--tol must be positive, got {tol}")));
        }
        Ok(tol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricName {
    Mat2Split,
    Mat2SplitScaled,
    Periodic,
    ScalarForwardOne,
    ScalarBackwardOne,
    MultOp,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct MetricArgs {
    #[arg(long, value_enum)]
    pub metric: MetricName,
    /// Scale of the lower block for `mat2-split-scaled`.
    #[arg(long, default_value_t = 0.25)]
    pub beta: f64,
    /// Period `T` for `periodic`.
    #[arg(long, default_value_t = 1.0)]
    pub period: f64,
    /// Samples of `[0, T)` for `periodic`.
    #[arg(long, default_value_t = 64)]
    pub t_samples: usize,
    /// Samples of `(0, 1]` for `mult-op` points and the integral map.
    #[arg(long, default_value_t = 64)]
    pub fn_samples: usize,
    /// Use the conjugate metric `d(y, x)`.
    #[arg(long)]
    pub dual: bool,
}

impl MetricArgs {
    pub fn build(&self, global: &GlobalOpts) -> Result<MetricSpec> {
        let base = match self.metric {
            MetricName::Mat2Split => MetricSpec::mat2_split(),
            MetricName::Mat2SplitScaled => MetricSpec::mat2_split_scaled(self.beta)?,
            MetricName::Periodic => MetricSpec::periodic(self.period, self.t_samples)?,
            MetricName::ScalarForwardOne => MetricSpec::scalar_forward_one(),
            MetricName::ScalarBackwardOne => MetricSpec::scalar_backward_one(),
            MetricName::MultOp => MetricSpec::mult_op(self.fn_grid()?),
        };
        let m = base
            .with_norm(global.norm.into())
            .with_order(global.order.into());
        Ok(if self.dual { m.dual() } else { m })
    }

    pub fn fn_grid(&self) -> Result<Grid> {
        if self.fn_samples == 0 {
            return Err(usage("--fn-samples must be positive"));
        }
        Ok(Grid::unit_interval(self.fn_samples)?)
    }

    /// The point named by `v`: the real `v`, or `t ↦ v·t` for `mult-op`.
    pub fn point(&self, v: f64) -> Result<Point> {
        if !v.is_finite() {
            return Err(usage(format!("point {v} is not finite")));
        }
        Ok(match self.metric {
            MetricName::MultOp => Point::Func(SampledFn::from_fn(&self.fn_grid()?, |t| v * t)?),
            _ => Point::Real(v),
        })
    }

    pub fn points(&self, vs: &[f64]) -> Result<Vec<Point>> {
        vs.iter().map(|&v| self.point(v)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapName {
    LinearQuarter,
    PiecewiseQuarter,
    Identity,
    Integral,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureArg {
    Trapezoid,
    MidpointLog,
}

impl From<QuadratureArg> for Quadrature {
    fn from(q: QuadratureArg) -> Self {
        match q {
            QuadratureArg::Trapezoid => Quadrature::Trapezoid,
            QuadratureArg::MidpointLog => Quadrature::MidpointLog,
        }
    }
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct MapArgs {
    #[arg(long, value_enum)]
    pub map: MapName,
    /// JSON file `[[x, T(x)], ...]` for `--map table`.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Kernel scale for `--map integral`.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Kernel shift for `--map integral`.
    #[arg(long, default_value_t = 4.0)]
    pub k: f64,
    #[arg(long, value_enum, default_value_t = QuadratureArg::Trapezoid)]
    pub quadrature: QuadratureArg,
}

impl MapArgs {
    pub fn build(&self, metric: &MetricArgs, manifest: &mut RunManifest) -> Result<MapSpec> {
        Ok(match self.map {
            MapName::LinearQuarter => MapSpec::LinearQuarter,
            MapName::PiecewiseQuarter => MapSpec::PiecewiseQuarter,
            MapName::Identity => MapSpec::Identity,
            MapName::Integral => MapSpec::IntegralOp(IntegralProblem::new(
                self.alpha,
                self.k,
                metric.fn_grid()?,
                self.quadrature.into(),
            )?),
            MapName::Table => {
                let path = self
                    .table
                    .as_ref()
                    .ok_or_else(|| usage("--map table needs --table"))?;
                let text = read_input(manifest, path)?;
                let table: Vec<(f64, f64)> = serde_json::from_str(&text)
                    .map_err(|e| usage(format!("{}: {e}", path.display())))?;
                MapSpec::UserTable(table)
            }
        })
    }
}

/// Parses `start:stop:n` (inclusive, evenly spaced) or `a,b,c`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = |detail: &str| usage(format!("bad grid '{spec}': {detail}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let values = match parts.as_slice() {
        [start, stop, n] => {
            let start: f64 = start.trim().parse().map_err(|_| bad("start"))?;
            let stop: f64 = stop.trim().parse().map_err(|_| bad("stop"))?;
            let n: usize = n.trim().parse().map_err(|_| bad("count"))?;
            if n == 0 {
                return Err(bad("count must be positive"));
            }
            if n == 1 {
                vec![start]
            } else {
                let h = (stop - start) / (n - 1) as f64;
                (0..n)
                    .map(|i| {
                        if i == n - 1 {
                            stop
                        } else {
                            start + h * i as f64
                        }
                    })
                    .collect()
            }
        }
        [list] => parse_numbers(list).map_err(|_| bad("expected numbers"))?,
        _ => return Err(bad("expected start:stop:n or a comma list")),
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(bad("need finite values"));
    }
    Ok(values)
}

/// Numbers separated by commas, whitespace or newlines.
pub fn parse_numbers(text: &str) -> std::result::Result<Vec<f64>, std::num::ParseFloatError> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

/// Values from a file when `arg` names one, otherwise from the inline list.
pub fn read_sequence(arg: &str, manifest: &mut RunManifest) -> Result<Vec<f64>> {
    let text = if Path::new(arg).is_file() {
        read_input(manifest, Path::new(arg))?
    } else {
        arg.to_string()
    };
    let values = parse_numbers(&text).map_err(|e| usage(format!("bad sequence: {e}")))?;
    if values.is_empty() {
        return Err(usage("sequence is empty"));
    }
    Ok(values)
}

/// Coefficient from a number `c` (meaning `c·1` in the metric's algebra),
/// inline JSON, or a JSON file.
pub fn parse_coefficient(
    arg: &str,
    metric: &MetricSpec,
    sample: &Point,
    manifest: &mut RunManifest,
) -> Result<AlgebraElement> {
    if let Ok(c) = arg.trim().parse::<f64>() {
        let unit = metric.distance(sample, sample)?.unit_like();
        return Ok(unit.scale(c));
    }
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        read_input(manifest, Path::new(arg))?
    };
    serde_json::from_str(&text).map_err(|e| usage(format!("bad coefficient: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_range_is_inclusive() {
        assert_eq!(
            parse_grid("-1:1:5").unwrap(),
            vec![-1.0, -0.5, 0.0, 0.5, 1.0]
        );
        assert_eq!(parse_grid("3:4:1").unwrap(), vec![3.0]);
    }

    #[test]
    fn grid_list() {
        assert_eq!(parse_grid("0, 0.25,0.5").unwrap(), vec![0.0, 0.25, 0.5]);
    }

    #[test]
    fn bad_grids_are_usage_errors() {
        for spec in ["", "1:2", "a:b:3", "0:1:0", "1:2:3:4", "nan"] {
            let e = parse_grid(spec).unwrap_err();
            assert!(e.is::<crate::UsageError>(), "{spec}");
        }
    }

    #[test]
    fn numbers_accept_mixed_separators() {
        assert_eq!(
            parse_numbers("1,2\n3 4\t5\n").unwrap(),
            vec![1.0, 2.0, 3.0, 4.0, 5.0]
        );
    }
}
