//! Subcommand arguments and their handlers.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{ArgGroup, Args, ValueEnum};
use quasifix_core::{
    all_pairs, check_axioms, regime_report, run_demo, search_scalar_coefficient,
    verify_certificate, AsymmetricMetric, BoundMode, ContractionCertificate, IntegralProblem,
    Regime, SearchTarget, SelfMap, SequenceTrace, SolveStatus, SolverConfig, DEFAULT_TOL,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::inputs::{
    parse_coefficient, parse_grid, read_sequence, GlobalOpts, MapArgs, MetricArgs, QuadratureArg,
};
use crate::manifest::{read_input, write_output, RunManifest};
use crate::{gallery, usage, Cli, Command, EXIT_FAILURE, EXIT_OK};

/// Default tolerance for certificate checks.
pub const CERTIFY_TOL: f64 = 1e-12;
/// Default stopping tolerance for `solve`.
pub const SOLVE_TOL: f64 = 1e-10;
/// Default stopping tolerance for `demo-integral`.
pub const DEMO_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Args, Serialize)]
pub struct CheckAxiomsArgs {
    #[command(flatten)]
    pub metric: MetricArgs,
    /// Sample points: `start:stop:n` or a comma list.
    #[arg(long, default_value = "-2:2:9", allow_hyphen_values = true)]
    pub grid: String,
    /// Extra points drawn uniformly from the grid's range.
    #[arg(long, default_value_t = 0)]
    pub random: usize,
    /// Write the JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub metric: MetricArgs,
    /// A file of numbers, or an inline comma list.
    #[arg(long, allow_hyphen_values = true)]
    pub seq: String,
    #[arg(long, allow_hyphen_values = true)]
    pub candidate: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    /// Tail length judged; defaults to half the sequence.
    #[arg(long)]
    pub window: Option<usize>,
    /// Write per-index distances as CSV here.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeArg {
    Forward,
    Backward,
    Orbital,
    OrbitalCommuting,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Forward => Regime::ForwardGlobal,
            RegimeArg::Backward => Regime::BackwardGlobal,
            RegimeArg::Orbital => Regime::OrbitalType,
            RegimeArg::OrbitalCommuting => Regime::OrbitalCommuting,
        }
    }
}

#[derive(Clone, Debug, Args, Serialize)]
#[command(group(ArgGroup::new("coefficient").required(true).args(["a", "search"])))]
pub struct CertifyArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    pub metric: MetricArgs,
    #[arg(long, value_enum)]
    pub regime: RegimeArg,
    /// Coefficient: a number `c` for `c·1`, inline JSON, or a JSON file.
    #[arg(long)]
    pub a: Option<String>,
    /// Search for the smallest admissible `c·1` instead.
    #[arg(long)]
    pub search: bool,
    /// Points whose pairs the global regimes are checked on.
    #[arg(long, default_value = "-2:2:9", allow_hyphen_values = true)]
    pub grid: String,
    /// Orbit seed for the orbital regimes.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub seed: f64,
    #[arg(long, default_value_t = 30)]
    pub orbit_len: usize,
    /// Write the certificate here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundModeArg {
    SquaredCoefficient,
    Resolvent,
}

impl From<BoundModeArg> for BoundMode {
    fn from(b: BoundModeArg) -> Self {
        match b {
            BoundModeArg::SquaredCoefficient => BoundMode::SquaredCoefficient,
            BoundModeArg::Resolvent => BoundMode::Resolvent,
        }
    }
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct SolveArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    pub metric: MetricArgs,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub seed: f64,
    /// Certificate file written by `certify`.
    #[arg(long)]
    pub cert: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    /// Must match the certificate when given.
    #[arg(long, value_enum)]
    pub bound_mode: Option<BoundModeArg>,
    /// Write the orbit as CSV here.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct DemoArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub k: f64,
    /// Number of samples of `(0, 1]`.
    #[arg(long, default_value_t = 2048)]
    pub grid: usize,
    #[arg(long, value_enum, default_value_t = QuadratureArg::Trapezoid)]
    pub quadrature: QuadratureArg,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Write `x, f*(x)` as CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct GalleryArgs {
    #[arg(long)]
    pub report: Option<PathBuf>,
}

pub fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let mut manifest = RunManifest::new(cli.command.name(), cli)?;
    let g = &cli.global;
    match &cli.command {
        Command::CheckAxioms(a) => check_axioms_cmd(a, g, &mut manifest, out),
        Command::Classify(a) => classify_cmd(a, g, &mut manifest, out),
        Command::Certify(a) => certify_cmd(a, g, &mut manifest, out),
        Command::Solve(a) => solve_cmd(a, g, &mut manifest, out),
        Command::DemoIntegral(a) => demo_cmd(a, g, &mut manifest, out),
        Command::Gallery(a) => gallery_cmd(a, g, &manifest, out),
    }
}

fn to_json(value: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn write_report(
    g: &GlobalOpts,
    path: Option<&Path>,
    body: serde_json::Value,
    out: &mut dyn Write,
) -> Result<()> {
    if let Some(path) = path {
        let written = write_output(g.out_dir.as_deref(), path, &to_json(&body)?)?;
        writeln!(out, "report written to {}", written.display())?;
    }
    Ok(())
}

fn write_csv(g: &GlobalOpts, path: Option<&Path>, csv: &str, out: &mut dyn Write) -> Result<()> {
    if let Some(path) = path {
        let written = write_output(g.out_dir.as_deref(), path, csv)?;
        writeln!(out, "csv written to {}", written.display())?;
    }
    Ok(())
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "VIOLATED"
    }
}

fn check_axioms_cmd(
    a: &CheckAxiomsArgs,
    g: &GlobalOpts,
    manifest: &mut RunManifest,
    out: &mut dyn Write,
) -> Result<i32> {
    let tol = g.tol_or(DEFAULT_TOL)?;
    let metric = a.metric.build(g)?;
    let mut values = parse_grid(&a.grid)?;
    if a.random > 0 {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut rng = ChaCha8Rng::seed_from_u64(g.seed_rng);
        values.extend((0..a.random).map(|_| if hi > lo { rng.gen_range(lo..=hi) } else { lo }));
    }
    let points = a.metric.points(&values)?;
    let report = check_axioms(&metric, &points, tol)?;

    writeln!(out, "metric            {}", report.metric)?;
    writeln!(out, "points            {}", report.points)?;
    writeln!(out, "triples tested    {}", report.triples_tested)?;
    writeln!(out, "positivity        {}", yes_no(report.positivity_ok))?;
    writeln!(out, "identity          {}", yes_no(report.identity_ok))?;
    writeln!(out, "triangle          {}", yes_no(report.triangle_ok))?;
    match &report.asymmetry_witness {
        Some((x, y)) => writeln!(out, "asymmetry witness ({}, {})", x.summary(), y.summary())?,
        None => writeln!(out, "asymmetry witness none")?,
    }
    writeln!(out, "violations        {}", report.violation_count())?;
    write_report(
        g,
        a.report.as_deref(),
        json!({ "manifest": manifest, "report": report }),
        out,
    )?;
    Ok(if report.passed() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}

fn classify_cmd(
    a: &ClassifyArgs,
    g: &GlobalOpts,
    manifest: &mut RunManifest,
    out: &mut dyn Write,
) -> Result<i32> {
    let metric = a.metric.build(g)?;
    let values = read_sequence(&a.seq, manifest)?;
    let seq = a.metric.points(&values)?;
    let candidate = a.metric.point(a.candidate)?;
    if !(a.eps > 0.0) {
        return Err(usage("--eps must be positive"));
    }
    let window = a.window.unwrap_or((seq.len() / 2).max(1));
    let trace = SequenceTrace::build(&metric, &seq, &candidate, window)?;
    let verdict = trace.verdict(a.eps);

    writeln!(out, "metric           {}", metric.name())?;
    writeln!(out, "forward          {:?}", verdict.forward)?;
    writeln!(out, "backward         {:?}", verdict.backward)?;
    writeln!(out, "forward cauchy   {:?}", verdict.forward_cauchy)?;
    writeln!(out, "backward cauchy  {:?}", verdict.backward_cauchy)?;
    write_csv(g, a.trace.as_deref(), &trace.to_csv(), out)?;
    write_report(
        g,
        a.report.as_deref(),
        json!({ "manifest": manifest, "verdict": verdict }),
        out,
    )?;
    Ok(EXIT_OK)
}

fn certify_cmd(
    a: &CertifyArgs,
    g: &GlobalOpts,
    manifest: &mut RunManifest,
    out: &mut dyn Write,
) -> Result<i32> {
    let tol = g.tol_or(CERTIFY_TOL)?;
    let metric = a.metric.build(g)?;
    let map = a.map.build(&a.metric, manifest)?;
    let regime: Regime = a.regime.into();
    let target = if regime.is_orbital() {
        SearchTarget::Orbit {
            seed: a.metric.point(a.seed)?,
            len: a.orbit_len,
        }
    } else {
        SearchTarget::Pairs(all_pairs(&a.metric.points(&parse_grid(&a.grid)?)?))
    };
    let sample = a.metric.point(a.seed)?;
    let cert = match (&a.a, a.search) {
        (_, true) => search_scalar_coefficient(&map, &metric, regime, &target, tol)?,
        (Some(arg), false) => {
            let coef = parse_coefficient(arg, &metric, &sample, manifest)?;
            Some(verify_certificate(
                &map, &metric, regime, &target, &coef, tol,
            )?)
        }
        (None, false) => return Err(usage("give --a or --search")),
    };
    let Some(cert) = cert else {
        writeln!(
            out,
            "no certificate found for {} under {}",
            map.name(),
            metric.name()
        )?;
        return Ok(EXIT_FAILURE);
    };

    let body = json!({ "manifest": manifest, "certificate": cert });
    match &a.out {
        Some(path) => {
            let written = write_output(g.out_dir.as_deref(), path, &to_json(&body)?)?;
            writeln!(
                out,
                "regime        {}",
                serde_json::to_value(cert.regime)?.as_str().unwrap_or("")
            )?;
            writeln!(
                out,
                "coefficient   {} ({} norm {})",
                cert.a_operator_norm,
                norm_label(&cert),
                cert.a_norm
            )?;
            writeln!(out, "samples       {}", cert.samples_checked)?;
            writeln!(out, "violations    {}", cert.violations.len())?;
            writeln!(out, "valid         {}", cert.is_valid())?;
            writeln!(out, "certificate written to {}", written.display())?;
        }
        None => write!(out, "{}", to_json(&body)?)?,
    }
    Ok(if cert.is_valid() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}

fn norm_label(cert: &ContractionCertificate) -> String {
    serde_json::to_value(cert.norm_kind)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// Accepts `{"manifest", "certificate"}` or a bare certificate.
fn load_certificate(path: &Path, manifest: &mut RunManifest) -> Result<ContractionCertificate> {
    let text = read_input(manifest, path)?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    if let Some(inner) = value.get_mut("certificate") {
        value = inner.take();
    }
    serde_json::from_value(value).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn solve_cmd(
    a: &SolveArgs,
    g: &GlobalOpts,
    manifest: &mut RunManifest,
    out: &mut dyn Write,
) -> Result<i32> {
    let tol = g.tol_or(SOLVE_TOL)?;
    let metric = a.metric.build(g)?;
    let map = a.map.build(&a.metric, manifest)?;
    let cert = load_certificate(&a.cert, manifest)?;
    let seed = a.metric.point(a.seed)?;
    let cfg = SolverConfig {
        max_iter: a.max_iter,
        tol,
        norm_kind: g.norm.into(),
        bound_mode: a.bound_mode.map(Into::into),
        record_trace: a.trace.is_some(),
    };
    let report = quasifix_core::picard_solve(&map, &metric, &seed, &cert, &cfg)?;

    writeln!(out, "status           {:?}", report.status)?;
    writeln!(out, "iterations       {}", report.iterations)?;
    writeln!(out, "fixed point      {}", report.fixed_point.summary())?;
    writeln!(out, "residual fwd     {:e}", report.residual_forward)?;
    writeln!(out, "residual bwd     {:e}", report.residual_backward)?;
    writeln!(out, "rate             {}", report.rate)?;
    writeln!(
        out,
        "envelope         {}",
        yes_no(report.envelope_holds(tol))
    )?;
    if let Some(csv) = report.trace_csv() {
        write_csv(g, a.trace.as_deref(), &csv, out)?;
    }
    write_report(
        g,
        a.report.as_deref(),
        json!({ "manifest": manifest, "report": report }),
        out,
    )?;
    Ok(if report.status == SolveStatus::Converged {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}

fn demo_cmd(
    a: &DemoArgs,
    g: &GlobalOpts,
    manifest: &mut RunManifest,
    out: &mut dyn Write,
) -> Result<i32> {
    let tol = g.tol_or(DEMO_TOL)?;
    let prob = IntegralProblem::uniform(a.alpha, a.k, a.grid, a.quadrature.into())?;
    let pre = regime_report(&prob)?;
    let regime = serde_json::to_value(pre.regime)?;
    let regime = regime.as_str().unwrap_or("");
    writeln!(out, "regime           {regime}")?;
    writeln!(out, "lambda           {}", pre.lambda)?;
    writeln!(out, "growth           {}", pre.growth)?;
    if !pre.regime.is_contractive() {
        writeln!(out, "lambda >= 1: no contraction certificate, not solving")?;
        write_report(
            g,
            a.report.as_deref(),
            json!({ "manifest": manifest, "report": pre }),
            out,
        )?;
        return Ok(EXIT_FAILURE);
    }
    let cfg = SolverConfig {
        max_iter: a.max_iter,
        tol,
        ..SolverConfig::default()
    };
    let report = run_demo(&prob, &cfg)?;
    let solve = report.solve.as_ref().context("demo produced no solve")?;
    writeln!(out, "status           {:?}", solve.status)?;
    writeln!(out, "iterations       {}", solve.iterations)?;
    writeln!(out, "equation resid.  {:e}", solve.equation_residual)?;
    writeln!(out, "sup |f*|         {:e}", solve.fixed_point_sup)?;
    write_csv(g, a.csv.as_deref(), &solve.to_csv(), out)?;
    let ok = solve.status == SolveStatus::Converged && solve.equation_ok;
    write_report(
        g,
        a.report.as_deref(),
        json!({ "manifest": manifest, "report": report }),
        out,
    )?;
    Ok(if ok { EXIT_OK } else { EXIT_FAILURE })
}

fn gallery_cmd(
    a: &GalleryArgs,
    g: &GlobalOpts,
    manifest: &RunManifest,
    out: &mut dyn Write,
) -> Result<i32> {
    let results = gallery::run_all();
    for r in &results {
        writeln!(out, "{r}")?;
    }
    let summary = gallery::Summary::of(&results);
    writeln!(out, "{summary}")?;
    write_report(
        g,
        a.report.as_deref(),
        json!({ "manifest": manifest, "fixtures": results, "summary": summary }),
        out,
    )?;
    Ok(if summary.ok() { EXIT_OK } else { EXIT_FAILURE })
}
