use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use ricci_lab_core::flow::{
    g2_monitor, integral_evolution_check, integrate_flow, pointwise_evolution_check, FlowConfig, FlowState,
    FlowTrace, IdentityCheck, MonitorRecord,
};
use ricci_lab_core::inequality::{run_campaign, FuzzConfig, FuzzReport};
use ricci_lab_core::invariants::{
    conformal_check, global_report, global_report_with, pinch_suite, ConformalCheck, InvariantReport, ReportOptions,
};
use ricci_lab_core::zoo::{ChartGeometry, ChartMetric, ConformalFactor, Family, MetricModel};

use crate::error::{CliError, CliResult};
use crate::output::{self, Format};
use crate::spec::MetricSpec;

#[derive(Debug, Parser)]
#[command(name = "ricci-lab", version, about = "Conformal curvature invariants and homogeneous Ricci flow in dimension four")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Global curvature integrals, Euler characteristic, signature and beta.
    Invariants {
        #[command(flatten)]
        metric: MetricArgs,
        /// Also recompute chart models at half the finite-difference step.
        #[arg(long)]
        refine: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// beta = int |W|^2 / int sigma_2 and its regime.
    Beta {
        #[command(flatten)]
        metric: MetricArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Ricci flow of a homogeneous model; CSV trace by default.
    Flow {
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long, default_value_t = 1e-3, value_parser = positive)]
        dt: f64,
        #[arg(long, default_value_t = 0.4, value_parser = positive)]
        t_max: f64,
        /// Rescale to constant volume after every step.
        #[arg(long)]
        normalized: bool,
        /// Constants a,b of the int G_2 monitor.
        #[arg(long, value_parser = pair, value_name = "A,B")]
        monitor: Option<[f64; 2]>,
        /// Where the monitor JSON goes when the trace is written as CSV.
        #[arg(long)]
        monitor_out: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Randomized campaign over the pointwise algebraic inequalities.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 1.0, value_parser = positive)]
        scale: f64,
        /// Tightest witnesses kept per inequality.
        #[arg(long, default_value_t = 5)]
        top_k: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compares int sigma_2, int |W|^2 and beta before and after g -> e^{2w} g on a chart.
    ConformalCheck {
        /// Chart spec (chart_s4, chart_s2s2, or a conformal spec whose w is used); unit S^4 chart if omitted.
        #[arg(long)]
        metric: Option<String>,
        #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
        grid: u64,
        /// Seed of the first random factor.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Number of random factors, seeds seed, seed+1, ...
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, default_value_t = 0.3, value_parser = positive)]
        amplitude: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Pinching estimates near beta = 4.
    Pinch {
        #[command(flatten)]
        metric: MetricArgs,
        /// Externally known value of mu_+ for the corresponding bound.
        #[arg(long, allow_negative_numbers = true)]
        mu_plus: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    /// JSON metric spec, inline or a file path.
    #[arg(long)]
    pub metric: String,
    /// Quadrature nodes per axis for chart models.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub grid: Option<u64>,
}

impl MetricArgs {
    fn model(&self) -> CliResult<MetricModel> {
        MetricSpec::from_arg(&self.metric)?.model(self.grid.map(|g| g as usize))
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to a file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Exit with status 2 when a check fails.
    #[arg(long)]
    pub strict: bool,
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a positive number, got {s}"))
    }
}

fn pair(s: &str) -> Result<[f64; 2], String> {
    match s.split(',').map(positive).collect::<Result<Vec<_>, _>>()?.as_slice() {
        &[a, b] => Ok([a, b]),
        _ => Err(format!("expected two comma-separated numbers, got {s}")),
    }
}

/// Rendered output and whether any check failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub failed: bool,
}

impl Command {
    pub fn output(&self) -> &OutputArgs {
        match self {
            Command::Invariants { out, .. }
            | Command::Beta { out, .. }
            | Command::Flow { out, .. }
            | Command::Fuzz { out, .. }
            | Command::ConformalCheck { out, .. }
            | Command::Pinch { out, .. } => out,
        }
    }
}

pub fn run(cmd: &Command) -> CliResult<Outcome> {
    let format = cmd.output().format;
    match cmd {
        Command::Invariants { metric, refine, .. } => {
            let report = global_report_with(&metric.model()?, ReportOptions { step_refinement: *refine })?;
            let failed = report.euler_residual.abs() > report.tolerance * 8.0
                || report.signature_residual.abs() > report.tolerance * 8.0;
            Ok(Outcome { text: output::render(&report, format.unwrap_or(Format::Json))?, failed })
        }
        Command::Beta { metric, .. } => {
            let out = BetaOutput::from(global_report(&metric.model()?)?);
            let failed = out.beta.is_none();
            let text = match format.unwrap_or(Format::Json) {
                Format::Pretty => out.pretty(),
                f => output::render(&out, f)?,
            };
            Ok(Outcome { text, failed })
        }
        Command::Flow { metric, dt, t_max, normalized, monitor, monitor_out, .. } => {
            let s0 = FlowState::from_model(&metric.model()?)?;
            let cfg = FlowConfig { dt: *dt, t_max: *t_max, normalized: *normalized, ..FlowConfig::default() };
            let trace = integrate_flow(&s0, &cfg)?;
            let checks: Vec<IdentityCheck> =
                pointwise_evolution_check(&trace)?.into_iter().chain(integral_evolution_check(&trace)?).collect();
            let monitor = monitor.map(|[a, b]| g2_monitor(&trace, a, b)).transpose()?;
            let failed =
                checks.iter().any(|c| !c.passed) || monitor.as_ref().is_some_and(|m| m.bound_violations > 0);
            let text = match format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    if let Some(m) = &monitor {
                        let Some(path) = monitor_out else {
                            return Err(CliError::Usage("--monitor with CSV output needs --monitor-out".into()));
                        };
                        std::fs::write(path, output::json(m)?)?;
                    }
                    flow_csv(&trace, &checks)?
                }
                Format::Json => output::json(&FlowOutput::new(&trace, &checks, monitor))?,
                Format::Pretty => output::pretty(&FlowSummary::new(&trace, &checks, monitor))?,
            };
            Ok(Outcome { text, failed })
        }
        Command::Fuzz { seed, samples, scale, top_k, .. } => {
            let cfg = FuzzConfig { seed: *seed, samples: *samples, scale: *scale, report_top_k: *top_k };
            let report = run_campaign(&cfg)?;
            let text = match format.unwrap_or(Format::Json) {
                Format::Json => output::json(&report)?,
                Format::Csv => witnesses_csv(&report)?,
                Format::Pretty => output::pretty(&FuzzSummary::from(&report))?,
            };
            Ok(Outcome { text, failed: !report.passed() })
        }
        Command::ConformalCheck { metric, grid, seed, count, amplitude, .. } => {
            let (chart, supplied) = match metric {
                None => (ChartMetric::new(ChartGeometry::S4Angles { radius: 1.0 }), None),
                Some(arg) => conformal_target(&MetricSpec::from_arg(arg)?)?,
            };
            let chart = chart.with_grid(*grid as usize);
            let mut runs = Vec::new();
            match supplied {
                Some(w) => runs.push(ConformalRun { seed: None, check: conformal_check(&chart, &w)? }),
                None => {
                    for s in *seed..seed.saturating_add(*count) {
                        let w = ConformalFactor::random(s, *amplitude, chart.geometry.embedding_dim());
                        runs.push(ConformalRun { seed: Some(s), check: conformal_check(&chart, &w)? });
                    }
                }
            }
            let out = ConformalOutput { grid: *grid, passed: runs.iter().all(|r| r.check.passed), runs };
            Ok(Outcome { text: output::render(&out, format.unwrap_or(Format::Json))?, failed: !out.passed })
        }
        Command::Pinch { metric, mu_plus, .. } => {
            let rec = pinch_suite(&metric.model()?, *mu_plus)?;
            let bounds = [Some(rec.traceless_ricci_bound), Some(rec.sigma2_bound), rec.yamabe_bound, rec.scalar_deviation_bound, rec.mu_plus_bound];
            let failed = bounds.iter().flatten().any(|b| !b.holds);
            Ok(Outcome { text: output::render(&rec, format.unwrap_or(Format::Json))?, failed })
        }
    }
}

/// Base chart and, for conformal specs, the supplied factor.
fn conformal_target(spec: &MetricSpec) -> CliResult<(ChartMetric, Option<ConformalFactor>)> {
    match spec {
        MetricSpec::RoundS4 { r } => Ok((ChartMetric::new(ChartGeometry::S4Angles { radius: *r }), None)),
        MetricSpec::Conformal { base, w } => {
            let chart = base.chart(None)?;
            Ok((chart, Some(w.build(&chart.geometry)?)))
        }
        other => {
            let mut chart = other.chart(None)?;
            let w = chart.factor.take();
            Ok((chart, w))
        }
    }
}

#[derive(Debug, Serialize)]
struct BetaOutput {
    beta: Option<f64>,
    regime: Option<String>,
    total_sigma2: f64,
    total_weyl_sq: f64,
    tolerance: f64,
}

impl From<InvariantReport> for BetaOutput {
    fn from(r: InvariantReport) -> Self {
        Self {
            beta: r.beta,
            regime: r.regime,
            total_sigma2: r.total_sigma2,
            total_weyl_sq: r.total_weyl_sq,
            tolerance: r.tolerance,
        }
    }
}

impl BetaOutput {
    fn pretty(&self) -> String {
        match (self.beta, &self.regime) {
            (Some(b), Some(regime)) => format!("beta = {}  ({regime})\n", output::pretty_float(b)),
            _ => format!("beta undefined: int sigma_2 = {} <= 0\n", output::pretty_float(self.total_sigma2)),
        }
    }
}

fn param_names(family: Family) -> &'static [&'static str] {
    match family {
        Family::RoundS4 => &["r2"],
        Family::ProductS2S2 => &["a2", "b2"],
        Family::FubiniStudy => &["s"],
    }
}

const TRACE_COLUMNS: [&str; 10] =
    ["R", "Vol", "int_E2", "int_R_dev2", "int_Wminus2", "int_Fplus_neg2", "int_G2", "int_G3", "int_G4", "int_E3"];

fn slug(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '+' || c == '-' { c } else { '_' }).collect()
}

fn flow_csv(trace: &FlowTrace, checks: &[IdentityCheck]) -> CliResult<String> {
    let family = trace.snapshots[0].state.family;
    let mut header = vec!["t".to_string()];
    header.extend(param_names(family).iter().map(|s| s.to_string()));
    header.extend(TRACE_COLUMNS.iter().map(|s| s.to_string()));
    header.extend(checks.iter().map(|c| format!("res_{}", slug(&c.name))));
    let f = output::machine_float;
    let rows: Vec<Vec<String>> = trace
        .snapshots
        .iter()
        .enumerate()
        .map(|(n, s)| {
            let r = &s.report;
            let mut row = vec![f(s.state.t)];
            row.extend(s.state.parameters().iter().map(|&p| f(p)));
            row.extend(
                [
                    s.mean_scalar,
                    s.volume,
                    r.total_traceless_ricci_sq,
                    r.total_scalar_deviation_sq,
                    r.total_weyl_minus_sq,
                    r.total_f_plus_negative_sq,
                    s.total_g2,
                    s.total_g3,
                    s.total_g4,
                    s.total_e3,
                ]
                .map(f),
            );
            row.extend(checks.iter().map(|c| f(c.rows[n].residual)));
            row
        })
        .collect();
    output::csv_table(&header, &rows)
}

#[derive(Debug, Serialize)]
struct TraceRow {
    t: f64,
    parameters: Vec<f64>,
    mean_scalar: f64,
    volume: f64,
    total_traceless_ricci_sq: f64,
    total_scalar_deviation_sq: f64,
    total_weyl_minus_sq: f64,
    total_f_plus_negative_sq: f64,
    total_g2: f64,
    total_g3: f64,
    total_g4: f64,
    total_e3: f64,
}

#[derive(Debug, Serialize)]
struct CheckSummary {
    name: String,
    kind: ricci_lab_core::flow::CheckKind,
    max_residual: f64,
    scale: f64,
    max_excess_violation: f64,
    passed: bool,
}

impl From<&IdentityCheck> for CheckSummary {
    fn from(c: &IdentityCheck) -> Self {
        Self {
            name: c.name.clone(),
            kind: c.kind,
            max_residual: c.max_residual,
            scale: c.scale,
            max_excess_violation: c.max_excess_violation,
            passed: c.passed,
        }
    }
}

#[derive(Debug, Serialize)]
struct FlowOutput {
    family: Family,
    config: FlowConfig,
    integrator: String,
    extinct: bool,
    closed_form_error: f64,
    trace: Vec<TraceRow>,
    checks: Vec<IdentityCheck>,
    monitor: Option<MonitorRecord>,
}

impl FlowOutput {
    fn new(trace: &FlowTrace, checks: &[IdentityCheck], monitor: Option<MonitorRecord>) -> Self {
        Self {
            family: trace.snapshots[0].state.family,
            config: trace.config,
            integrator: trace.integrator.clone(),
            extinct: trace.extinct,
            closed_form_error: trace.closed_form_error(),
            trace: trace
                .snapshots
                .iter()
                .map(|s| TraceRow {
                    t: s.state.t,
                    parameters: s.state.parameters().to_vec(),
                    mean_scalar: s.mean_scalar,
                    volume: s.volume,
                    total_traceless_ricci_sq: s.report.total_traceless_ricci_sq,
                    total_scalar_deviation_sq: s.report.total_scalar_deviation_sq,
                    total_weyl_minus_sq: s.report.total_weyl_minus_sq,
                    total_f_plus_negative_sq: s.report.total_f_plus_negative_sq,
                    total_g2: s.total_g2,
                    total_g3: s.total_g3,
                    total_g4: s.total_g4,
                    total_e3: s.total_e3,
                })
                .collect(),
            checks: checks.to_vec(),
            monitor,
        }
    }
}

#[derive(Debug, Serialize)]
struct MonitorSummary {
    epsilon0: f64,
    t0: f64,
    t0_literal: f64,
    doubling_time: Option<f64>,
    mean_scalar_within_a: bool,
    yamabe_above_b: bool,
    volume_window_held: bool,
    e3_decay_exponent: Option<f64>,
    sup_g3: f64,
    bound_violations: usize,
}

#[derive(Debug, Serialize)]
struct FlowSummary {
    family: Family,
    steps: usize,
    extinct: bool,
    closed_form_error: f64,
    initial: Vec<f64>,
    last_t: f64,
    last: Vec<f64>,
    checks: Vec<CheckSummary>,
    monitor: Option<MonitorSummary>,
}

impl FlowSummary {
    fn new(trace: &FlowTrace, checks: &[IdentityCheck], monitor: Option<MonitorRecord>) -> Self {
        let (first, last) = (&trace.snapshots[0], &trace.snapshots[trace.snapshots.len() - 1]);
        Self {
            family: first.state.family,
            steps: trace.snapshots.len() - 1,
            extinct: trace.extinct,
            closed_form_error: trace.closed_form_error(),
            initial: first.state.parameters().to_vec(),
            last_t: last.state.t,
            last: last.state.parameters().to_vec(),
            checks: checks.iter().map(CheckSummary::from).collect(),
            monitor: monitor.map(|m| MonitorSummary {
                epsilon0: m.epsilon0,
                t0: m.t0,
                t0_literal: m.t0_literal,
                doubling_time: m.doubling_time,
                mean_scalar_within_a: m.mean_scalar_within_a,
                yamabe_above_b: m.yamabe_above_b,
                volume_window_held: m.volume_window_held,
                e3_decay_exponent: m.e3_decay_exponent,
                sup_g3: m.sup_g3,
                bound_violations: m.bound_violations,
            }),
        }
    }
}

#[derive(Debug, Serialize)]
struct FuzzLine {
    checked: u64,
    violations: u64,
    max_violation: f64,
    tightest_index: u64,
    tightest_normalized_margin: f64,
}

#[derive(Debug, Serialize)]
struct FuzzSummary {
    seed: u64,
    samples: u64,
    passed: bool,
    inequalities: std::collections::BTreeMap<String, FuzzLine>,
}

impl From<&FuzzReport> for FuzzSummary {
    fn from(r: &FuzzReport) -> Self {
        Self {
            seed: r.config.seed,
            samples: r.config.samples,
            passed: r.passed(),
            inequalities: r
                .inequalities
                .iter()
                .map(|s| {
                    let line = FuzzLine {
                        checked: s.checked,
                        violations: s.violations,
                        max_violation: s.max_violation,
                        tightest_index: s.tightest.index,
                        tightest_normalized_margin: s.tightest.normalized_margin,
                    };
                    (s.name.clone(), line)
                })
                .collect(),
        }
    }
}

fn witnesses_csv(report: &FuzzReport) -> CliResult<String> {
    let header = ["inequality", "rank", "index", "margin", "normalized_margin"].map(String::from);
    let rows: Vec<Vec<String>> = report
        .inequalities
        .iter()
        .flat_map(|s| {
            s.top.iter().enumerate().map(|(k, w)| {
                vec![
                    s.name.clone(),
                    k.to_string(),
                    w.index.to_string(),
                    output::machine_float(w.margin),
                    output::machine_float(w.normalized_margin),
                ]
            })
        })
        .collect();
    output::csv_table(&header, &rows)
}

#[derive(Debug, Serialize)]
struct ConformalRun {
    seed: Option<u64>,
    check: ConformalCheck,
}

#[derive(Debug, Serialize)]
struct ConformalOutput {
    grid: u64,
    passed: bool,
    runs: Vec<ConformalRun>,
}
