//! Ricci flow `∂g/∂t = −2 Ric` on the homogeneous models, where it reduces
//! to an ODE for the scale parameters, and finite-difference checks of the
//! curvature evolution equations along the resulting trajectories.
//!
//! The state is reported in squared radii, whose evolution is linear in
//! time. The integrator advances the radii themselves (`d r/dt = c/(2r)`),
//! a nonlinear system, so that its order of accuracy is observable.

use alloc::string::String;
use alloc::vec::Vec;

use crate::curvature::{decompose, scalars, Scalars};
use crate::error::{domain, LabError, Result};
use crate::invariants::{global_report, InvariantReport};
use crate::zoo::{Family, MetricModel, FS_STANDARD_LAMBDA};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

const SQRT6: f64 = 2.449_489_742_783_178;

/// Scale parameters of a homogeneous model at time `t`: `[r², –]` for the
/// round sphere, `[a², b²]` for the product, `[s, –]` for `s·g_FS` with
/// `g_FS` normalized to `Ric = 6 g_FS`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct FlowState {
    pub family: Family,
    pub squared: [f64; 2],
    pub t: f64,
}

impl FlowState {
    pub fn from_model(model: &MetricModel) -> Result<Self> {
        model.validate()?;
        let squared = match *model {
            MetricModel::RoundS4 { r } => [r * r, 0.0],
            MetricModel::ProductS2S2 { a, b } => [a * a, b * b],
            MetricModel::FubiniStudy { lambda } => [FS_STANDARD_LAMBDA / lambda, 0.0],
            _ => return Err(LabError::UnsupportedFamily("Ricci flow needs a homogeneous model".into())),
        };
        Ok(Self { family: model.family().unwrap_or(Family::RoundS4), squared, t: 0.0 })
    }

    pub fn parameter_count(&self) -> usize {
        match self.family {
            Family::ProductS2S2 => 2,
            _ => 1,
        }
    }

    pub fn parameters(&self) -> &[f64] {
        &self.squared[..self.parameter_count()]
    }

    pub fn model(&self) -> Result<MetricModel> {
        self.check_alive(0.0)?;
        Ok(match self.family {
            Family::RoundS4 => MetricModel::RoundS4 { r: libm::sqrt(self.squared[0]) },
            Family::ProductS2S2 => {
                MetricModel::ProductS2S2 { a: libm::sqrt(self.squared[0]), b: libm::sqrt(self.squared[1]) }
            }
            Family::FubiniStudy => MetricModel::FubiniStudy { lambda: FS_STANDARD_LAMBDA / self.squared[0] },
        })
    }

    fn check_alive(&self, guard: f64) -> Result<()> {
        match self.parameters().iter().find(|&&s| !(s > guard)) {
            Some(&s) => Err(LabError::Extinct(s)),
            None => Ok(()),
        }
    }

    /// Time at which the first squared parameter reaches zero.
    pub fn extinction_time(&self) -> f64 {
        let rhs = squared_rhs(self.family);
        self.parameters()
            .iter()
            .zip(rhs)
            .map(|(&s, c)| self.t - s / c)
            .fold(f64::INFINITY, f64::min)
    }

    /// Exact squared parameters at time `t` of the unnormalized flow.
    pub fn closed_form(&self, t: f64) -> [f64; 2] {
        let rhs = squared_rhs(self.family);
        let mut out = self.squared;
        for (k, o) in out.iter_mut().enumerate().take(self.parameter_count()) {
            *o = self.squared[k] + rhs[k] * (t - self.t);
        }
        out
    }
}

/// Time derivative of the squared parameters; constant in time.
pub fn squared_rhs(family: Family) -> [f64; 2] {
    match family {
        Family::RoundS4 => [-6.0, 0.0],
        Family::ProductS2S2 => [-2.0, -2.0],
        Family::FubiniStudy => [-2.0 * FS_STANDARD_LAMBDA, 0.0],
    }
}

/// `d/dt` of the squared parameters at `state`.
pub fn reduced_rhs(state: &FlowState) -> Result<[f64; 2]> {
    state.check_alive(0.0)?;
    let mut rhs = squared_rhs(state.family);
    rhs[state.parameter_count()..].iter_mut().for_each(|c| *c = 0.0);
    Ok(rhs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct FlowConfig {
    pub dt: f64,
    pub t_max: f64,
    /// Stop once a squared parameter drops below this.
    pub extinction_guard: f64,
    /// Rescale after every step to keep the volume fixed.
    pub normalized: bool,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self { dt: 1e-3, t_max: 0.4, extinction_guard: 1e-6, normalized: false }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(domain("dt must be positive"));
        }
        if !(self.t_max >= self.dt && self.t_max.is_finite()) {
            return Err(domain("t_max must be at least dt"));
        }
        if !(self.extinction_guard > 0.0) {
            return Err(domain("extinction guard must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Snapshot {
    pub state: FlowState,
    pub report: InvariantReport,
    /// Pointwise scalars, with `G_k` evaluated at `R̄ = R`.
    pub pointwise: Scalars,
    pub volume: f64,
    pub mean_scalar: f64,
    pub total_g2: f64,
    pub total_g3: f64,
    pub total_g4: f64,
    pub total_e3: f64,
}

impl Snapshot {
    pub fn at(state: FlowState) -> Result<Self> {
        let model = state.model()?;
        let (g, rm) = model.curvature_at(&[0.0; 4])?;
        let dec = decompose(&rm, &g)?;
        let r = dec.scalar();
        let pointwise = scalars(&dec, Some(r), true)?;
        let volume = model.volume()?;
        let [g2, g3, g4, _] = pointwise.pinching.unwrap_or([0.0; 4]);
        let e = libm::sqrt(pointwise.traceless_ricci_norm_sq);
        Ok(Self {
            state,
            report: global_report(&model)?,
            pointwise,
            volume,
            mean_scalar: r,
            total_g2: g2 * volume,
            total_g3: g3 * volume,
            total_g4: g4 * volume,
            total_e3: e * e * e * volume,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct FlowTrace {
    pub config: FlowConfig,
    pub integrator: String,
    pub snapshots: Vec<Snapshot>,
    /// The guard stopped the run before `t_max`.
    pub extinct: bool,
}

impl FlowTrace {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.state.t).collect()
    }

    pub fn dt(&self) -> f64 {
        self.config.dt
    }

    /// Largest relative deviation of the squared parameters from the closed form.
    pub fn closed_form_error(&self) -> f64 {
        let Some(first) = self.snapshots.first() else { return 0.0 };
        let s0 = first.state;
        let mut worst: f64 = 0.0;
        for s in &self.snapshots {
            let exact = s0.closed_form(s.state.t);
            for k in 0..s0.parameter_count() {
                worst = worst.max((s.state.squared[k] - exact[k]).abs() / exact[k].abs());
            }
        }
        worst
    }
}

fn lengths_rhs(family: Family, y: &[f64; 2], n: usize) -> [f64; 2] {
    let c = squared_rhs(family);
    let mut out = [0.0; 2];
    for k in 0..n {
        out[k] = c[k] / (2.0 * y[k]);
    }
    out
}

fn rk4_step(family: Family, y: &[f64; 2], n: usize, dt: f64) -> Option<[f64; 2]> {
    let add = |a: &[f64; 2], b: &[f64; 2], h: f64| [a[0] + h * b[0], a[1] + h * b[1]];
    let alive = |v: &[f64; 2]| v[..n].iter().all(|&x| x > 0.0 && x.is_finite());
    let k1 = lengths_rhs(family, y, n);
    let y2 = add(y, &k1, dt / 2.0);
    if !alive(&y2) {
        return None;
    }
    let k2 = lengths_rhs(family, &y2, n);
    let y3 = add(y, &k2, dt / 2.0);
    if !alive(&y3) {
        return None;
    }
    let k3 = lengths_rhs(family, &y3, n);
    let y4 = add(y, &k3, dt);
    if !alive(&y4) {
        return None;
    }
    let k4 = lengths_rhs(family, &y4, n);
    let mut out = *y;
    for k in 0..n {
        out[k] += dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    }
    alive(&out).then_some(out)
}

/// Classical fixed-step RK4 on the grid `t_n = t₀ + n·dt`.
pub fn integrate_flow(s0: &FlowState, cfg: &FlowConfig) -> Result<FlowTrace> {
    cfg.validate()?;
    s0.check_alive(cfg.extinction_guard)?;
    let n = s0.parameter_count();
    let steps = libm::floor(cfg.t_max / cfg.dt + 1e-9) as u64;
    let mut y = [0.0; 2];
    for k in 0..n {
        y[k] = libm::sqrt(s0.squared[k]);
    }
    let v0 = s0.model()?.volume()?;
    let t_ext = if cfg.normalized { f64::INFINITY } else { s0.extinction_time() };
    let mut snapshots = Vec::with_capacity(steps as usize + 1);
    snapshots.push(Snapshot::at(*s0)?);
    let mut extinct = false;
    for step in 1..=steps {
        let Some(mut next) = rk4_step(s0.family, &y, n, cfg.dt) else {
            extinct = true;
            break;
        };
        let mut state = FlowState { family: s0.family, squared: [0.0; 2], t: s0.t + step as f64 * cfg.dt };
        for k in 0..n {
            state.squared[k] = next[k] * next[k];
        }
        if state.t >= t_ext || state.check_alive(cfg.extinction_guard).is_err() {
            extinct = true;
            break;
        }
        if cfg.normalized {
            let c = libm::pow(v0 / state.model()?.volume()?, 0.25);
            for k in 0..n {
                next[k] *= c;
                state.squared[k] = next[k] * next[k];
            }
        }
        y = next;
        snapshots.push(Snapshot::at(state)?);
    }
    Ok(FlowTrace { config: *cfg, integrator: String::from("rk4 (radii)"), snapshots, extinct })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "snake_case"))]
pub enum CheckKind {
    /// `d/dt q = rhs`.
    Equality,
    /// `d/dt q ≤ rhs`.
    AtMost,
    /// `d/dt q ≥ rhs`.
    AtLeast,
}

/// A quantity whose time derivative is compared against a right-hand side,
/// both read off a snapshot.
pub struct Identity {
    pub name: &'static str,
    pub kind: CheckKind,
    pub quantity: fn(&Snapshot) -> f64,
    pub rhs: fn(&Snapshot) -> f64,
}

fn wp(s: &Snapshot) -> f64 {
    s.pointwise.weyl_plus_norm
}
fn wm(s: &Snapshot) -> f64 {
    s.pointwise.weyl_minus_norm
}
fn e2(s: &Snapshot) -> f64 {
    s.pointwise.traceless_ricci_norm_sq
}
fn r(s: &Snapshot) -> f64 {
    s.pointwise.scalar
}
fn fm(s: &Snapshot) -> f64 {
    s.pointwise.f_plus_negative
}

/// Pointwise evolution equations with every gradient and Laplacian term
/// dropped, which is exact on homogeneous metrics.
pub const POINTWISE: [Identity; 8] = [
    Identity { name: "volume element", kind: CheckKind::Equality, quantity: |s| libm::log(s.volume), rhs: |s| -r(s) },
    Identity {
        name: "E^2",
        kind: CheckKind::Equality,
        quantity: e2,
        rhs: |s| 4.0 * s.pointwise.wee - 4.0 * s.pointwise.traceless_ricci_cubed_trace + 2.0 / 3.0 * r(s) * e2(s),
    },
    Identity { name: "R^2", kind: CheckKind::Equality, quantity: |s| r(s) * r(s), rhs: |s| 4.0 * r(s) * e2(s) + r(s) * r(s) * r(s) },
    Identity {
        name: "W+^2",
        kind: CheckKind::Equality,
        quantity: |s| s.pointwise.weyl_plus_norm_sq,
        rhs: |s| 36.0 * s.pointwise.weyl_plus_det + s.pointwise.w_plus_ee,
    },
    Identity {
        name: "W-^2",
        kind: CheckKind::Equality,
        quantity: |s| s.pointwise.weyl_minus_norm_sq,
        rhs: |s| 36.0 * s.pointwise.weyl_minus_det + s.pointwise.w_minus_ee,
    },
    Identity {
        name: "W+ inequality",
        kind: CheckKind::AtMost,
        quantity: wp,
        rhs: |s| SQRT6 * wp(s) * wp(s) + SQRT6 / 6.0 * e2(s),
    },
    Identity {
        name: "W- inequality",
        kind: CheckKind::AtMost,
        quantity: wm,
        rhs: |s| SQRT6 * wm(s) * wm(s) + SQRT6 / 6.0 * e2(s),
    },
    Identity { name: "F inequality", kind: CheckKind::AtLeast, quantity: fm, rhs: |s| -fm(s) * fm(s) + 2.0 * r(s) * fm(s) },
];

/// Integrated evolution equations; on homogeneous metrics every integral is
/// the pointwise value times the volume and `R ≡ R̄`.
pub const INTEGRAL: [Identity; 6] = [
    Identity { name: "volume", kind: CheckKind::Equality, quantity: |s| s.volume, rhs: |s| -r(s) * s.volume },
    Identity {
        name: "L2 E",
        kind: CheckKind::Equality,
        quantity: |s| e2(s) * s.volume,
        rhs: |s| {
            (4.0 * s.pointwise.wee - 4.0 * s.pointwise.traceless_ricci_cubed_trace - r(s) * e2(s) / 3.0) * s.volume
        },
    },
    Identity {
        name: "L2 R-Rbar",
        kind: CheckKind::Equality,
        quantity: |s| {
            let d = r(s) - s.mean_scalar;
            d * d * s.volume
        },
        rhs: |s| {
            let d = r(s) - s.mean_scalar;
            (4.0 * d * e2(s) + s.mean_scalar * d * d) * s.volume
        },
    },
    Identity {
        name: "Rbar",
        kind: CheckKind::Equality,
        quantity: |s| s.mean_scalar,
        rhs: |s| (2.0 * e2(s) - 0.5 * r(s) * r(s)) + s.mean_scalar * s.mean_scalar,
    },
    Identity {
        name: "L2 F-",
        kind: CheckKind::AtMost,
        quantity: |s| fm(s) * fm(s) * s.volume,
        rhs: |s| {
            let f = fm(s);
            let d = r(s) - s.mean_scalar;
            (-r(s) / 3.0 * f * f - f * f * f + 4.0 / 3.0 * s.mean_scalar * f * f + 4.0 / 3.0 * d * f * f) * s.volume
        },
    },
    Identity {
        name: "L2 W-",
        kind: CheckKind::AtMost,
        quantity: |s| wm(s) * wm(s) * s.volume,
        rhs: |s| {
            let w = wm(s);
            (-r(s) * w * w + 2.0 * SQRT6 * w * w * w + SQRT6 / 3.0 * w * e2(s)) * s.volume
        },
    },
];

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ResidualRow {
    pub t: f64,
    /// Centered difference `(q(t+dt) − q(t−dt)) / 2dt`; one-sided at the ends.
    pub derivative: f64,
    pub rhs: f64,
    /// `derivative − rhs`.
    pub residual: f64,
    /// `|D_{2dt} − D_{dt}|`, a bound on the error of the centered difference;
    /// `None` within two steps of either end.
    pub error_estimate: Option<f64>,
    /// Row excluded from the statistics (grid ends).
    pub endpoint: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct IdentityCheck {
    pub name: String,
    pub kind: CheckKind,
    pub rows: Vec<ResidualRow>,
    /// Largest `|residual|` over interior rows.
    pub max_residual: f64,
    /// Largest `max(|derivative|, |rhs|)` over interior rows.
    pub scale: f64,
    /// For inequalities: the largest amount by which the wrong-side residual
    /// exceeds the error estimate (plus round-off); `≤ 0` means no violation.
    pub max_excess_violation: f64,
    pub passed: bool,
}

fn finite_difference(q: &[f64], n: usize, dt: f64, stride: usize) -> Option<f64> {
    let h = stride as f64 * dt;
    if n >= stride && n + stride < q.len() {
        Some((q[n + stride] - q[n - stride]) / (2.0 * h))
    } else {
        None
    }
}

pub fn check_identity(trace: &FlowTrace, id: &Identity) -> IdentityCheck {
    let dt = trace.dt();
    let q: Vec<f64> = trace.snapshots.iter().map(id.quantity).collect();
    let len = q.len();
    let mut rows = Vec::with_capacity(len);
    let mut max_residual: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let mut excess = f64::NEG_INFINITY;
    for (n, snap) in trace.snapshots.iter().enumerate() {
        let rhs = (id.rhs)(snap);
        let (derivative, endpoint) = match finite_difference(&q, n, dt, 1) {
            Some(d) => (d, false),
            None if len < 2 => (0.0, true),
            None if n == 0 => ((q[1] - q[0]) / dt, true),
            None => ((q[n] - q[n - 1]) / dt, true),
        };
        let error_estimate = finite_difference(&q, n, dt, 2).map(|d2| (d2 - derivative).abs());
        let residual = derivative - rhs;
        if !endpoint {
            max_residual = max_residual.max(residual.abs());
            scale = scale.max(derivative.abs()).max(rhs.abs());
        }
        if let Some(err) = error_estimate {
            let wrong_side = match id.kind {
                CheckKind::Equality => residual.abs(),
                CheckKind::AtMost => residual,
                CheckKind::AtLeast => -residual,
            };
            // differencing amplifies round-off in q by 1/dt
            let roundoff = 1e-12 * derivative.abs().max(rhs.abs()).max(1.0) / dt.min(1.0);
            excess = excess.max(wrong_side - err - roundoff);
        }
        rows.push(ResidualRow { t: snap.state.t, derivative, rhs, residual, error_estimate, endpoint });
    }
    let max_excess_violation = if excess.is_finite() { excess } else { 0.0 };
    let passed = max_excess_violation <= 0.0;
    IdentityCheck { name: String::from(id.name), kind: id.kind, rows, max_residual, scale, max_excess_violation, passed }
}

fn require_homogeneous(trace: &FlowTrace) -> Result<()> {
    if trace.snapshots.is_empty() {
        return Err(domain("empty flow trace"));
    }
    Ok(())
}

pub fn pointwise_evolution_check(trace: &FlowTrace) -> Result<Vec<IdentityCheck>> {
    require_homogeneous(trace)?;
    Ok(POINTWISE.iter().map(|id| check_identity(trace, id)).collect())
}

pub fn integral_evolution_check(trace: &FlowTrace) -> Result<Vec<IdentityCheck>> {
    require_homogeneous(trace)?;
    Ok(INTEGRAL.iter().map(|id| check_identity(trace, id)).collect())
}

/// Residual relative to the problem scale below which an identity is
/// treated as satisfied exactly rather than to some order.
pub const EXACT_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "snake_case"))]
pub enum Convergence {
    /// Both residuals sit below the exact floor.
    Exact,
    /// Ratio of residuals under halving lies in the expected window.
    Converges,
    Fails,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ConvergenceRow {
    pub name: String,
    pub coarse: f64,
    pub fine: f64,
    pub ratio: Option<f64>,
    pub verdict: Convergence,
}

/// Compares the residuals of two traces with steps `dt` and `dt/2` at the
/// coarse grid's interior times.
pub fn convergence(
    coarse: &FlowTrace,
    fine: &FlowTrace,
    identities: &[Identity],
    window: (f64, f64),
) -> Result<Vec<ConvergenceRow>> {
    if (fine.dt() * 2.0 - coarse.dt()).abs() > 1e-12 * coarse.dt() {
        return Err(domain("the fine trace must use half the coarse step"));
    }
    let mut out = Vec::new();
    for id in identities {
        let c = check_identity(coarse, id);
        let f = check_identity(fine, id);
        let mut worst_c: f64 = 0.0;
        let mut worst_f: f64 = 0.0;
        for (i, row) in c.rows.iter().enumerate() {
            if row.endpoint {
                continue;
            }
            let Some(frow) = f.rows.get(2 * i) else { continue };
            if frow.endpoint {
                continue;
            }
            worst_c = worst_c.max(row.residual.abs());
            worst_f = worst_f.max(frow.residual.abs());
        }
        let scale = c.scale.max(1.0);
        let (ratio, verdict) = if worst_c <= EXACT_FLOOR * scale && worst_f <= EXACT_FLOOR * scale {
            ((worst_f > 0.0).then(|| worst_c / worst_f), Convergence::Exact)
        } else if worst_f > 0.0 {
            let ratio = worst_c / worst_f;
            let ok = ratio >= window.0 && ratio <= window.1;
            (Some(ratio), if ok { Convergence::Converges } else { Convergence::Fails })
        } else {
            (None, Convergence::Fails)
        };
        out.push(ConvergenceRow { name: String::from(id.name), coarse: worst_c, fine: worst_f, ratio, verdict });
    }
    Ok(out)
}

/// Error ratio of the integrated parameters against the closed form under
/// step halving: `err(dt) / err(dt/2)`.
pub fn integrator_order_ratio(s0: &FlowState, cfg: &FlowConfig) -> Result<(f64, f64, f64)> {
    let coarse = integrate_flow(s0, cfg)?.closed_form_error();
    let fine = integrate_flow(s0, &FlowConfig { dt: cfg.dt / 2.0, ..*cfg })?.closed_form_error();
    Ok((coarse, fine, coarse / fine))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct MonitorRow {
    pub t: f64,
    pub total_g2: f64,
    pub derivative: Option<f64>,
    /// `ã ∫G₂ − b̃ (∫G₄)^{1/2}`.
    pub bound: f64,
    /// `bound − derivative`.
    pub margin: Option<f64>,
    pub relative_volume: f64,
    pub volume_in_window: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct MonitorRecord {
    pub a: f64,
    pub b: f64,
    pub a_tilde: f64,
    pub b_tilde: f64,
    /// `2∫G₂(0)`.
    pub epsilon0: f64,
    /// `3 ln 2 / (4a)`, the time `∫G₂` needs to double under `d/dt ∫G₂ ≤ ã ∫G₂`.
    pub t0: f64,
    /// `(3 ln 2 / 4) a`, as sometimes printed.
    pub t0_literal: f64,
    /// First time `∫G₂` reaches `ε₀`, if it does.
    pub doubling_time: Option<f64>,
    pub max_mean_scalar: f64,
    pub mean_scalar_within_a: bool,
    pub min_yamabe_quotient: f64,
    pub yamabe_above_b: bool,
    /// Volume relative to the initial one stays in `[1/4, 9/4]`.
    pub volume_window_held: bool,
    /// Least-squares slope of `log ∫|E|³` against `log t`.
    pub e3_decay_exponent: Option<f64>,
    pub sup_g3: f64,
    pub rows: Vec<MonitorRow>,
    /// Rows where the bound is undercut beyond the step error estimate.
    pub bound_violations: usize,
}

pub fn g2_monitor(trace: &FlowTrace, a: f64, b: f64) -> Result<MonitorRecord> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(domain("monitor constants a and b must be positive"));
    }
    require_homogeneous(trace)?;
    let a_tilde = 4.0 / 3.0 * a;
    let b_tilde = b / 12.0;
    let dt = trace.dt();
    let g2: Vec<f64> = trace.snapshots.iter().map(|s| s.total_g2).collect();
    let v0 = trace.snapshots[0].volume;
    let epsilon0 = 2.0 * g2[0];
    let mut rows = Vec::with_capacity(g2.len());
    let mut bound_violations = 0;
    for (n, s) in trace.snapshots.iter().enumerate() {
        let derivative = finite_difference(&g2, n, dt, 1);
        let err = finite_difference(&g2, n, dt, 2).zip(derivative).map(|(d2, d)| (d2 - d).abs());
        let bound = a_tilde * s.total_g2 - b_tilde * libm::sqrt(s.total_g4);
        let margin = derivative.map(|d| bound - d);
        if let (Some(m), Some(e)) = (margin, err) {
            if m < -e - 1e-12 * bound.abs().max(1.0) {
                bound_violations += 1;
            }
        }
        let relative_volume = s.volume / v0;
        rows.push(MonitorRow {
            t: s.state.t,
            total_g2: s.total_g2,
            derivative,
            bound,
            margin,
            relative_volume,
            volume_in_window: (0.25..=2.25).contains(&relative_volume),
        });
    }
    let doubling_time = if epsilon0 > 0.0 {
        trace.snapshots.iter().find(|s| s.total_g2 >= epsilon0).map(|s| s.state.t)
    } else {
        None
    };
    let max_mean_scalar = trace.snapshots.iter().map(|s| s.mean_scalar).fold(f64::NEG_INFINITY, f64::max);
    let min_yamabe_quotient =
        trace.snapshots.iter().map(|s| s.report.yamabe_quotient).fold(f64::INFINITY, f64::min);
    Ok(MonitorRecord {
        a,
        b,
        a_tilde,
        b_tilde,
        epsilon0,
        t0: 3.0 * core::f64::consts::LN_2 / (4.0 * a),
        t0_literal: 3.0 * core::f64::consts::LN_2 / 4.0 * a,
        doubling_time,
        max_mean_scalar,
        mean_scalar_within_a: max_mean_scalar > 0.0 && max_mean_scalar <= a,
        min_yamabe_quotient,
        yamabe_above_b: min_yamabe_quotient >= b,
        volume_window_held: rows.iter().all(|r| r.volume_in_window),
        e3_decay_exponent: decay_exponent(trace),
        sup_g3: trace.snapshots.iter().map(|s| s.total_g3).fold(0.0, f64::max),
        rows,
        bound_violations,
    })
}

fn decay_exponent(trace: &FlowTrace) -> Option<f64> {
    let pts: Vec<(f64, f64)> = trace
        .snapshots
        .iter()
        .filter(|s| s.state.t > 0.0 && s.total_e3 > 0.0)
        .map(|s| (libm::log(s.state.t), libm::log(s.total_e3)))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
