//! Global integrals of the pointwise curvature scalars and the conformal
//! invariants built from them.

use alloc::string::String;
use core::f64::consts::PI;

use crate::curvature::{decompose, CurvatureDecomposition};
use crate::error::{contract, domain, LabError, Result};
use crate::zoo::{fd, ChartMetric, ChartSample, ConformalFactor, MetricModel};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

const PI2: f64 = PI * PI;

/// Relative tolerance used for equality flags on closed-form models.
pub const EXACT_TOLERANCE: f64 = 1e-9;
/// Relative tolerance used for equality flags on quadrature models.
pub const QUADRATURE_TOLERANCE: f64 = 1e-4;

pub fn tolerance_for(model: &MetricModel) -> f64 {
    if model.is_homogeneous() {
        EXACT_TOLERANCE
    } else {
        QUADRATURE_TOLERANCE
    }
}

/// Integral of a pointwise density built from the curvature decomposition.
pub fn integrate(model: &MetricModel, density: impl Fn(&CurvatureDecomposition) -> f64 + Sync) -> Result<f64> {
    let [v] = model.integrate(|s: &ChartSample| {
        let dec = decompose(&s.curvature, &s.metric)?;
        Ok([s.volume_weight * density(&dec)])
    })?;
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct RawIntegrals {
    pub volume: f64,
    pub scalar: f64,
    pub scalar_sq: f64,
    pub sigma2: f64,
    pub weyl_sq: f64,
    pub weyl_plus_sq: f64,
    pub weyl_minus_sq: f64,
    pub weyl_minus: f64,
    pub traceless_ricci_sq: f64,
    pub f_plus: f64,
    pub f_plus_sq: f64,
    pub f_plus_negative_sq: f64,
    /// Volume of the set where `R ≤ 0`.
    pub nonpositive_scalar_volume: f64,
    /// Curvature scalars are constant, so `R ≡ R̄` and `F⁺` is constant.
    pub homogeneous: bool,
}

/// Every integral the reports need, in one pass over the model.
pub fn raw_integrals(model: &MetricModel) -> Result<RawIntegrals> {
    let v = model.integrate(|s: &ChartSample| {
        let d = decompose(&s.curvature, &s.metric)?;
        let r = d.scalar();
        let fp = d.f_plus();
        let fm = d.f_plus_negative();
        let row = [
            1.0,
            r,
            r * r,
            d.sigma2(),
            d.weyl_norm_sq(),
            d.weyl_plus_norm_sq(),
            d.weyl_minus_norm_sq(),
            d.weyl_minus_norm(),
            d.traceless_ricci_norm_sq(),
            fp,
            fp * fp,
            fm * fm,
            if r <= 0.0 { 1.0 } else { 0.0 },
        ];
        Ok(row.map(|x| x * s.volume_weight))
    })?;
    Ok(RawIntegrals {
        volume: v[0],
        scalar: v[1],
        scalar_sq: v[2],
        sigma2: v[3],
        weyl_sq: v[4],
        weyl_plus_sq: v[5],
        weyl_minus_sq: v[6],
        weyl_minus: v[7],
        traceless_ricci_sq: v[8],
        f_plus: v[9],
        f_plus_sq: v[10],
        f_plus_negative_sq: v[11],
        nonpositive_scalar_volume: v[12],
        homogeneous: model.is_homogeneous(),
    })
}

impl RawIntegrals {
    pub fn mean_scalar(&self) -> f64 {
        self.scalar / self.volume
    }

    /// `∫(R − R̄)²`, expanded so that one pass suffices.
    pub fn scalar_deviation_sq(&self) -> f64 {
        if self.homogeneous {
            return 0.0;
        }
        (self.scalar_sq - self.scalar * self.scalar / self.volume).max(0.0)
    }

    /// `∫(F⁺ − F̄⁺)²`.
    pub fn f_plus_deviation_sq(&self) -> f64 {
        if self.homogeneous {
            return 0.0;
        }
        (self.f_plus_sq - self.f_plus * self.f_plus / self.volume).max(0.0)
    }

    /// `∫G₂ = ∫|E|² + (R − R̄)² + ‖W⁻‖² + |(F⁺)₋|²`.
    pub fn g2(&self) -> f64 {
        self.traceless_ricci_sq + self.scalar_deviation_sq() + self.weyl_minus_sq + self.f_plus_negative_sq
    }

    pub fn euler(&self) -> f64 {
        (self.weyl_sq + 4.0 * self.sigma2) / (8.0 * PI2)
    }

    pub fn signature(&self) -> f64 {
        (self.weyl_plus_sq - self.weyl_minus_sq) / (12.0 * PI2)
    }

    pub fn beta(&self) -> Result<f64> {
        if self.sigma2 > 0.0 {
            Ok(self.weyl_sq / self.sigma2)
        } else {
            Err(LabError::UndefinedBeta(self.sigma2))
        }
    }

    pub fn yamabe_quotient(&self) -> f64 {
        self.scalar / libm::sqrt(self.volume)
    }
}

/// Regime label for a value of β.
pub fn regime(beta: f64, tol: f64) -> &'static str {
    if (beta - 4.0).abs() <= tol * 4.0 {
        "boundary beta = 4"
    } else if beta < 4.0 {
        "beta < 4"
    } else if beta < 8.0 - tol * 8.0 {
        "4 <= beta < 8"
    } else {
        "beta >= 8"
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct InvariantReport {
    pub volume: f64,
    pub total_scalar: f64,
    pub total_scalar_sq: f64,
    pub total_sigma2: f64,
    pub total_weyl_sq: f64,
    pub total_weyl_plus_sq: f64,
    pub total_weyl_minus_sq: f64,
    pub total_traceless_ricci_sq: f64,
    /// `∫(R − R̄)²`.
    pub total_scalar_deviation_sq: f64,
    pub total_f_plus: f64,
    /// `∫|(F⁺)₋|²`.
    pub total_f_plus_negative_sq: f64,
    pub euler_characteristic: f64,
    pub signature: f64,
    /// `None` when `∫σ₂ ≤ 0`.
    pub beta: Option<f64>,
    pub regime: Option<String>,
    /// `Vol^{-1/2} ∫R` at the given metric.
    pub yamabe_quotient: f64,
    pub mean_scalar: f64,
    pub total_g2: f64,
    /// `24∫‖W⁺‖² − ∫R²`.
    pub gap_residual: f64,
    /// `R > 0` on the sampled nodes, up to a volume fraction below the tolerance.
    pub positive_scalar: bool,
    /// `∫σ₂ > 0` together with positive scalar curvature.
    pub positive_sigma2_class: bool,
    pub expected_euler: i32,
    pub expected_signature: i32,
    pub euler_residual: f64,
    pub signature_residual: f64,
    /// Relative change of `(∫σ₂, ∫‖W‖²)` when the finite-difference step is
    /// halved; chart models only, when requested.
    pub step_refinement: Option<[f64; 2]>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReportOptions {
    /// Recompute at half the finite-difference step and report the change.
    pub step_refinement: bool,
}

pub fn global_report(model: &MetricModel) -> Result<InvariantReport> {
    global_report_with(model, ReportOptions::default())
}

pub fn global_report_with(model: &MetricModel, options: ReportOptions) -> Result<InvariantReport> {
    let raw = raw_integrals(model)?;
    let tol = tolerance_for(model);
    let beta = raw.beta().ok();
    let (chi, tau) = model.topology();
    let step_refinement = match (options.step_refinement, refined(model)) {
        (true, Some(fine)) => {
            let f = raw_integrals(&fine)?;
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
            Some([rel(raw.sigma2, f.sigma2), rel(raw.weyl_sq, f.weyl_sq)])
        }
        _ => None,
    };
    let euler = raw.euler();
    let signature = raw.signature();
    let positive_scalar = raw.nonpositive_scalar_volume <= tol * raw.volume;
    Ok(InvariantReport {
        volume: raw.volume,
        total_scalar: raw.scalar,
        total_scalar_sq: raw.scalar_sq,
        total_sigma2: raw.sigma2,
        total_weyl_sq: raw.weyl_sq,
        total_weyl_plus_sq: raw.weyl_plus_sq,
        total_weyl_minus_sq: raw.weyl_minus_sq,
        total_traceless_ricci_sq: raw.traceless_ricci_sq,
        total_scalar_deviation_sq: raw.scalar_deviation_sq(),
        total_f_plus: raw.f_plus,
        total_f_plus_negative_sq: raw.f_plus_negative_sq,
        euler_characteristic: euler,
        signature,
        beta,
        regime: beta.map(|b| String::from(regime(b, tol))),
        yamabe_quotient: raw.yamabe_quotient(),
        mean_scalar: raw.mean_scalar(),
        total_g2: raw.g2(),
        gap_residual: 24.0 * raw.weyl_plus_sq - raw.scalar_sq,
        positive_scalar,
        positive_sigma2_class: positive_scalar && raw.sigma2 > 0.0,
        expected_euler: chi,
        expected_signature: tau,
        euler_residual: euler - chi as f64,
        signature_residual: signature - tau as f64,
        step_refinement,
        tolerance: tol,
    })
}

fn refined(model: &MetricModel) -> Option<MetricModel> {
    match *model {
        MetricModel::Chart(c) => Some(MetricModel::Chart(c.with_step(c.step / 2.0))),
        MetricModel::Conformal(mut c) => {
            c.base.step /= 2.0;
            Some(MetricModel::Conformal(c))
        }
        _ => None,
    }
}

pub fn beta(model: &MetricModel) -> Result<f64> {
    raw_integrals(model)?.beta()
}

pub fn yamabe_quotient(model: &MetricModel) -> Result<f64> {
    Ok(raw_integrals(model)?.yamabe_quotient())
}

/// Positive test function for the modified quotient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    Constant(f64),
    /// `u = e^{w}`.
    Exp(ConformalFactor),
}

/// `⟨u, ℒu⟩ / ‖u‖²_{L⁴}` with `ℒ = −6Δ + R − 2√6‖W⁺‖`.
pub fn modified_quotient(model: &MetricModel, u: &TestFunction) -> Result<f64> {
    let (numerator, quartic) = match *u {
        TestFunction::Constant(c) => {
            if !(c > 0.0) {
                return Err(domain(alloc::format!("test function must be positive, got {c}")));
            }
            let raw = raw_integrals(model)?;
            (c * c * raw.f_plus, c * c * c * c * raw.volume)
        }
        TestFunction::Exp(w) if w.is_constant() => {
            return modified_quotient(model, &TestFunction::Constant(libm::exp(w.constant)));
        }
        TestFunction::Exp(w) => {
            let geometry = match model {
                MetricModel::Chart(c) => c.geometry,
                MetricModel::Conformal(c) => c.base.geometry,
                _ => {
                    return Err(domain("homogeneous models only accept constant test functions"))
                }
            };
            let step = match model {
                MetricModel::Chart(c) => c.step,
                MetricModel::Conformal(c) => c.base.step,
                _ => unreachable!(),
            };
            let metric_of = |x: &[f64; 4]| match model {
                MetricModel::Chart(c) => crate::zoo::CoordinateMetric::metric_at(c, x),
                MetricModel::Conformal(c) => crate::zoo::CoordinateMetric::metric_at(c, x),
                _ => unreachable!(),
            };
            let [num, quartic] = model.integrate_full(|s: &ChartSample| {
                let dec = decompose(&s.curvature, &s.metric)?;
                let ux = |y: &[f64; 4]| libm::exp(w.eval(&geometry, y));
                let jet = fd::scalar_jet(&ux, &s.coordinates, step);
                let mjet = fd::metric_jet(&metric_of, &s.coordinates, step);
                let gi = s.metric.inverse();
                let gamma = fd::christoffel(&mjet, &gi);
                let lap = fd::laplacian(&jet, &gamma, &gi);
                let v = jet.value;
                Ok([
                    s.volume_weight * (-6.0 * v * lap + dec.f_plus() * v * v),
                    s.volume_weight * v * v * v * v,
                ])
            })?;
            (num, quartic)
        }
    };
    Ok(numerator / libm::sqrt(quartic))
}

/// Largest change of a conformal invariant accepted by `conformal_check`.
pub const CONFORMAL_TOLERANCE: f64 = 1e-3;

/// The conformal invariants of a chart metric before and after `g ↦ e^{2w} g`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ConformalCheck {
    pub volume: [f64; 2],
    pub sigma2: [f64; 2],
    pub weyl_sq: [f64; 2],
    pub beta: [Option<f64>; 2],
    /// `|Δ∫σ₂| / max(1, |∫σ₂|)`.
    pub sigma2_change: f64,
    /// `|Δ∫‖W‖²| / max(8π², ∫‖W‖²)`; the floor keeps conformally flat bases meaningful.
    pub weyl_change: f64,
    /// Relative when `|β| > 1`, absolute otherwise; `None` if β is undefined on either side.
    pub beta_change: Option<f64>,
    pub passed: bool,
}

pub fn conformal_check(base: &ChartMetric, factor: &ConformalFactor) -> Result<ConformalCheck> {
    if base.factor.is_some() {
        return Err(contract("conformal check expects an undeformed base chart"));
    }
    let before = raw_integrals(&MetricModel::Chart(*base))?;
    let after = raw_integrals(&MetricModel::Chart(base.with_factor(*factor)))?;
    let sigma2_change = (after.sigma2 - before.sigma2).abs() / before.sigma2.abs().max(1.0);
    let weyl_change = (after.weyl_sq - before.weyl_sq).abs() / before.weyl_sq.abs().max(8.0 * PI2);
    let beta = [before.beta().ok(), after.beta().ok()];
    let beta_change = match beta {
        [Some(b0), Some(b1)] if b0.abs() > 1.0 => Some((b1 - b0).abs() / b0.abs()),
        [Some(b0), Some(b1)] => Some((b1 - b0).abs()),
        _ => None,
    };
    let passed = sigma2_change <= CONFORMAL_TOLERANCE
        && weyl_change <= CONFORMAL_TOLERANCE
        && beta_change.is_none_or(|d| d <= CONFORMAL_TOLERANCE)
        && beta[0].is_some() == beta[1].is_some();
    Ok(ConformalCheck {
        volume: [before.volume, after.volume],
        sigma2: [before.sigma2, after.sigma2],
        weyl_sq: [before.weyl_sq, after.weyl_sq],
        beta,
        sigma2_change,
        weyl_change,
        beta_change,
        passed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct GapCheck {
    pub weyl_plus_term: f64,
    pub scalar_sq: f64,
    /// `24∫‖W⁺‖² − ∫R²`; the inequality asks for this to be `≥ 0`.
    pub residual: f64,
    pub holds: bool,
    /// Residual vanishes and `F⁺ ≡ 0`.
    pub equality: bool,
}

pub fn gap_check(model: &MetricModel) -> Result<GapCheck> {
    let raw = raw_integrals(model)?;
    let tol = tolerance_for(model);
    let weyl_plus_term = 24.0 * raw.weyl_plus_sq;
    let residual = weyl_plus_term - raw.scalar_sq;
    let scale = weyl_plus_term.abs().max(raw.scalar_sq.abs()).max(1.0);
    let equality = residual.abs() <= tol * scale && raw.f_plus_sq <= tol * scale;
    Ok(GapCheck {
        weyl_plus_term,
        scalar_sq: raw.scalar_sq,
        residual,
        holds: residual >= -tol * scale,
        equality,
    })
}

/// A checked inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Bound {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Bound {
    fn new(lhs: f64, rhs: f64, tol: f64) -> Self {
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        Self { lhs, rhs, holds: lhs <= rhs + tol * scale }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct PinchRecord {
    pub beta: f64,
    /// `ε` with `β = 4(1 + ε)`.
    pub epsilon: f64,
    pub regime: String,
    /// Topology the predictions assume: `(χ, τ) = (3, 1)`.
    pub assumed_topology: [i32; 2],
    pub topology: [i32; 2],
    pub topology_mismatch: bool,
    /// `6ε/(2+ε) π²`; `None` when `2 + ε ≤ 0`.
    pub predicted_weyl_minus_sq: Option<f64>,
    pub predicted_weyl_plus_sq: Option<f64>,
    pub weyl_minus_sq: f64,
    pub weyl_plus_sq: f64,
    pub weyl_minus_residual: Option<f64>,
    pub weyl_plus_residual: Option<f64>,
    /// `24π/√(2+ε) ≤ Vol^{-1/2}∫R`.
    pub yamabe_bound: Option<Bound>,
    /// `∫|E|² ≤ 6∫‖W⁻‖²`.
    pub traceless_ricci_bound: Bound,
    /// The same bound with `∫‖W⁻‖` unsquared, as sometimes printed.
    pub traceless_ricci_bound_unsquared: Bound,
    /// `F⁺` constant and non-positive.
    pub modified_yamabe_candidate: bool,
    /// `∫(R − R̄)² ≤ 72∫‖W⁻‖²`, checked on candidates only.
    pub scalar_deviation_bound: Option<Bound>,
    /// Caller-supplied `μ₊` and the check `μ₊ Y/12 ≤ 3∫‖W⁻‖²`.
    pub mu_plus: Option<f64>,
    pub mu_plus_bound: Option<Bound>,
    /// `∫σ₂ ≤ 3π²`, forced by Gauss–Bonnet for `(χ, τ) = (3, 1)`.
    pub sigma2_bound: Bound,
    /// `∫σ₂ ≤ 12π²`, the weaker form.
    pub sigma2_bound_weak: Bound,
}

pub fn pinch_suite(model: &MetricModel, mu_plus: Option<f64>) -> Result<PinchRecord> {
    let raw = raw_integrals(model)?;
    let beta = raw.beta()?;
    let tol = tolerance_for(model);
    let epsilon = beta / 4.0 - 1.0;
    let (chi, tau) = model.topology();
    let predicted_weyl_minus_sq = (2.0 + epsilon > 0.0).then(|| 6.0 * epsilon / (2.0 + epsilon) * PI2);
    let predicted_weyl_plus_sq = predicted_weyl_minus_sq.map(|m| 12.0 * PI2 + m);
    let yamabe = raw.yamabe_quotient();
    let candidate = raw.f_plus_deviation_sq() <= tol * raw.f_plus_sq.max(1.0)
        && raw.f_plus <= tol * raw.volume.max(1.0);
    Ok(PinchRecord {
        beta,
        epsilon,
        regime: String::from(regime(beta, tol)),
        assumed_topology: [3, 1],
        topology: [chi, tau],
        topology_mismatch: (chi, tau) != (3, 1),
        predicted_weyl_minus_sq,
        predicted_weyl_plus_sq,
        weyl_minus_sq: raw.weyl_minus_sq,
        weyl_plus_sq: raw.weyl_plus_sq,
        weyl_minus_residual: predicted_weyl_minus_sq.map(|p| raw.weyl_minus_sq - p),
        weyl_plus_residual: predicted_weyl_plus_sq.map(|p| raw.weyl_plus_sq - p),
        yamabe_bound: (2.0 + epsilon > 0.0)
            .then(|| Bound::new(24.0 * PI / libm::sqrt(2.0 + epsilon), yamabe, tol)),
        traceless_ricci_bound: Bound::new(raw.traceless_ricci_sq, 6.0 * raw.weyl_minus_sq, tol),
        traceless_ricci_bound_unsquared: Bound::new(raw.traceless_ricci_sq, 6.0 * raw.weyl_minus, tol),
        modified_yamabe_candidate: candidate,
        scalar_deviation_bound: candidate
            .then(|| Bound::new(raw.scalar_deviation_sq(), 72.0 * raw.weyl_minus_sq, tol)),
        mu_plus,
        mu_plus_bound: mu_plus.map(|mu| Bound::new(mu * yamabe / 12.0, 3.0 * raw.weyl_minus_sq, tol)),
        sigma2_bound: Bound::new(raw.sigma2, 3.0 * PI2, tol),
        sigma2_bound_weak: Bound::new(raw.sigma2, 12.0 * PI2, tol),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn fubini_study_report() {
        let r = global_report(&MetricModel::FubiniStudy { lambda: 6.0 }).unwrap();
        assert!(rel(r.total_weyl_plus_sq, 12.0 * PI2) < 1e-12);
        assert!(rel(r.total_sigma2, 3.0 * PI2) < 1e-12);
        assert!(rel(r.beta.unwrap(), 4.0) < 1e-12);
        assert_eq!(r.regime.as_deref(), Some("boundary beta = 4"));
        assert!(r.gap_residual.abs() < 1e-9);
    }

    #[test]
    fn sphere_has_zero_beta_and_failing_gap() {
        let m = MetricModel::RoundS4 { r: 1.0 };
        let g = gap_check(&m).unwrap();
        assert!(!g.holds);
        assert!(rel(g.residual, -384.0 * PI2) < 1e-12);
        assert!(beta(&m).unwrap().abs() < 1e-14);
    }

    #[test]
    fn negative_test_function_is_rejected() {
        let m = MetricModel::RoundS4 { r: 1.0 };
        assert!(matches!(modified_quotient(&m, &TestFunction::Constant(-1.0)), Err(LabError::Domain(_))));
        let w = ConformalFactor::random(1, 0.1, 5);
        assert!(matches!(modified_quotient(&m, &TestFunction::Exp(w)), Err(LabError::Domain(_))));
    }

    #[test]
    fn regimes() {
        assert_eq!(regime(0.0, 1e-9), "beta < 4");
        assert_eq!(regime(4.0 + 1e-12, 1e-9), "boundary beta = 4");
        assert_eq!(regime(6.0, 1e-9), "4 <= beta < 8");
        assert_eq!(regime(8.0 - 1e-12, 1e-9), "beta >= 8");
    }
}
