use core::f64::consts::PI;

use approx::assert_relative_eq;

use ricci_lab_core::invariants::{
    beta, conformal_check, gap_check, global_report, modified_quotient, pinch_suite, raw_integrals, regime, yamabe_quotient,
    TestFunction, EXACT_TOLERANCE,
};
use ricci_lab_core::zoo::{ChartGeometry, ChartMetric, ConformalFactor, MetricModel};
use ricci_lab_core::LabError;

const PI2: f64 = PI * PI;

#[test]
fn round_sphere_values() {
    for r in [0.5, 1.0, 2.0] {
        let raw = raw_integrals(&MetricModel::RoundS4 { r }).unwrap();
        assert_relative_eq!(raw.scalar_sq, 384.0 * PI2, max_relative = 1e-12);
        assert_relative_eq!(raw.sigma2, 4.0 * PI2, max_relative = 1e-12);
        assert!(raw.weyl_sq.abs() < 1e-12);
        assert_relative_eq!(raw.euler(), 2.0, max_relative = 1e-12);
        assert_relative_eq!(raw.yamabe_quotient(), 8.0 * 6f64.sqrt() * PI, max_relative = 1e-12);
    }
    let report = global_report(&MetricModel::RoundS4 { r: 2.0 }).unwrap();
    assert_eq!(report.regime.as_deref(), Some("beta < 4"));
    assert!(report.positive_scalar);
}

#[test]
fn fubini_study_values() {
    let fs = MetricModel::FubiniStudy { lambda: 6.0 };
    let raw = raw_integrals(&fs).unwrap();
    assert_relative_eq!(raw.volume, PI2 / 2.0, max_relative = 1e-14);
    assert_relative_eq!(raw.weyl_plus_sq, 12.0 * PI2, max_relative = 1e-12);
    assert!(raw.weyl_minus_sq.abs() < 1e-12);
    assert_relative_eq!(raw.sigma2, 3.0 * PI2, max_relative = 1e-12);
    assert_relative_eq!(raw.euler(), 3.0, max_relative = 1e-12);
    assert_relative_eq!(raw.signature(), 1.0, max_relative = 1e-12);
    assert_relative_eq!(beta(&fs).unwrap(), 4.0, max_relative = 1e-12);
    assert_relative_eq!(yamabe_quotient(&fs).unwrap(), 12.0 * 2f64.sqrt() * PI, max_relative = 1e-12);
    // β and the Yamabe quotient do not see the scale
    let scaled = fs.scaled(0.3).unwrap();
    assert_relative_eq!(beta(&scaled).unwrap(), 4.0, max_relative = 1e-12);
    assert_relative_eq!(yamabe_quotient(&scaled).unwrap(), 12.0 * 2f64.sqrt() * PI, max_relative = 1e-12);
    assert_eq!(global_report(&fs).unwrap().regime.as_deref(), Some("boundary beta = 4"));
}

#[test]
fn product_values() {
    let raw = raw_integrals(&MetricModel::ProductS2S2 { a: 1.0, b: 1.0 }).unwrap();
    assert_relative_eq!(raw.weyl_sq, 64.0 * PI2 / 3.0, max_relative = 1e-12);
    assert_relative_eq!(raw.sigma2, 8.0 * PI2 / 3.0, max_relative = 1e-12);
    assert_relative_eq!(raw.beta().unwrap(), 8.0, max_relative = 1e-12);
    assert_relative_eq!(raw.euler(), 4.0, max_relative = 1e-12);
    assert!(raw.signature().abs() < 1e-12);
    // k = b²/a² = 4 lies outside (2 − √3, 2 + √3)
    let far = MetricModel::ProductS2S2 { a: 1.0, b: 2.0 };
    assert!(matches!(beta(&far), Err(LabError::UndefinedBeta(_))));
    assert!(global_report(&far).unwrap().beta.is_none());
}

#[test]
fn regimes() {
    assert_eq!(regime(3.0, EXACT_TOLERANCE), "beta < 4");
    assert_eq!(regime(4.0, EXACT_TOLERANCE), "boundary beta = 4");
    assert_eq!(regime(6.0, EXACT_TOLERANCE), "4 <= beta < 8");
    assert_eq!(regime(8.0, EXACT_TOLERANCE), "beta >= 8");
}

#[test]
fn gap_inequality() {
    let fs = gap_check(&MetricModel::FubiniStudy { lambda: 6.0 }).unwrap();
    assert!(fs.holds && fs.equality);
    assert_relative_eq!(fs.scalar_sq, 288.0 * PI2, max_relative = 1e-12);
    let product = gap_check(&MetricModel::ProductS2S2 { a: 1.0, b: 1.0 }).unwrap();
    // 24 · 32π²/3 = 16 · 16π², and F⁺ ≡ 0
    assert!(product.residual.abs() < 1e-9);
    assert!(product.equality);
    let sphere = gap_check(&MetricModel::RoundS4 { r: 1.0 }).unwrap();
    assert!(!sphere.holds);
}

#[test]
fn modified_quotient_examples() {
    let fs = MetricModel::FubiniStudy { lambda: 6.0 };
    assert!(modified_quotient(&fs, &TestFunction::Constant(1.7)).unwrap().abs() < 1e-10);
    let sphere = MetricModel::RoundS4 { r: 1.0 };
    let y = 8.0 * 6f64.sqrt() * PI;
    assert_relative_eq!(modified_quotient(&sphere, &TestFunction::Constant(0.4)).unwrap(), y, max_relative = 1e-12);
    assert!(modified_quotient(&sphere, &TestFunction::Constant(-1.0)).is_err());
    assert!(modified_quotient(&sphere, &TestFunction::Exp(ConformalFactor::random(1, 0.2, 5))).is_err());

    // on the round sphere ℒ is the conformal Laplacian and constants minimize
    let chart = MetricModel::Chart(ChartMetric::new(ChartGeometry::S4Angles { radius: 1.0 }).with_grid(10));
    let constant = modified_quotient(&chart, &TestFunction::Constant(1.0)).unwrap();
    assert_relative_eq!(constant, y, max_relative = 1e-4);
    for seed in [1, 2] {
        let q = modified_quotient(&chart, &TestFunction::Exp(ConformalFactor::random(seed, 0.3, 5))).unwrap();
        assert!(q > y * (1.0 + 1e-4), "seed {seed}: {q} vs {y}");
    }
}

#[test]
fn pinch_suite_examples() {
    let fs = pinch_suite(&MetricModel::FubiniStudy { lambda: 6.0 }, None).unwrap();
    assert!(fs.epsilon.abs() < 1e-12);
    assert!(!fs.topology_mismatch);
    assert!(fs.predicted_weyl_minus_sq.unwrap().abs() < 1e-10);
    assert_relative_eq!(fs.predicted_weyl_plus_sq.unwrap(), 12.0 * PI2, max_relative = 1e-12);
    assert!(fs.weyl_plus_residual.unwrap().abs() < 1e-9);
    assert!(fs.modified_yamabe_candidate);
    assert!(fs.traceless_ricci_bound.holds);
    assert!(fs.sigma2_bound.holds && fs.sigma2_bound_weak.holds);
    assert!(fs.yamabe_bound.unwrap().holds);
    assert!(fs.mu_plus.is_none());

    let product = pinch_suite(&MetricModel::ProductS2S2 { a: 1.0, b: 1.0 }, Some(1.0)).unwrap();
    assert!(product.topology_mismatch);
    assert_relative_eq!(product.epsilon, 1.0, max_relative = 1e-12);
    assert_relative_eq!(product.predicted_weyl_minus_sq.unwrap(), 2.0 * PI2, max_relative = 1e-12);
    assert!(product.mu_plus_bound.is_some());

    assert!(pinch_suite(&MetricModel::ProductS2S2 { a: 1.0, b: 2.0 }, None).is_err());
}

#[test]
fn conformal_check_on_sphere_chart() {
    let base = ChartMetric::new(ChartGeometry::S4Angles { radius: 1.0 }).with_grid(10);
    let check = conformal_check(&base, &ConformalFactor::random(4, 0.2, 5)).unwrap();
    assert!(check.passed, "{check:?}");
    assert!(check.volume[1] != check.volume[0]);
    assert_relative_eq!(check.sigma2[0], 4.0 * PI2, max_relative = 1e-4);
    assert!(conformal_check(&base.with_factor(ConformalFactor::constant(0.1)), &ConformalFactor::constant(0.0)).is_err());
}
