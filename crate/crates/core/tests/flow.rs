use core::f64::consts::{LN_2, PI};

use approx::assert_relative_eq;

use ricci_lab_core::flow::{
    check_identity, g2_monitor, integral_evolution_check, integrate_flow, pointwise_evolution_check, reduced_rhs,
    FlowConfig, FlowState, INTEGRAL,
};
use ricci_lab_core::zoo::{ChartGeometry, ChartMetric, Family, MetricModel};
use ricci_lab_core::LabError;

fn cfg(dt: f64, t_max: f64) -> FlowConfig {
    FlowConfig { dt, t_max, ..FlowConfig::default() }
}

#[test]
fn sphere_closed_form() {
    let s0 = FlowState::from_model(&MetricModel::RoundS4 { r: 2.0 }).unwrap();
    let trace = integrate_flow(&s0, &cfg(1e-3, 0.4)).unwrap();
    assert!(!trace.extinct);
    assert_eq!(trace.snapshots.len(), 401);
    for s in &trace.snapshots {
        let r2 = 4.0 - 6.0 * s.state.t;
        assert_relative_eq!(s.state.squared[0], r2, max_relative = 1e-10);
        assert_relative_eq!(s.mean_scalar, 12.0 / r2, max_relative = 1e-10);
        assert_relative_eq!(s.volume, 8.0 * PI * PI / 3.0 * r2 * r2, max_relative = 1e-10);
        assert!(s.total_g2.abs() < 1e-9);
    }
    assert_relative_eq!(s0.extinction_time(), 2.0 / 3.0, max_relative = 1e-15);
}

#[test]
fn product_closed_form() {
    let s0 = FlowState::from_model(&MetricModel::ProductS2S2 { a: 2.0, b: 1.0 }).unwrap();
    assert_eq!(s0.family, Family::ProductS2S2);
    assert_eq!(reduced_rhs(&s0).unwrap(), [-2.0, -2.0]);
    let trace = integrate_flow(&s0, &cfg(1e-3, 0.4)).unwrap();
    let last = trace.snapshots.last().unwrap();
    assert_relative_eq!(last.state.squared[0], 3.2, max_relative = 1e-10);
    assert_relative_eq!(last.state.squared[1], 0.2, max_relative = 1e-10);
    for s in trace.snapshots.iter().step_by(50) {
        let (a2, b2) = (4.0 - 2.0 * s.state.t, 1.0 - 2.0 * s.state.t);
        let (k1, k2) = (1.0 / a2, 1.0 / b2);
        let vol = 16.0 * PI * PI * a2 * b2;
        assert_relative_eq!(s.report.total_traceless_ricci_sq, (k1 - k2).powi(2) * vol, max_relative = 1e-9);
        assert_relative_eq!(s.mean_scalar, 2.0 * (k1 + k2), max_relative = 1e-10);
    }
    assert!(trace.closed_form_error() < 1e-10);
}

#[test]
fn fubini_study_stays_einstein() {
    let s0 = FlowState::from_model(&MetricModel::FubiniStudy { lambda: 6.0 }).unwrap();
    let trace = integrate_flow(&s0, &cfg(1e-3, 0.05)).unwrap();
    for s in &trace.snapshots {
        assert_relative_eq!(s.state.squared[0], 1.0 - 12.0 * s.state.t, max_relative = 1e-8);
        assert!(s.report.total_traceless_ricci_sq.abs() < 1e-9);
        assert_relative_eq!(s.report.beta.unwrap(), 4.0, max_relative = 1e-10);
    }
}

#[test]
fn extinction() {
    let s0 = FlowState::from_model(&MetricModel::ProductS2S2 { a: 1.0, b: 1.0 }).unwrap();
    let trace = integrate_flow(&s0, &cfg(1e-3, 1.0)).unwrap();
    assert!(trace.extinct);
    assert!(trace.snapshots.last().unwrap().state.t < 0.5);
    let dead = FlowState { squared: [0.0, 1.0], ..s0 };
    assert!(matches!(reduced_rhs(&dead), Err(LabError::Extinct(_))));
}

#[test]
fn normalized_flow_keeps_volume() {
    let model = MetricModel::ProductS2S2 { a: 1.5, b: 1.0 };
    let s0 = FlowState::from_model(&model).unwrap();
    let trace = integrate_flow(&s0, &FlowConfig { normalized: true, ..cfg(1e-3, 0.2) }).unwrap();
    let v0 = model.volume().unwrap();
    assert!(trace.snapshots.iter().all(|s| (s.volume / v0 - 1.0).abs() < 1e-12));
    let sphere = FlowState::from_model(&MetricModel::RoundS4 { r: 1.0 }).unwrap();
    let trace = integrate_flow(&sphere, &FlowConfig { normalized: true, ..cfg(1e-2, 1.0) }).unwrap();
    assert_relative_eq!(trace.snapshots.last().unwrap().state.squared[0], 1.0, max_relative = 1e-12);
}

#[test]
fn evolution_identities_hold() {
    let runs = [
        (MetricModel::ProductS2S2 { a: 2.0, b: 1.0 }, 0.3),
        (MetricModel::RoundS4 { r: 2.0 }, 0.4),
        (MetricModel::FubiniStudy { lambda: 6.0 }, 0.05),
    ];
    for (model, t_max) in runs {
        let trace = integrate_flow(&FlowState::from_model(&model).unwrap(), &cfg(1e-3, t_max)).unwrap();
        let checks = pointwise_evolution_check(&trace).unwrap().into_iter().chain(integral_evolution_check(&trace).unwrap());
        for check in checks {
            assert!(check.passed, "{model:?} {}: {} / {}", check.name, check.max_excess_violation, check.scale);
        }
    }
    let s0 = FlowState::from_model(&MetricModel::ProductS2S2 { a: 2.0, b: 1.0 }).unwrap();
    let trace = integrate_flow(&s0, &cfg(1e-3, 0.3)).unwrap();
    // d/dt Vol = −∫R
    let volume = check_identity(&trace, &INTEGRAL[0]);
    assert!(volume.max_residual < 1e-6 * volume.scale.max(1.0));
}

#[test]
fn monitor_constants() {
    let s0 = FlowState::from_model(&MetricModel::ProductS2S2 { a: 1.2, b: 1.0 }).unwrap();
    let trace = integrate_flow(&s0, &cfg(1e-3, 0.1)).unwrap();
    let m = g2_monitor(&trace, 10.0, 1.0).unwrap();
    assert_relative_eq!(m.a_tilde, 40.0 / 3.0, max_relative = 1e-15);
    assert_relative_eq!(m.b_tilde, 1.0 / 12.0, max_relative = 1e-15);
    assert_relative_eq!(m.t0, 3.0 * LN_2 / 40.0, max_relative = 1e-15);
    assert_relative_eq!(m.t0_literal, 7.5 * LN_2, max_relative = 1e-15);
    assert_relative_eq!(m.epsilon0, 2.0 * trace.snapshots[0].total_g2, max_relative = 1e-15);
    assert_eq!(m.rows.len(), trace.snapshots.len());
    assert!(m.volume_window_held);
    assert!(g2_monitor(&trace, -1.0, 1.0).is_err());
}

#[test]
fn rejects_non_homogeneous_and_bad_config() {
    let chart = MetricModel::Chart(ChartMetric::new(ChartGeometry::S4Angles { radius: 1.0 }));
    assert!(matches!(FlowState::from_model(&chart), Err(LabError::UnsupportedFamily(_))));
    let s0 = FlowState::from_model(&MetricModel::RoundS4 { r: 1.0 }).unwrap();
    assert!(integrate_flow(&s0, &cfg(0.0, 0.1)).is_err());
    assert!(integrate_flow(&s0, &cfg(0.1, 0.01)).is_err());
}
