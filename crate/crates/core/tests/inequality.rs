use approx::assert_relative_eq;

use ricci_lab_core::curvature::{decompose, singer_thorpe_blocks, Metric4};
use ricci_lab_core::inequality::{
    check_block_bound, check_sharp33, check_wee, check_young, polish_sharp33, run_campaign, sample_curvature,
    sample_sharp33, sharp33_extremizer, FuzzConfig, INEQUALITIES, SHARP_CONSTANT,
};
use ricci_lab_core::linalg;
use ricci_lab_core::LabError;

mod common;

/// Largest `|λ|` of a symmetric trace-free 3×3 matrix from the trigonometric
/// solution of its characteristic cubic `λ³ − pλ − q = 0`.
fn cubic_spectral_radius(a: &[[f64; 3]; 3]) -> f64 {
    let p = 0.5 * linalg::frobenius_sq(a);
    let q = linalg::det3(a);
    if p == 0.0 {
        return 0.0;
    }
    let r = 2.0 * (p / 3.0).sqrt();
    let phi = (3.0 * q / (p * r)).clamp(-1.0, 1.0).acos() / 3.0;
    (0..3)
        .map(|k| (r * (phi - 2.0 * core::f64::consts::PI * k as f64 / 3.0).cos()).abs())
        .fold(0.0, f64::max)
}

#[test]
fn sharp_constant() {
    assert_relative_eq!(SHARP_CONSTANT, 6f64.sqrt() / 3.0, max_relative = 1e-15);
    let (a, x) = sharp33_extremizer();
    assert!(check_sharp33(&a, &x).unwrap().margin.abs() < 1e-15);
}

#[test]
fn sharp33_against_cubic_oracle() {
    for index in 0..500 {
        let (a, x) = sample_sharp33(3, index, 2.0);
        let m = check_sharp33(&a, &x).unwrap();
        assert!(m.holds());
        let top = cubic_spectral_radius(&a);
        let x2: f64 = x.iter().map(|v| v * v).sum();
        assert!(m.lhs <= top * x2 * (1.0 + 1e-12));
        assert!(top <= SHARP_CONSTANT * linalg::frobenius_sq(&a).sqrt() * (1.0 + 1e-12));
        let (_, polished) = polish_sharp33(&a).unwrap();
        let norm = linalg::frobenius_sq(&a).sqrt();
        assert_relative_eq!(polished, SHARP_CONSTANT - top / norm, epsilon = 1e-12);
    }
}

#[test]
fn sharp33_rejects_trace() {
    let a = linalg::diag([1.0, 0.0, 0.0]);
    assert!(matches!(check_sharp33(&a, &[1.0, 0.0, 0.0]), Err(LabError::Domain(_))));
}

#[test]
fn wee_matches_oracle() {
    for index in 0..100 {
        let rm = sample_curvature(11, index, 1.0);
        let dec = decompose(&rm, &Metric4::euclidean()).unwrap();
        assert_relative_eq!(dec.wee(), common::oracle_wee(rm.components()), max_relative = 1e-10, epsilon = 1e-12);
        assert!(check_wee(&dec).holds());
        let bm = check_block_bound(&singer_thorpe_blocks(&rm, &Metric4::euclidean()), &dec);
        assert!(bm.block_bound.holds() && bm.sharp_step.holds());
        assert!(bm.identity_residual.abs() < 1e-10 * dec.traceless_ricci_norm_sq().max(1.0));
    }
}

#[test]
fn young() {
    assert!(check_young(2.0, 3.0, 1.5, 3.0).unwrap().holds());
    // equality at aᵖ = b^q
    assert!(check_young(1.0, 1.0, 1.5, 3.0).unwrap().margin.abs() < 1e-15);
    assert!(check_young(1.0, 1.0, 2.0, 3.0).is_err());
    assert!(check_young(-1.0, 1.0, 2.0, 2.0).is_err());
}

#[test]
fn campaign_is_deterministic_and_passes() {
    let cfg = FuzzConfig { seed: 7, samples: 20_000, scale: 1.0, report_top_k: 3 };
    let a = run_campaign(&cfg).unwrap();
    let b = run_campaign(&cfg).unwrap();
    assert_eq!(a, b);
    assert!(a.passed());
    assert_eq!(a.inequalities.len(), INEQUALITIES.len());
    for stats in &a.inequalities {
        assert_eq!(stats.checked, 20_000);
        assert_eq!(stats.violations, 0);
        assert!(stats.top.len() <= 3);
        assert!(stats.top.windows(2).all(|w| w[0].normalized_margin <= w[1].normalized_margin));
    }
    let other = run_campaign(&FuzzConfig { seed: 8, ..cfg }).unwrap();
    assert_ne!(a.get("wee").unwrap().tightest, other.get("wee").unwrap().tightest);
}

#[test]
fn campaign_is_independent_of_chunking() {
    // sample k is the same whether or not later samples are drawn
    let small = run_campaign(&FuzzConfig { seed: 1, samples: 10_000, scale: 0.5, report_top_k: 1 }).unwrap();
    let large = run_campaign(&FuzzConfig { seed: 1, samples: 20_000, scale: 0.5, report_top_k: 1 }).unwrap();
    let (s, l) = (small.get("sharp33").unwrap(), large.get("sharp33").unwrap());
    assert!(l.tightest.normalized_margin <= s.tightest.normalized_margin);
    assert_eq!(sample_curvature(1, 9_999, 0.5), sample_curvature(1, 9_999, 0.5));
}

#[test]
fn invalid_config() {
    assert!(run_campaign(&FuzzConfig { samples: 0, ..FuzzConfig::default() }).is_err());
    assert!(run_campaign(&FuzzConfig { scale: -1.0, ..FuzzConfig::default() }).is_err());
}
