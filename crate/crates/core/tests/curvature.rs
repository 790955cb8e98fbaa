use approx::assert_relative_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ricci_lab_core::curvature::{
    decompose, decompose_orthonormal, kulkarni_nomizu, singer_thorpe_blocks, AlgebraicCurvature, Metric4,
    Orientation,
};
use ricci_lab_core::inequality::sample_curvature;
use ricci_lab_core::linalg::{self, Mat4};
use ricci_lab_core::zoo::{fd, fubini_study_curvature, product_curvature, round_s4_curvature};
use ricci_lab_core::LabError;

mod common;

use common::oracle_weyl_halves;

fn sectional(rm: &AlgebraicCurvature, x: &[f64; 4], y: &[f64; 4]) -> f64 {
    let dot = |u: &[f64; 4], v: &[f64; 4]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    rm.evaluate(x, y, x, y) / (dot(x, x) * dot(y, y) - dot(x, y).powi(2))
}

#[test]
fn sphere_sectional_curvature_on_random_planes() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for r in [0.5, 1.0, 3.0] {
        let rm = round_s4_curvature(r);
        for _ in 0..200 {
            let x: [f64; 4] = core::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let y: [f64; 4] = core::array::from_fn(|_| rng.random_range(-1.0..1.0));
            assert_relative_eq!(sectional(&rm, &x, &y), 1.0 / (r * r), max_relative = 1e-10);
        }
        let dec = decompose(&rm, &Metric4::euclidean()).unwrap();
        assert_relative_eq!(dec.scalar(), 12.0 / (r * r), max_relative = 1e-14);
        assert!(dec.weyl_norm_sq() < 1e-26);
        assert!(dec.traceless_ricci_norm_sq() < 1e-26);
    }
}

#[test]
fn sphere_operator_is_identity() {
    let rm = kulkarni_nomizu(&linalg::scale(&linalg::identity(), 0.5), &linalg::identity()).unwrap();
    assert!(linalg::max_abs(&linalg::sub(&rm.to_operator(), &linalg::identity())) < 1e-15);
}

#[test]
fn weyl_halves_match_hodge_star_oracle() {
    for index in 0..50 {
        let rm = sample_curvature(17, index, 2.0);
        let dec = decompose(&rm, &Metric4::euclidean()).unwrap();
        let (wp, wm) = oracle_weyl_halves(rm.components());
        assert_relative_eq!(dec.weyl_plus_norm_sq(), wp, max_relative = 1e-10, epsilon = 1e-13);
        assert_relative_eq!(dec.weyl_minus_norm_sq(), wm, max_relative = 1e-10, epsilon = 1e-13);
        let flipped = decompose_orthonormal(&rm, linalg::identity(), Orientation::Negative);
        assert_relative_eq!(flipped.weyl_plus_norm_sq(), wm, max_relative = 1e-10, epsilon = 1e-13);
    }
}

#[test]
fn product_oracle() {
    let dec = decompose(&product_curvature(1.0, 1.0), &Metric4::euclidean()).unwrap();
    assert_relative_eq!(dec.scalar(), 4.0, max_relative = 1e-14);
    assert!(dec.traceless_ricci_norm_sq() < 1e-28);
    let (wp, wm) = oracle_weyl_halves(product_curvature(1.0, 1.0).components());
    assert_relative_eq!(dec.weyl_plus_norm_sq(), wp, max_relative = 1e-12);
    assert_relative_eq!(dec.weyl_minus_norm_sq(), wm, max_relative = 1e-12);
    assert_relative_eq!(wp, 2.0 / 3.0, max_relative = 1e-12);

    // k₁ = 1/a², k₂ = 1/b²: |E|² = (k₁−k₂)², WEE = (2/3)(k₁+k₂)(k₁−k₂)²
    let (a, b) = (0.7, 1.9);
    let (k1, k2) = (1.0 / (a * a), 1.0 / (b * b));
    let dec = decompose(&product_curvature(a, b), &Metric4::euclidean()).unwrap();
    assert_relative_eq!(dec.traceless_ricci_norm_sq(), (k1 - k2).powi(2), max_relative = 1e-12);
    assert_relative_eq!(dec.wee(), 2.0 / 3.0 * (k1 + k2) * (k1 - k2).powi(2), max_relative = 1e-12);
    assert_relative_eq!(dec.sigma2(), (4.0 * k1 * k2 - k1 * k1 - k2 * k2) / 12.0, max_relative = 1e-12);
}

/// Fubini–Study in affine coordinates `(x₁, y₁, x₂, y₂)` on `ℂ²`, `Ric = 6g`.
fn fubini_study_affine(p: &[f64; 4]) -> Mat4 {
    let z = [(p[0], p[1]), (p[2], p[3])];
    let n = 1.0 + p.iter().map(|v| v * v).sum::<f64>();
    // real and imaginary parts of z̄_a dz_a as covectors
    let re = [p[0], p[1], p[2], p[3]];
    let im = [-z[0].1, z[0].0, -z[1].1, z[1].0];
    let mut g = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let flat = if i == j { n } else { 0.0 };
            g[i][j] = (flat - re[i] * re[j] - im[i] * im[j]) / (n * n);
        }
    }
    g
}

#[test]
fn fubini_study_closed_form_matches_affine_chart() {
    let closed = decompose(&fubini_study_curvature(6.0), &Metric4::euclidean()).unwrap();
    for p in [[0.1, -0.3, 0.4, 0.2], [0.8, 0.1, -0.5, 0.6]] {
        let jet = fd::metric_jet(&fubini_study_affine, &p, 1e-2);
        let g = Metric4::new(linalg::symmetrize(&jet.value), Orientation::Positive).unwrap();
        let gamma = fd::christoffel(&jet, &g.inverse());
        let dec = decompose(&fd::riemann(&jet, &gamma), &g).unwrap();
        assert_relative_eq!(dec.scalar(), 24.0, max_relative = 1e-6);
        assert!(dec.traceless_ricci_norm_sq() < 1e-10);
        assert!(dec.weyl_minus_norm_sq() < 1e-10);
        assert_relative_eq!(dec.weyl_plus_norm_sq(), closed.weyl_plus_norm_sq(), max_relative = 1e-6);
        assert_relative_eq!(dec.weyl_plus_det(), closed.weyl_plus_det(), max_relative = 1e-6);
    }
    assert_relative_eq!(closed.weyl_plus_norm_sq(), 24.0, max_relative = 1e-14);
    assert!(closed.f_plus().abs() < 1e-13);
    let mut ev = linalg::symmetric_eigenvalues(closed.weyl_plus_block());
    ev.sort_by(f64::total_cmp);
    assert_relative_eq!(ev[0], -2.0, max_relative = 1e-13);
    assert_relative_eq!(ev[2], 4.0, max_relative = 1e-13);
}

#[test]
fn coordinate_frame_agrees_with_orthonormal_frame() {
    let l = [[1.3, 0.0, 0.0, 0.0], [0.2, 0.9, 0.0, 0.0], [-0.4, 0.1, 1.1, 0.0], [0.3, 0.5, -0.2, 0.7]];
    let g = Metric4::new(linalg::mat_mul(&l, &linalg::transpose(&l)), Orientation::Positive).unwrap();
    let on = sample_curvature(9, 1, 1.0);
    let coords = on.transform(&linalg::transpose(&l));
    let a = decompose(&coords, &g).unwrap();
    let b = decompose(&on, &Metric4::euclidean()).unwrap();
    assert_relative_eq!(a.scalar(), b.scalar(), max_relative = 1e-12);
    assert_relative_eq!(a.sigma2(), b.sigma2(), max_relative = 1e-10);
    assert_relative_eq!(a.weyl_plus_norm_sq(), b.weyl_plus_norm_sq(), max_relative = 1e-10);
    assert_relative_eq!(a.weyl_minus_norm_sq(), b.weyl_minus_norm_sq(), max_relative = 1e-10);
    assert_relative_eq!(a.wee(), b.wee(), max_relative = 1e-9, epsilon = 1e-12);
    assert!(a.reconstruction_residual(&g) < 1e-12);
}

#[test]
fn sigma2_two_ways() {
    for index in 0..20 {
        let dec = decompose(&sample_curvature(4, index, 1.0), &Metric4::euclidean()).unwrap();
        assert_relative_eq!(dec.sigma2(), dec.sigma2_from_eigenvalues(), max_relative = 1e-10, epsilon = 1e-12);
    }
}

#[test]
fn block_identity_and_reassembly() {
    let g = Metric4::euclidean();
    for index in 0..20 {
        let rm = sample_curvature(8, index, 1.5);
        let blocks = singer_thorpe_blocks(&rm, &g);
        let dec = decompose(&rm, &g).unwrap();
        assert_relative_eq!(dec.traceless_ricci_norm_sq(), 4.0 * blocks.b_singular_sq_sum(), max_relative = 1e-10);
        assert!(blocks.reassemble(Orientation::Positive).sub(&rm).max_abs() < 1e-13);
    }
}

#[test]
fn rejects_non_curvature_input() {
    let mut r = [[[[0.0; 4]; 4]; 4]; 4];
    r[0][1][0][1] = 1.0;
    let bad = AlgebraicCurvature::from_components(r);
    assert!(matches!(decompose(&bad, &Metric4::euclidean()), Err(LabError::Contract(_))));
    assert!(matches!(
        Metric4::new(linalg::diag([1.0, -1.0, 1.0, 1.0]), Orientation::Positive),
        Err(LabError::SingularMetric)
    ));
}
