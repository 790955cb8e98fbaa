//! The metric families: closed-form homogeneous models, chart metrics with
//! finite-difference curvature, and conformal deformations of chart metrics.

pub mod chart;
pub mod fd;
pub mod quadrature;

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::curvature::{AlgebraicCurvature, Metric4, Orientation};
use crate::error::{contract, LabError, Result};
use crate::linalg::{self, CompensatedSum, Mat4, Vec4};

pub use chart::{AxisRules, ChartGeometry, ChartMetric, ChartSample, ConformalFactor, ConformalModel, CoordinateMetric};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Einstein constant at which the Fubini–Study metric has holomorphic
/// sectional curvature 4.
pub const FS_STANDARD_LAMBDA: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "snake_case"))]
pub enum Family {
    RoundS4,
    ProductS2S2,
    FubiniStudy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricModel {
    /// Round sphere of radius `r`.
    RoundS4 { r: f64 },
    /// `S²(a) × S²(b)`.
    ProductS2S2 { a: f64, b: f64 },
    /// Fubini–Study metric on `ℂP²` with `Ric = λ g`.
    FubiniStudy { lambda: f64 },
    Chart(ChartMetric),
    Conformal(ConformalModel),
}

impl MetricModel {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(LabError::Domain(alloc::format!("{name} must be positive and finite, got {v}")))
            }
        };
        match *self {
            MetricModel::RoundS4 { r } => positive(r, "radius r"),
            MetricModel::ProductS2S2 { a, b } => positive(a, "radius a").and(positive(b, "radius b")),
            MetricModel::FubiniStudy { lambda } => positive(lambda, "Einstein constant lambda"),
            MetricModel::Chart(c) => c.validate(),
            MetricModel::Conformal(c) => c.validate(),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.family().is_some()
    }

    pub fn family(&self) -> Option<Family> {
        match self {
            MetricModel::RoundS4 { .. } => Some(Family::RoundS4),
            MetricModel::ProductS2S2 { .. } => Some(Family::ProductS2S2),
            MetricModel::FubiniStudy { .. } => Some(Family::FubiniStudy),
            _ => None,
        }
    }

    /// Euler characteristic and signature of the underlying manifold.
    pub fn topology(&self) -> (i32, i32) {
        match self {
            MetricModel::RoundS4 { .. } => (2, 0),
            MetricModel::ProductS2S2 { .. } => (4, 0),
            MetricModel::FubiniStudy { .. } => (3, 1),
            MetricModel::Chart(c) => chart_topology(&c.geometry),
            MetricModel::Conformal(c) => chart_topology(&c.base.geometry),
        }
    }

    /// The model with every length multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(LabError::Domain(alloc::format!("scale factor must be positive, got {c}")));
        }
        let shift = libm::log(c);
        let scale_chart = |mut m: ChartMetric| {
            m.factor = Some(match m.factor {
                None => ConformalFactor::constant(shift),
                Some(mut w) => {
                    w.constant += shift;
                    w
                }
            });
            m
        };
        Ok(match *self {
            MetricModel::RoundS4 { r } => MetricModel::RoundS4 { r: r * c },
            MetricModel::ProductS2S2 { a, b } => MetricModel::ProductS2S2 { a: a * c, b: b * c },
            MetricModel::FubiniStudy { lambda } => MetricModel::FubiniStudy { lambda: lambda / (c * c) },
            MetricModel::Chart(m) => MetricModel::Chart(scale_chart(m)),
            MetricModel::Conformal(mut m) => {
                m.factor.constant += shift;
                MetricModel::Conformal(m)
            }
        })
    }

    /// Metric and curvature at `p`. Homogeneous models ignore `p` and answer
    /// in an orthonormal frame.
    pub fn curvature_at(&self, p: &Vec4) -> Result<(Metric4, AlgebraicCurvature)> {
        match *self {
            MetricModel::RoundS4 { r } => Ok((Metric4::euclidean(), round_s4_curvature(r))),
            MetricModel::ProductS2S2 { a, b } => Ok((Metric4::euclidean(), product_curvature(a, b))),
            MetricModel::FubiniStudy { lambda } => Ok((Metric4::euclidean(), fubini_study_curvature(lambda))),
            MetricModel::Chart(ref c) => c.curvature_at(p),
            MetricModel::Conformal(ref c) => c.curvature_at(p),
        }
    }

    /// Total volume: closed form for homogeneous models, quadrature otherwise.
    pub fn volume(&self) -> Result<f64> {
        match *self {
            MetricModel::RoundS4 { r } => Ok(8.0 * PI * PI / 3.0 * r * r * r * r),
            MetricModel::ProductS2S2 { a, b } => Ok(16.0 * PI * PI * a * a * b * b),
            MetricModel::FubiniStudy { lambda } => {
                let s = FS_STANDARD_LAMBDA / lambda;
                Ok(PI * PI / 2.0 * s * s)
            }
            MetricModel::Chart(ref c) => chart_volume(&c.geometry, c.grid, c.collapsed_axes(), |x| c.metric_at(x)),
            MetricModel::Conformal(ref c) => {
                chart_volume(&c.base.geometry, c.base.grid, c.collapsed_axes(), |x| c.metric_at(x))
            }
        }
    }

    /// Number of quadrature nodes `integrate` visits.
    pub fn node_count(&self) -> usize {
        match self.chart_layout() {
            None => 1,
            Some((_, rules)) => rules.iter().map(Vec::len).product(),
        }
    }

    fn chart_layout(&self) -> Option<(ChartGeometry, AxisRules)> {
        match self {
            MetricModel::Chart(c) => Some((c.geometry, c.axis_rules())),
            MetricModel::Conformal(c) => {
                Some((c.base.geometry, chart::axis_rules(&c.base.geometry, c.base.grid, c.collapsed_axes())))
            }
            _ => None,
        }
    }

    /// Integrates a vector of densities. Homogeneous models evaluate once and
    /// multiply by the volume; chart models sum over the tensor-product grid,
    /// slab by slab along the first axis, in a fixed order.
    pub fn integrate<const K: usize, F>(&self, density: F) -> Result<[f64; K]>
    where
        F: Fn(&ChartSample) -> Result<[f64; K]> + Sync,
    {
        self.validate()?;
        let Some((_, rules)) = self.chart_layout() else {
            let (metric, curvature) = self.curvature_at(&[0.0; 4])?;
            let sample = ChartSample { coordinates: [0.0; 4], metric, curvature, volume_weight: self.volume()? };
            return density(&sample);
        };
        self.integrate_rules(&rules, density)
    }

    /// Like `integrate`, but samples every chart axis even where the metric
    /// is symmetric. Needed when the density itself breaks the symmetry.
    pub fn integrate_full<const K: usize, F>(&self, density: F) -> Result<[f64; K]>
    where
        F: Fn(&ChartSample) -> Result<[f64; K]> + Sync,
    {
        self.validate()?;
        let (geometry, grid) = match self {
            MetricModel::Chart(c) => (c.geometry, c.grid),
            MetricModel::Conformal(c) => (c.base.geometry, c.base.grid),
            _ => return self.integrate(density),
        };
        self.integrate_rules(&chart::axis_rules(&geometry, grid, [false; 4]), density)
    }

    fn integrate_rules<const K: usize, F>(&self, rules: &AxisRules, density: F) -> Result<[f64; K]>
    where
        F: Fn(&ChartSample) -> Result<[f64; K]> + Sync,
    {
        let slab = |i: usize| -> Result<[f64; K]> {
            let mut acc = [CompensatedSum::new(); K];
            let (x0, w0) = rules[0][i];
            for &(x1, w1) in &rules[1] {
                for &(x2, w2) in &rules[2] {
                    for &(x3, w3) in &rules[3] {
                        let x = [x0, x1, x2, x3];
                        let (metric, curvature) = self.curvature_at(&x)?;
                        let volume_weight = metric.sqrt_det() * w0 * w1 * w2 * w3;
                        let sample = ChartSample { coordinates: x, metric, curvature, volume_weight };
                        let v = density(&sample)?;
                        for (a, vk) in acc.iter_mut().zip(v) {
                            a.add(vk);
                        }
                    }
                }
            }
            Ok(acc.map(|a| a.value()))
        };
        let slabs: Vec<Result<[f64; K]>> = run_slabs(rules[0].len(), slab);
        let mut total = [CompensatedSum::new(); K];
        for s in slabs {
            for (t, v) in total.iter_mut().zip(s?) {
                t.add(v);
            }
        }
        Ok(total.map(|t| t.value()))
    }
}

#[cfg(feature = "parallel")]
fn run_slabs<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(&f).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_slabs<T>(n: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    (0..n).map(f).collect()
}

fn chart_topology(geometry: &ChartGeometry) -> (i32, i32) {
    match geometry {
        ChartGeometry::S4Angles { .. } => (2, 0),
        ChartGeometry::S2S2Angles { .. } => (4, 0),
    }
}

fn chart_volume(
    geometry: &ChartGeometry,
    grid: usize,
    collapsed: [bool; 4],
    metric: impl Fn(&Vec4) -> Mat4,
) -> Result<f64> {
    let rules = chart::axis_rules(geometry, grid, collapsed);
    let mut acc = CompensatedSum::new();
    for &(x0, w0) in &rules[0] {
        for &(x1, w1) in &rules[1] {
            for &(x2, w2) in &rules[2] {
                for &(x3, w3) in &rules[3] {
                    let g = Metric4::new(metric(&[x0, x1, x2, x3]), Orientation::Positive)?;
                    acc.add(g.sqrt_det() * w0 * w1 * w2 * w3);
                }
            }
        }
    }
    Ok(acc.value())
}

/// Constant curvature `1/r²`, orthonormal frame.
pub fn round_s4_curvature(r: f64) -> AlgebraicCurvature {
    let k = 1.0 / (r * r);
    let id: Mat4 = linalg::identity();
    let mut rm = [[[[0.0; 4]; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    rm[i][j][a][b] = k * (id[i][a] * id[j][b] - id[i][b] * id[j][a]);
                }
            }
        }
    }
    AlgebraicCurvature::from_components(rm)
}

/// Frame `e₀, e₁` tangent to `S²(a)`, `e₂, e₃` tangent to `S²(b)`.
pub fn product_curvature(a: f64, b: f64) -> AlgebraicCurvature {
    let mut rm = [[[[0.0; 4]; 4]; 4]; 4];
    for (i, j, k) in [(0, 1, 1.0 / (a * a)), (2, 3, 1.0 / (b * b))] {
        rm[i][j][i][j] = k;
        rm[j][i][j][i] = k;
        rm[i][j][j][i] = -k;
        rm[j][i][i][j] = -k;
    }
    AlgebraicCurvature::from_components(rm)
}

/// Unitary frame with `J e₀ = e₁`, `J e₂ = e₃`; holomorphic sectional
/// curvature `H = 2λ/3`.
pub fn fubini_study_curvature(lambda: f64) -> AlgebraicCurvature {
    let h = 2.0 * lambda / 3.0;
    let mut j = [[0.0; 4]; 4];
    j[0][1] = 1.0;
    j[1][0] = -1.0;
    j[2][3] = 1.0;
    j[3][2] = -1.0;
    let d: Mat4 = linalg::identity();
    let mut rm = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for e in 0..4 {
                    rm[a][b][c][e] = 0.25
                        * h
                        * (d[a][c] * d[b][e] - d[a][e] * d[b][c] + j[a][c] * j[b][e] - j[a][e] * j[b][c]
                            + 2.0 * j[a][b] * j[c][e]);
                }
            }
        }
    }
    AlgebraicCurvature::from_components(rm)
}

/// Schouten tensor of `e^{2w} g` from that of `g`:
/// `P̃ = P − ∇²w + dw ⊗ dw − ½|dw|²_g g`, all as (0,2)-tensors in the same
/// coordinates.
pub fn conformal_schouten(p: &Mat4, w: f64, dw: &Vec4, hess: &Mat4, g: &Metric4) -> Result<Mat4> {
    let finite = w.is_finite()
        && dw.iter().all(|v| v.is_finite())
        && p.iter().flatten().chain(hess.iter().flatten()).all(|v| v.is_finite());
    if !finite {
        return Err(contract("conformal factor data must be finite"));
    }
    for (m, name) in [(p, "Schouten tensor"), (hess, "Hessian of w")] {
        if linalg::asymmetry(m) > 1e-9 * linalg::max_abs(m).max(1.0) {
            return Err(contract(alloc::format!("{name} is not symmetric")));
        }
    }
    let half_norm = 0.5 * g.covector_norm_sq(dw);
    let gc = g.components();
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = p[i][j] - hess[i][j] + dw[i] * dw[j] - half_norm * gc[i][j];
        }
    }
    Ok(linalg::symmetrize(&out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::decompose;

    #[test]
    fn closed_forms_have_expected_traces() {
        let (g, rm) = MetricModel::FubiniStudy { lambda: 6.0 }.curvature_at(&[0.0; 4]).unwrap();
        let dec = decompose(&rm, &g).unwrap();
        assert!((dec.scalar() - 24.0).abs() < 1e-12);
        assert!(dec.traceless_ricci_norm_sq() < 1e-24);
        assert!(dec.weyl_minus_norm_sq() < 1e-24);
        assert!((dec.weyl_plus_norm_sq() - 24.0).abs() < 1e-12);
        assert!(rm.bianchi_defect() < 1e-14);
    }

    #[test]
    fn fd_sphere_chart_matches_closed_form() {
        let chart = ChartMetric::new(ChartGeometry::S4Angles { radius: 1.3 });
        let exact = round_s4_curvature(1.3);
        for x in [[1.0, 0.7, 2.0, 0.3], [0.4, 1.9, 1.2, 5.0], [2.5, 2.8, 0.5, 1.0]] {
            let (g, rm) = chart.curvature_at(&x).unwrap();
            let on = rm.transform(&g.frame());
            assert!(on.sub(&exact).max_abs() < 1e-6, "{:e}", on.sub(&exact).max_abs());
        }
    }

    #[test]
    fn outside_chart_is_rejected() {
        let chart = ChartMetric::new(ChartGeometry::S4Angles { radius: 1.0 });
        assert!(matches!(chart.curvature_at(&[4.0, 1.0, 1.0, 1.0]), Err(LabError::OutsideChart(_))));
    }

    #[test]
    fn stereographic_sphere_is_conformally_flat() {
        // round unit sphere as e^{2w} δ with w = log 2 − log(1 + |x|²)
        let x = [0.3, -0.2, 0.5, 0.1];
        let q: f64 = 1.0 + x.iter().map(|v| v * v).sum::<f64>();
        let w = libm::log(2.0 / q);
        let dw = x.map(|v| -2.0 * v / q);
        let mut hess = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                hess[i][j] = 4.0 * x[i] * x[j] / (q * q) - if i == j { 2.0 / q } else { 0.0 };
            }
        }
        let flat = Metric4::euclidean();
        let p = conformal_schouten(&[[0.0; 4]; 4], w, &dw, &hess, &flat).unwrap();
        let expected = linalg::scale(&linalg::identity(), 0.5 * libm::exp(2.0 * w));
        assert!(linalg::max_abs(&linalg::sub(&p, &expected)) < 1e-14);

        // and back again with −w from the sphere side
        let sphere = Metric4::new(linalg::scale(&linalg::identity(), libm::exp(2.0 * w)), Orientation::Positive).unwrap();
        let neg_hess = linalg::scale(&hess, -1.0);
        let neg_dw = dw.map(|v| -v);
        // Hessian of −w with respect to the sphere metric: ∂²(−w) − Γ^k ∂_k(−w)
        let mut cov = neg_hess;
        for i in 0..4 {
            for j in 0..4 {
                let gamma_ij = |k: usize| {
                    let di = if i == k { dw[j] } else { 0.0 };
                    let dj = if j == k { dw[i] } else { 0.0 };
                    let dij = if i == j { dw[k] } else { 0.0 };
                    di + dj - dij
                };
                for k in 0..4 {
                    cov[i][j] -= gamma_ij(k) * neg_dw[k];
                }
            }
        }
        let back = conformal_schouten(&p, -w, &neg_dw, &cov, &sphere).unwrap();
        assert!(linalg::max_abs(&back) < 1e-13);
    }

    #[test]
    fn volumes() {
        assert!((MetricModel::RoundS4 { r: 1.0 }.volume().unwrap() - 8.0 * PI * PI / 3.0).abs() < 1e-12);
        let chart = MetricModel::Chart(ChartMetric::new(ChartGeometry::S2S2Angles { a: 1.0, b: 2.0 }).with_grid(12));
        assert!((chart.volume().unwrap() - 64.0 * PI * PI).abs() < 1e-9);
    }
}
