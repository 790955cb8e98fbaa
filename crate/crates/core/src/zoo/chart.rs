use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curvature::{AlgebraicCurvature, Metric4, Orientation};
use crate::error::{contract, LabError, Result};
use crate::linalg::{self, Mat4, Vec4};

use super::fd::{self, MetricJet};
use super::quadrature::gauss_legendre;

pub const DEFAULT_GRID: usize = 24;
pub const DEFAULT_STEP: f64 = 1e-2;

/// Quadrature `(node, weight)` pairs for each chart axis.
pub type AxisRules = [Vec<(f64, f64)>; 4];

/// Coordinate charts covering a model manifold up to a measure-zero set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChartGeometry {
    /// Hyperspherical angles `(ψ, θ, φ, χ)` on the round sphere of radius `radius`.
    S4Angles { radius: f64 },
    /// Polar angles `(θ₁, φ₁, θ₂, φ₂)` on `S²(a) × S²(b)`.
    S2S2Angles { a: f64, b: f64 },
}

impl ChartGeometry {
    pub fn ranges(&self) -> [(f64, f64); 4] {
        match self {
            ChartGeometry::S4Angles { .. } => [(0.0, PI), (0.0, PI), (0.0, PI), (0.0, 2.0 * PI)],
            ChartGeometry::S2S2Angles { .. } => [(0.0, PI), (0.0, 2.0 * PI), (0.0, PI), (0.0, 2.0 * PI)],
        }
    }

    /// Axes the metric does not depend on.
    pub fn cyclic_axes(&self) -> [bool; 4] {
        match self {
            ChartGeometry::S4Angles { .. } => [false, false, false, true],
            ChartGeometry::S2S2Angles { .. } => [false, true, false, true],
        }
    }

    pub fn metric(&self, x: &Vec4) -> Mat4 {
        match *self {
            ChartGeometry::S4Angles { radius } => {
                let r2 = radius * radius;
                let s1 = libm::sin(x[0]);
                let s2 = libm::sin(x[1]);
                let s3 = libm::sin(x[2]);
                let a = s1 * s1;
                let b = a * s2 * s2;
                let c = b * s3 * s3;
                linalg::diag([r2, r2 * a, r2 * b, r2 * c])
            }
            ChartGeometry::S2S2Angles { a, b } => {
                let s1 = libm::sin(x[0]);
                let s2 = libm::sin(x[2]);
                linalg::diag([a * a, a * a * s1 * s1, b * b, b * b * s2 * s2])
            }
        }
    }

    /// Unit embedding coordinates (`S⁴ ⊂ ℝ⁵`, `S² × S² ⊂ ℝ³ × ℝ³`), padded to six slots.
    pub fn embedding(&self, x: &Vec4) -> [f64; 6] {
        match self {
            ChartGeometry::S4Angles { .. } => {
                let (s1, c1) = (libm::sin(x[0]), libm::cos(x[0]));
                let (s2, c2) = (libm::sin(x[1]), libm::cos(x[1]));
                let (s3, c3) = (libm::sin(x[2]), libm::cos(x[2]));
                let (s4, c4) = (libm::sin(x[3]), libm::cos(x[3]));
                [c1, s1 * c2, s1 * s2 * c3, s1 * s2 * s3 * c4, s1 * s2 * s3 * s4, 0.0]
            }
            ChartGeometry::S2S2Angles { .. } => {
                let (s1, c1) = (libm::sin(x[0]), libm::cos(x[0]));
                let (s2, c2) = (libm::sin(x[2]), libm::cos(x[2]));
                [
                    s1 * libm::cos(x[1]),
                    s1 * libm::sin(x[1]),
                    c1,
                    s2 * libm::cos(x[3]),
                    s2 * libm::sin(x[3]),
                    c2,
                ]
            }
        }
    }

    pub fn embedding_dim(&self) -> usize {
        match self {
            ChartGeometry::S4Angles { .. } => 5,
            ChartGeometry::S2S2Angles { .. } => 6,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            ChartGeometry::S4Angles { radius } => radius > 0.0 && radius.is_finite(),
            ChartGeometry::S2S2Angles { a, b } => a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(LabError::Domain("chart radii must be positive and finite".into()))
        }
    }
}

/// A smooth function on the model written as a quadratic polynomial in the
/// unit embedding coordinates: `w = c + ⟨ℓ, y⟩ + yᵀ Q y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalFactor {
    pub constant: f64,
    pub linear: [f64; 6],
    pub quadratic: [[f64; 6]; 6],
}

impl ConformalFactor {
    pub fn constant(c: f64) -> Self {
        Self { constant: c, linear: [0.0; 6], quadratic: [[0.0; 6]; 6] }
    }

    /// Seeded random factor; every coefficient is uniform in `[-amplitude, amplitude]`.
    pub fn random(seed: u64, amplitude: f64, embedding_dim: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draw = |rng: &mut ChaCha8Rng| amplitude * (2.0 * rng.random::<f64>() - 1.0);
        let constant = draw(&mut rng);
        let mut linear = [0.0; 6];
        let mut quadratic = [[0.0; 6]; 6];
        for l in linear.iter_mut().take(embedding_dim) {
            *l = draw(&mut rng);
        }
        for i in 0..embedding_dim {
            for j in i..embedding_dim {
                let q = draw(&mut rng);
                quadratic[i][j] = q;
                quadratic[j][i] = q;
            }
        }
        Self { constant, linear, quadratic }
    }

    pub fn eval_embedded(&self, y: &[f64; 6]) -> f64 {
        let mut w = self.constant;
        for i in 0..6 {
            w += self.linear[i] * y[i];
            for j in 0..6 {
                w += self.quadratic[i][j] * y[i] * y[j];
            }
        }
        w
    }

    pub fn eval(&self, geometry: &ChartGeometry, x: &Vec4) -> f64 {
        self.eval_embedded(&geometry.embedding(x))
    }

    pub fn is_constant(&self) -> bool {
        self.linear.iter().all(|&l| l == 0.0) && self.quadratic.iter().flatten().all(|&q| q == 0.0)
    }
}

/// Anything that can hand out metric components at chart coordinates.
pub trait CoordinateMetric: Sync {
    fn metric_at(&self, x: &Vec4) -> Mat4;
    fn orientation(&self) -> Orientation {
        Orientation::Positive
    }
}

/// A chart metric whose curvature is obtained by finite differences of its
/// components. An optional conformal factor rescales it to `e^{2w} g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartMetric {
    pub geometry: ChartGeometry,
    pub factor: Option<ConformalFactor>,
    /// Gauss–Legendre points per non-collapsed axis.
    pub grid: usize,
    /// Finite-difference step in chart coordinates.
    pub step: f64,
}

impl CoordinateMetric for ChartMetric {
    fn metric_at(&self, x: &Vec4) -> Mat4 {
        let g = self.geometry.metric(x);
        match &self.factor {
            None => g,
            Some(w) => linalg::scale(&g, libm::exp(2.0 * w.eval(&self.geometry, x))),
        }
    }
}

/// One quadrature node with its geometry.
#[derive(Debug, Clone, Copy)]
pub struct ChartSample {
    pub coordinates: Vec4,
    pub metric: Metric4,
    pub curvature: AlgebraicCurvature,
    /// `√det g` times the quadrature weight.
    pub volume_weight: f64,
}

impl ChartMetric {
    pub fn new(geometry: ChartGeometry) -> Self {
        Self { geometry, factor: None, grid: DEFAULT_GRID, step: DEFAULT_STEP }
    }

    pub fn with_factor(mut self, factor: ConformalFactor) -> Self {
        self.factor = Some(factor);
        self
    }

    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        if self.grid == 0 {
            return Err(LabError::Domain("chart grid must have at least one node".into()));
        }
        if !(self.step > 0.0) {
            return Err(LabError::Domain("finite-difference step must be positive".into()));
        }
        Ok(())
    }

    pub fn contains(&self, x: &Vec4) -> bool {
        self.geometry
            .ranges()
            .iter()
            .zip(x.iter())
            .all(|(&(lo, hi), &c)| c >= lo && c <= hi)
    }

    pub fn check_point(&self, x: &Vec4) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(LabError::OutsideChart(*x))
        }
    }

    /// Axes that are integrated exactly by a single midpoint node: cyclic
    /// axes of the geometry, unless a conformal factor breaks the symmetry.
    pub fn collapsed_axes(&self) -> [bool; 4] {
        match &self.factor {
            None => self.geometry.cyclic_axes(),
            Some(w) if w.is_constant() => self.geometry.cyclic_axes(),
            Some(_) => [false; 4],
        }
    }

    /// Tensor-product quadrature rule per axis.
    pub fn axis_rules(&self) -> AxisRules {
        axis_rules(&self.geometry, self.grid, self.collapsed_axes())
    }

    pub fn jet(&self, x: &Vec4) -> MetricJet {
        fd::metric_jet(&|y: &Vec4| self.metric_at(y), x, self.step)
    }

    /// Metric and finite-difference curvature at a chart point.
    pub fn curvature_at(&self, x: &Vec4) -> Result<(Metric4, AlgebraicCurvature)> {
        self.check_point(x)?;
        let jet = self.jet(x);
        let g = Metric4::new(linalg::symmetrize(&jet.value), self.orientation())?;
        let gamma = fd::christoffel(&jet, &g.inverse());
        Ok((g, fd::riemann(&jet, &gamma)))
    }
}

pub(crate) fn axis_rules(geometry: &ChartGeometry, grid: usize, collapsed: [bool; 4]) -> AxisRules {
    let ranges = geometry.ranges();
    core::array::from_fn(|k| {
        let (lo, hi) = ranges[k];
        if collapsed[k] {
            alloc::vec![(0.5 * (lo + hi), hi - lo)]
        } else {
            gauss_legendre(grid, lo, hi)
        }
    })
}

/// `g̃ = e^{2w} g` on a chart, with curvature assembled from the base
/// curvature: Weyl carried over unchanged as a (1,3) tensor, Schouten through
/// the conformal transformation law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalModel {
    pub base: ChartMetric,
    pub factor: ConformalFactor,
}

impl CoordinateMetric for ConformalModel {
    fn metric_at(&self, x: &Vec4) -> Mat4 {
        linalg::scale(&self.base.metric_at(x), libm::exp(2.0 * self.factor.eval(&self.base.geometry, x)))
    }
}

impl ConformalModel {
    pub fn curvature_at(&self, x: &Vec4) -> Result<(Metric4, AlgebraicCurvature)> {
        self.base.check_point(x)?;
        let jet = self.base.jet(x);
        let g = Metric4::new(linalg::symmetrize(&jet.value), self.base.orientation())?;
        let gamma = fd::christoffel(&jet, &g.inverse());
        let rm = fd::riemann(&jet, &gamma);
        let dec = crate::curvature::decompose(&rm, &g)?;
        let geometry = self.base.geometry;
        let factor = self.factor;
        let w = fd::scalar_jet(&|y: &Vec4| factor.eval(&geometry, y), x, self.base.step);
        let hess = fd::covariant_hessian(&w, &gamma);
        let p_tilde = super::conformal_schouten(&dec.schouten_coords(), w.value, &w.d, &hess, &g)?;
        let e2w = libm::exp(2.0 * w.value);
        let g_tilde = Metric4::new(linalg::scale(g.components(), e2w), g.orientation())?;
        let weyl = dec.weyl_coords().scale(e2w);
        let kn = crate::curvature::kulkarni_nomizu(&linalg::symmetrize(&p_tilde), g_tilde.components())?;
        Ok((g_tilde, weyl.add(&kn)))
    }

    pub fn collapsed_axes(&self) -> [bool; 4] {
        if self.factor.is_constant() {
            self.base.collapsed_axes()
        } else {
            [false; 4]
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.base.factor.is_some() {
            return Err(contract("conformal model expects an undeformed base chart"));
        }
        Ok(())
    }
}
