//! Randomized checks of the pointwise algebraic curvature inequalities.
//!
//! Every sample is drawn from its own ChaCha stream, selected by the sample
//! index, so a campaign gives the same answer whether it runs serially or
//! split across threads.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::curvature::{
    curvature_from_blocks, decompose_orthonormal, singer_thorpe_orthonormal, AlgebraicCurvature,
    CurvatureDecomposition, Orientation, SingerThorpeBlocks,
};
use crate::error::{domain, Result};
use crate::linalg::{self, Mat3, Vec3};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// `√6 / 3`, the sharp constant of `|A(X,X)| ≤ (√6/3)‖A‖|X|²` on trace-free `A`.
pub const SHARP_CONSTANT: f64 = 0.816_496_580_927_726;

/// Relative slack allowed before a negative margin counts as a violation.
pub const SLACK: f64 = 1e-12;

/// Tolerance on the residual of `|E|² = 4Σbᵢ²`.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct FuzzConfig {
    pub seed: u64,
    pub samples: u64,
    pub scale: f64,
    pub report_top_k: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self { seed: 0, samples: 100_000, scale: 1.0, report_top_k: 5 }
    }
}

impl FuzzConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(domain("a campaign needs at least one sample"));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(domain("sample scale must be positive"));
        }
        Ok(())
    }
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn random_symmetric_trace_free(rng: &mut ChaCha8Rng) -> Mat3 {
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let v = normal(rng);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    let t = linalg::trace(&m) / 3.0;
    for (i, row) in m.iter_mut().enumerate() {
        row[i] -= t;
    }
    m
}

/// Raw Singer–Thorpe ingredients of a random curvature tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockSample {
    pub weyl_plus: Mat3,
    pub weyl_minus: Mat3,
    pub mixed: Mat3,
    pub scalar: f64,
}

impl BlockSample {
    pub fn curvature(&self) -> AlgebraicCurvature {
        let shift = linalg::scale(&linalg::identity::<3>(), self.scalar / 12.0);
        curvature_from_blocks(
            &linalg::add(&self.weyl_plus, &shift),
            &self.mixed,
            &linalg::add(&self.weyl_minus, &shift),
            Orientation::Positive,
        )
    }
}

/// Normal entries per block; each block gets its own amplitude, uniform in
/// `[0, scale]`, so that nearly-Einstein or nearly-half-flat tensors appear.
pub fn sample_blocks(seed: u64, index: u64, scale: f64) -> BlockSample {
    let mut rng = stream(seed, index);
    let amp: [f64; 4] = core::array::from_fn(|_| scale * rng.random::<f64>());
    let weyl_plus = linalg::scale(&random_symmetric_trace_free(&mut rng), amp[0]);
    let weyl_minus = linalg::scale(&random_symmetric_trace_free(&mut rng), amp[1]);
    let mut mixed = [[0.0; 3]; 3];
    for row in mixed.iter_mut() {
        for v in row.iter_mut() {
            *v = amp[2] * normal(&mut rng);
        }
    }
    let scalar = amp[3] * normal(&mut rng);
    BlockSample { weyl_plus, weyl_minus, mixed, scalar }
}

/// A random algebraic curvature tensor in an orthonormal frame.
pub fn sample_curvature(seed: u64, index: u64, scale: f64) -> AlgebraicCurvature {
    sample_blocks(seed, index, scale).curvature()
}

/// A checked inequality `lhs ≤ rhs`, with `margin = rhs − lhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Margin {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

impl Margin {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, margin: rhs - lhs }
    }

    pub fn scale(&self) -> f64 {
        self.lhs.abs().max(self.rhs.abs()).max(1.0)
    }

    /// Violation measured relative to `max(1, |lhs|, |rhs|)`; non-positive when the inequality holds.
    pub fn relative_violation(&self) -> f64 {
        -self.margin / self.scale()
    }

    pub fn holds(&self) -> bool {
        self.relative_violation() <= SLACK
    }
}

/// `WEE ≤ (√6/3)(‖W⁺‖ + ‖W⁻‖)|E|²`.
pub fn check_wee(dec: &CurvatureDecomposition) -> Margin {
    let rhs = SHARP_CONSTANT * (dec.weyl_plus_norm() + dec.weyl_minus_norm()) * dec.traceless_ricci_norm_sq();
    Margin::new(dec.wee(), rhs)
}

/// `|A(X,X)| ≤ (√6/3)‖A‖|X|²` for trace-free symmetric `A`.
pub fn check_sharp33(a: &Mat3, x: &Vec3) -> Result<Margin> {
    let scale = linalg::max_abs(a).max(1.0);
    if linalg::trace(a).abs() > 1e-12 * scale {
        return Err(domain("matrix is not trace-free"));
    }
    if linalg::asymmetry(a) > 1e-12 * scale {
        return Err(domain("matrix is not symmetric"));
    }
    let ax = linalg::mat_vec(a, x);
    let quad: f64 = ax.iter().zip(x).map(|(p, q)| p * q).sum();
    let x2: f64 = x.iter().map(|v| v * v).sum();
    let rhs = SHARP_CONSTANT * libm::sqrt(linalg::frobenius_sq(a)) * x2;
    Ok(Margin::new(quad.abs(), rhs))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct BlockMargins {
    /// `WEE ≤ 4(Σλᵢ⁺bᵢ² + Σλᵢ⁻bᵢ²)`, eigenvalues and singular values both ascending.
    pub block_bound: Margin,
    /// `4(Σλᵢ⁺bᵢ² + Σλᵢ⁻bᵢ²) ≤ (√6/3)(‖W⁺‖ + ‖W⁻‖)|E|²`.
    pub sharp_step: Margin,
    /// `|E|² − 4Σbᵢ²`.
    pub identity_residual: f64,
}

pub fn check_block_bound(blocks: &SingerThorpeBlocks, dec: &CurvatureDecomposition) -> BlockMargins {
    let b2 = blocks.b_singular_values.map(|b| b * b);
    let paired: f64 = (0..3)
        .map(|i| (blocks.weyl_plus_eigenvalues[i] + blocks.weyl_minus_eigenvalues[i]) * b2[i])
        .sum();
    let middle = 4.0 * paired;
    let e2 = dec.traceless_ricci_norm_sq();
    BlockMargins {
        block_bound: Margin::new(dec.wee(), middle),
        sharp_step: Margin::new(middle, SHARP_CONSTANT * (dec.weyl_plus_norm() + dec.weyl_minus_norm()) * e2),
        identity_residual: e2 - 4.0 * blocks.b_singular_sq_sum(),
    }
}

/// Young's inequality `ab ≤ aᵖ/p + b^q/q`.
pub fn check_young(a: f64, b: f64, p: f64, q: f64) -> Result<Margin> {
    if !(p > 1.0) || (1.0 / p + 1.0 / q - 1.0).abs() > 1e-12 {
        return Err(domain(alloc::format!("exponents {p}, {q} are not conjugate")));
    }
    if a < 0.0 || b < 0.0 {
        return Err(domain("Young's inequality needs non-negative arguments"));
    }
    Ok(Margin::new(a * b, libm::pow(a, p) / p + libm::pow(b, q) / q))
}

/// The inequalities a campaign covers, in report order.
pub const INEQUALITIES: [&str; 6] = ["wee", "sharp33", "block_bound", "block_sharp_step", "block_identity", "young"];

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Witness {
    pub index: u64,
    pub margin: f64,
    /// Margin divided by the natural size of the right-hand side.
    pub normalized_margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct InequalityStats {
    pub name: String,
    pub checked: u64,
    pub violations: u64,
    /// Largest relative violation seen; `≤ 0` means every sample held exactly.
    pub max_violation: f64,
    pub max_violation_index: u64,
    /// Smallest normalized margin and where it occurred.
    pub tightest: Witness,
    /// Near-equality cases, tightest first.
    pub top: Vec<Witness>,
}

impl InequalityStats {
    fn new(name: &str) -> Self {
        Self {
            name: String::from(name),
            checked: 0,
            violations: 0,
            max_violation: f64::NEG_INFINITY,
            max_violation_index: 0,
            tightest: Witness { index: 0, margin: f64::INFINITY, normalized_margin: f64::INFINITY },
            top: Vec::new(),
        }
    }

    fn record(&mut self, index: u64, violation: f64, witness: Witness, top_k: usize) {
        self.checked += 1;
        if violation > SLACK {
            self.violations += 1;
        }
        if violation > self.max_violation {
            self.max_violation = violation;
            self.max_violation_index = index;
        }
        if witness.normalized_margin < self.tightest.normalized_margin {
            self.tightest = witness;
        }
        push_top(&mut self.top, witness, top_k);
    }

    fn merge(&mut self, other: &Self, top_k: usize) {
        self.checked += other.checked;
        self.violations += other.violations;
        if other.max_violation > self.max_violation {
            self.max_violation = other.max_violation;
            self.max_violation_index = other.max_violation_index;
        }
        if other.tightest.normalized_margin < self.tightest.normalized_margin {
            self.tightest = other.tightest;
        }
        for w in &other.top {
            push_top(&mut self.top, *w, top_k);
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn push_top(top: &mut Vec<Witness>, w: Witness, k: usize) {
    if k == 0 {
        return;
    }
    if top.len() == k && w.normalized_margin >= top[k - 1].normalized_margin {
        return;
    }
    let at = top
        .iter()
        .position(|t| (w.normalized_margin, w.index) < (t.normalized_margin, t.index))
        .unwrap_or(top.len());
    top.insert(at, w);
    top.truncate(k);
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct FuzzReport {
    pub config: FuzzConfig,
    pub inequalities: Vec<InequalityStats>,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.inequalities.iter().all(InequalityStats::passed)
    }

    pub fn get(&self, name: &str) -> Option<&InequalityStats> {
        self.inequalities.iter().find(|s| s.name == name)
    }
}

/// Random trace-free `A` and vector `X` for the sharp 3×3 inequality; uses
/// a stream disjoint from the curvature samples.
pub fn sample_sharp33(seed: u64, index: u64, scale: f64) -> (Mat3, Vec3) {
    let mut rng = stream(seed ^ 0x0005_eed0_fa33, index);
    let a = linalg::scale(&random_symmetric_trace_free(&mut rng), scale);
    let x = [normal(&mut rng), normal(&mut rng), normal(&mut rng)];
    (a, x)
}

/// Random `(a, b)` for Young's inequality with `p = 3/2`.
pub fn sample_young(seed: u64, index: u64, scale: f64) -> (f64, f64) {
    let mut rng = stream(seed ^ 0x0079_0fa6, index);
    let a: f64 = rng.random::<f64>();
    let b: f64 = rng.random::<f64>();
    // log-uniform over a few decades keeps both sides comparable in size
    (scale * libm::exp(8.0 * a - 4.0), scale * libm::exp(8.0 * b - 4.0))
}

fn one_sample(cfg: &FuzzConfig, index: u64, stats: &mut [InequalityStats; 6]) -> Result<()> {
    let k = cfg.report_top_k;
    let rm = sample_curvature(cfg.seed, index, cfg.scale);
    let dec = decompose_orthonormal(&rm, linalg::identity(), Orientation::Positive);
    let blocks = singer_thorpe_orthonormal(&rm, Orientation::Positive);
    let e2 = dec.traceless_ricci_norm_sq();
    let natural = (SHARP_CONSTANT * (dec.weyl_plus_norm() + dec.weyl_minus_norm()) * e2).max(f64::MIN_POSITIVE);

    let m = check_wee(&dec);
    stats[0].record(index, m.relative_violation(), witness(index, &m, natural), k);

    let (a, x) = sample_sharp33(cfg.seed, index, cfg.scale);
    let m = check_sharp33(&a, &x)?;
    let x2: f64 = x.iter().map(|v| v * v).sum();
    let nat = (libm::sqrt(linalg::frobenius_sq(&a)) * x2).max(f64::MIN_POSITIVE);
    stats[1].record(index, m.relative_violation(), witness(index, &m, nat), k);

    let bm = check_block_bound(&blocks, &dec);
    stats[2].record(index, bm.block_bound.relative_violation(), witness(index, &bm.block_bound, natural), k);
    stats[3].record(index, bm.sharp_step.relative_violation(), witness(index, &bm.sharp_step, natural), k);
    // the identity is an equality: held to IDENTITY_TOLERANCE relative to max(1, |E|²)
    let id_scale = e2.max(1.0);
    let id = Margin::new(bm.identity_residual.abs(), IDENTITY_TOLERANCE * id_scale);
    stats[4].record(index, -id.margin / id_scale, witness(index, &id, id_scale), k);

    let (ya, yb) = sample_young(cfg.seed, index, cfg.scale);
    let m = check_young(ya, yb, 1.5, 3.0)?;
    stats[5].record(index, m.relative_violation(), witness(index, &m, m.rhs.max(f64::MIN_POSITIVE)), k);
    Ok(())
}

fn witness(index: u64, m: &Margin, natural: f64) -> Witness {
    Witness { index, margin: m.margin, normalized_margin: m.margin / natural }
}

fn chunk(cfg: &FuzzConfig, lo: u64, hi: u64) -> Result<[InequalityStats; 6]> {
    let mut stats = INEQUALITIES.map(InequalityStats::new);
    for index in lo..hi {
        one_sample(cfg, index, &mut stats)?;
    }
    Ok(stats)
}

const CHUNK: u64 = 8192;

/// Runs every inequality over `cfg.samples` samples.
pub fn run_campaign(cfg: &FuzzConfig) -> Result<FuzzReport> {
    cfg.validate()?;
    let chunks = cfg.samples.div_ceil(CHUNK);
    let run = |c: u64| chunk(cfg, c * CHUNK, ((c + 1) * CHUNK).min(cfg.samples));
    #[cfg(feature = "parallel")]
    let parts: Vec<Result<[InequalityStats; 6]>> = {
        use rayon::prelude::*;
        (0..chunks).into_par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Result<[InequalityStats; 6]>> = (0..chunks).map(run).collect();

    let mut total = INEQUALITIES.map(InequalityStats::new);
    for part in parts {
        let part = part?;
        for (t, p) in total.iter_mut().zip(part.iter()) {
            t.merge(p, cfg.report_top_k);
        }
    }
    Ok(FuzzReport { config: *cfg, inequalities: total.into_iter().collect() })
}

/// The explicit extremizer `A = diag(2, −1, −1)/√6`, `X = e₁`.
pub fn sharp33_extremizer() -> (Mat3, Vec3) {
    let s = 1.0 / libm::sqrt(6.0);
    (linalg::diag([2.0 * s, -s, -s]), [1.0, 0.0, 0.0])
}

/// Replaces `X` by the eigenvector of `A` with the largest `|eigenvalue|`,
/// which maximizes `|A(X,X)|` on the unit sphere. Returns the polished
/// vector and its normalized margin.
pub fn polish_sharp33(a: &Mat3) -> Result<(Vec3, f64)> {
    let (vals, vecs) = linalg::symmetric_eigen(a);
    let k = if vals[0].abs() > vals[2].abs() { 0 } else { 2 };
    let x = [vecs[0][k], vecs[1][k], vecs[2][k]];
    let m = check_sharp33(a, &x)?;
    let norm = libm::sqrt(linalg::frobenius_sq(a)).max(f64::MIN_POSITIVE);
    Ok((x, m.margin / norm))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_scale_gives_zero_tensor() {
        assert_eq!(sample_curvature(0, 0, 0.0).max_abs(), 0.0);
    }

    #[test]
    fn samples_are_reproducible_and_symmetric() {
        let a = sample_curvature(42, 7, 1.0);
        let b = sample_curvature(42, 7, 1.0);
        assert_eq!(a, b);
        assert!(a.symmetry_defect() < 1e-14);
        assert!(a.bianchi_defect() < 1e-14);
        assert_ne!(a, sample_curvature(42, 8, 1.0));
    }

    #[test]
    fn extremizer_is_sharp() {
        let (a, x) = sharp33_extremizer();
        assert!(check_sharp33(&a, &x).unwrap().margin.abs() < 1e-15);
        assert_eq!(check_sharp33(&a, &[0.0; 3]).unwrap().margin, 0.0);
        assert!(check_sharp33(&linalg::identity(), &x).is_err());
    }

    #[test]
    fn young_examples() {
        assert!(check_young(1.0, 1.0, 2.0, 2.0).unwrap().margin.abs() < 1e-15);
        let m = check_young(8.0, 2.0, 1.5, 3.0).unwrap();
        assert!((m.margin - (libm::pow(8.0, 1.5) / 1.5 + 8.0 / 3.0 - 16.0)).abs() < 1e-12);
        assert!(check_young(1.0, 1.0, 2.0, 3.0).is_err());
    }

    #[test]
    fn top_list_stays_sorted() {
        let mut top = Vec::new();
        for (i, m) in [0.5, 0.1, 0.9, 0.05, 0.3].iter().enumerate() {
            push_top(&mut top, Witness { index: i as u64, margin: *m, normalized_margin: *m }, 3);
        }
        let idx: Vec<u64> = top.iter().map(|w| w.index).collect();
        assert_eq!(idx, [3, 1, 4]);
    }

    #[test]
    fn small_campaign_passes() {
        let r = run_campaign(&FuzzConfig { seed: 3, samples: 2000, scale: 1.0, report_top_k: 3 }).unwrap();
        for s in &r.inequalities {
            assert!(s.passed(), "{} violated: {:e}", s.name, s.max_violation);
            assert_eq!(s.checked, 2000);
        }
    }
}
