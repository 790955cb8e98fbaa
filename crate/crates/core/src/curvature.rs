//! Pointwise algebra of curvature tensors in dimension four.
//!
//! Index convention: `R_{ijij}` is the sectional curvature of the plane
//! spanned by orthonormal `e_i, e_j`, and `Ric_{jl} = g^{ik} R_{ijkl}`. With
//! this sign the curvature operator of the unit sphere is the identity on
//! two-forms.
//!
//! Everything inside [`CurvatureDecomposition`] is stored in an orthonormal
//! frame obtained from the Cholesky factor of the metric; the `*_coords`
//! accessors push tensors back to the coordinate frame.

use core::f64::consts::FRAC_1_SQRT_2;

use crate::error::{contract, LabError, Result};
use crate::linalg::{self, Mat3, Mat4, Mat6, Vec3};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

const SQRT6: f64 = 2.449_489_742_783_178;

/// Index pairs `(i, j)`, `i < j`, ordering the basis `e^i ∧ e^j` of two-forms.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "snake_case"))]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }
}

/// A positive-definite metric on a four-dimensional tangent space together
/// with the orientation of the coordinate basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric4 {
    g: Mat4,
    chol: Mat4,
    orientation: Orientation,
}

impl Metric4 {
    pub fn new(g: Mat4, orientation: Orientation) -> Result<Self> {
        let scale = linalg::max_abs(&g).max(1.0);
        if linalg::asymmetry(&g) > 1e-12 * scale {
            return Err(contract("metric components are not symmetric"));
        }
        let chol = linalg::cholesky4(&linalg::symmetrize(&g)).ok_or(LabError::SingularMetric)?;
        Ok(Self { g, chol, orientation })
    }

    pub fn euclidean() -> Self {
        Self {
            g: linalg::identity(),
            chol: linalg::identity(),
            orientation: Orientation::Positive,
        }
    }

    pub fn diagonal(d: [f64; 4]) -> Result<Self> {
        Self::new(linalg::diag(d), Orientation::Positive)
    }

    pub fn components(&self) -> &Mat4 {
        &self.g
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    /// Lower-triangular `L` with `g = L Lᵀ`.
    pub fn cholesky(&self) -> &Mat4 {
        &self.chol
    }

    /// `F = L^{-T}`; its columns form a positively oriented (relative to the
    /// coordinate basis) orthonormal frame.
    pub fn frame(&self) -> Mat4 {
        linalg::transpose(&linalg::lower_inverse4(&self.chol))
    }

    pub fn inverse(&self) -> Mat4 {
        let li = linalg::lower_inverse4(&self.chol);
        linalg::mat_mul(&linalg::transpose(&li), &li)
    }

    pub fn sqrt_det(&self) -> f64 {
        (0..4).map(|i| self.chol[i][i]).product()
    }

    /// `|v|²_g` for a covector `v`.
    pub fn covector_norm_sq(&self, v: &[f64; 4]) -> f64 {
        let gi = self.inverse();
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                s += gi[i][j] * v[i] * v[j];
            }
        }
        s
    }
}

type Rank4 = [[[[f64; 4]; 4]; 4]; 4];

/// Components `R_{ijkl}` of a (0,4) tensor with the symmetries of a
/// Riemann curvature tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraicCurvature {
    r: Rank4,
}

impl Default for AlgebraicCurvature {
    fn default() -> Self {
        Self::zero()
    }
}

impl AlgebraicCurvature {
    pub fn zero() -> Self {
        Self { r: [[[[0.0; 4]; 4]; 4]; 4] }
    }

    pub fn from_components(r: Rank4) -> Self {
        Self { r }
    }

    pub fn components(&self) -> &Rank4 {
        &self.r
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.r[i][j][k][l]
    }

    /// Largest violation of antisymmetry, pair symmetry and the first Bianchi identity.
    pub fn symmetry_defect(&self) -> f64 {
        let r = &self.r;
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        let v = r[i][j][k][l];
                        worst = worst
                            .max((v + r[j][i][k][l]).abs())
                            .max((v + r[i][j][l][k]).abs())
                            .max((v - r[k][l][i][j]).abs());
                    }
                }
            }
        }
        worst.max(self.bianchi_defect())
    }

    pub fn bianchi_defect(&self) -> f64 {
        let r = &self.r;
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        worst = worst.max((r[i][j][k][l] + r[i][k][l][j] + r[i][l][j][k]).abs());
                    }
                }
            }
        }
        worst
    }

    /// `R'_{abcd} = F_{ia} F_{jb} F_{kc} F_{ld} R_{ijkl}`.
    pub fn transform(&self, f: &Mat4) -> Self {
        let mut t1 = [[[[0.0; 4]; 4]; 4]; 4];
        for a in 0..4 {
            for i in 0..4 {
                let fia = f[i][a];
                if fia == 0.0 {
                    continue;
                }
                for j in 0..4 {
                    for k in 0..4 {
                        for l in 0..4 {
                            t1[a][j][k][l] += fia * self.r[i][j][k][l];
                        }
                    }
                }
            }
        }
        let mut t2 = [[[[0.0; 4]; 4]; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                for j in 0..4 {
                    let fjb = f[j][b];
                    if fjb == 0.0 {
                        continue;
                    }
                    for k in 0..4 {
                        for l in 0..4 {
                            t2[a][b][k][l] += fjb * t1[a][j][k][l];
                        }
                    }
                }
            }
        }
        let mut t3 = [[[[0.0; 4]; 4]; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for k in 0..4 {
                        let fkc = f[k][c];
                        if fkc == 0.0 {
                            continue;
                        }
                        for l in 0..4 {
                            t3[a][b][c][l] += fkc * t2[a][b][k][l];
                        }
                    }
                }
            }
        }
        let mut out = [[[[0.0; 4]; 4]; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let mut s = 0.0;
                        for l in 0..4 {
                            s += f[l][d] * t3[a][b][c][l];
                        }
                        out[a][b][c][d] = s;
                    }
                }
            }
        }
        Self { r: out }
    }

    /// Matrix of the tensor on two-forms in the basis `e^i ∧ e^j` ([`PAIRS`]).
    /// Only meaningful when the components are orthonormal-frame components.
    pub fn to_operator(&self) -> Mat6 {
        let mut m = [[0.0; 6]; 6];
        for (p, &(i, j)) in PAIRS.iter().enumerate() {
            for (q, &(k, l)) in PAIRS.iter().enumerate() {
                m[p][q] = self.r[i][j][k][l];
            }
        }
        m
    }

    /// Inverse of [`to_operator`](Self::to_operator); the operator is symmetrized first.
    pub fn from_operator(m: &Mat6) -> Self {
        let m = linalg::symmetrize(m);
        let mut r = [[[[0.0; 4]; 4]; 4]; 4];
        for (p, &(i, j)) in PAIRS.iter().enumerate() {
            for (q, &(k, l)) in PAIRS.iter().enumerate() {
                let v = m[p][q];
                r[i][j][k][l] = v;
                r[j][i][k][l] = -v;
                r[i][j][l][k] = -v;
                r[j][i][l][k] = v;
            }
        }
        Self { r }
    }

    /// Squared norm `Σ R_{ijkl}²` of the four-tensor (frame components).
    pub fn norm_sq(&self) -> f64 {
        self.r
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .map(|x| x * x)
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.r
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.zip(self, |a, _| a * s)
    }

    fn zip(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        let mut r = self.r;
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        r[i][j][k][l] = op(self.r[i][j][k][l], other.r[i][j][k][l]);
                    }
                }
            }
        }
        Self { r }
    }

    /// `R(x, y, z, w)`.
    pub fn evaluate(&self, x: &[f64; 4], y: &[f64; 4], z: &[f64; 4], w: &[f64; 4]) -> f64 {
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        s += self.r[i][j][k][l] * x[i] * y[j] * z[k] * w[l];
                    }
                }
            }
        }
        s
    }

    /// `g^{ik} R_{ijkl}`.
    pub fn ricci_contraction(&self, g_inv: &Mat4) -> Mat4 {
        let mut ric = [[0.0; 4]; 4];
        for j in 0..4 {
            for l in 0..4 {
                let mut s = 0.0;
                for i in 0..4 {
                    for k in 0..4 {
                        s += g_inv[i][k] * self.r[i][j][k][l];
                    }
                }
                ric[j][l] = s;
            }
        }
        ric
    }
}

/// Columns are the orthonormal self-dual basis `ω₁⁺, ω₂⁺, ω₃⁺` followed by
/// the anti-self-dual `ω₁⁻, ω₂⁻, ω₃⁻`, written in the [`PAIRS`] basis.
/// `ω₁± = (e⁰¹ ± e²³)/√2`, `ω₂± = (e⁰² ∓ e¹³)/√2`, `ω₃± = (e⁰³ ± e¹²)/√2`.
/// Reversing the orientation swaps the two triples.
pub fn two_form_basis(orientation: Orientation) -> Mat6 {
    let s = FRAC_1_SQRT_2;
    let plus: [[f64; 6]; 3] = [
        [s, 0.0, 0.0, 0.0, 0.0, s],
        [0.0, s, 0.0, 0.0, -s, 0.0],
        [0.0, 0.0, s, s, 0.0, 0.0],
    ];
    let minus: [[f64; 6]; 3] = [
        [s, 0.0, 0.0, 0.0, 0.0, -s],
        [0.0, s, 0.0, 0.0, s, 0.0],
        [0.0, 0.0, s, -s, 0.0, 0.0],
    ];
    let (first, second) = match orientation {
        Orientation::Positive => (plus, minus),
        Orientation::Negative => (minus, plus),
    };
    let mut q = [[0.0; 6]; 6];
    for c in 0..3 {
        for r in 0..6 {
            q[r][c] = first[c][r];
            q[r][c + 3] = second[c][r];
        }
    }
    q
}

/// Operator in the `(Λ²₊, Λ²₋)` basis.
fn to_chiral(op: &Mat6, orientation: Orientation) -> Mat6 {
    let q = two_form_basis(orientation);
    linalg::mat_mul(&linalg::transpose(&q), &linalg::mat_mul(op, &q))
}

fn from_chiral(op: &Mat6, orientation: Orientation) -> Mat6 {
    let q = two_form_basis(orientation);
    linalg::mat_mul(&q, &linalg::mat_mul(op, &linalg::transpose(&q)))
}

fn block(m: &Mat6, row: usize, col: usize) -> Mat3 {
    let mut b = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            b[i][j] = m[row + i][col + j];
        }
    }
    b
}

/// Assembles an orthonormal-frame curvature tensor from its Singer–Thorpe
/// blocks: `A` on `Λ²₊`, `C` on `Λ²₋` and the mixed block `B: Λ²₋ → Λ²₊`.
pub fn curvature_from_blocks(a: &Mat3, b: &Mat3, c: &Mat3, orientation: Orientation) -> AlgebraicCurvature {
    let mut m = [[0.0; 6]; 6];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = a[i][j];
            m[i][j + 3] = b[i][j];
            m[j + 3][i] = b[i][j];
            m[i + 3][j + 3] = c[i][j];
        }
    }
    AlgebraicCurvature::from_operator(&from_chiral(&m, orientation))
}

fn check_symmetric(m: &Mat4, what: &str) -> Result<()> {
    let scale = linalg::max_abs(m).max(1.0);
    if linalg::asymmetry(m) > 1e-9 * scale {
        return Err(contract(alloc::format!("{what} is not symmetric")));
    }
    Ok(())
}

/// Schouten tensor `P = ½(Ric − (R/6) g)`.
pub fn schouten(ric: &Mat4, scalar: f64, g: &Metric4) -> Result<Mat4> {
    check_symmetric(ric, "Ricci tensor")?;
    let gi = g.inverse();
    let tr: f64 = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| gi[i][j] * ric[i][j]).sum();
    if (tr - scalar).abs() > 1e-9 * scalar.abs().max(1.0) {
        return Err(contract(alloc::format!(
            "scalar curvature {scalar} does not match the trace {tr} of the Ricci tensor"
        )));
    }
    let gc = g.components();
    let mut p = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            p[i][j] = 0.5 * (ric[i][j] - scalar / 6.0 * gc[i][j]);
        }
    }
    Ok(p)
}

fn kn_unchecked(h: &Mat4, k: &Mat4) -> AlgebraicCurvature {
    let mut r = [[[[0.0; 4]; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    r[i][j][a][b] = h[i][a] * k[j][b] + h[j][b] * k[i][a] - h[i][b] * k[j][a] - h[j][a] * k[i][b];
                }
            }
        }
    }
    AlgebraicCurvature { r }
}

/// Kulkarni–Nomizu product
/// `(h ⊙ k)_{ijkl} = h_{ik}k_{jl} + h_{jl}k_{ik} − h_{il}k_{jk} − h_{jk}k_{il}`.
pub fn kulkarni_nomizu(h: &Mat4, k: &Mat4) -> Result<AlgebraicCurvature> {
    check_symmetric(h, "first factor")?;
    check_symmetric(k, "second factor")?;
    Ok(kn_unchecked(h, k))
}

/// Full pointwise splitting `Rm = W⁺ + W⁻ + P ⊙ g` in an orthonormal frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureDecomposition {
    coframe: Mat4,
    orientation: Orientation,
    riemann: AlgebraicCurvature,
    scalar: f64,
    ricci: Mat4,
    traceless_ricci: Mat4,
    schouten: Mat4,
    weyl: AlgebraicCurvature,
    weyl_plus: AlgebraicCurvature,
    weyl_minus: AlgebraicCurvature,
    weyl_plus_block: Mat3,
    weyl_minus_block: Mat3,
}

/// Splits a coordinate-frame curvature tensor. Fails when `rm` does not have
/// curvature symmetries to within `1e-8` relative.
pub fn decompose(rm: &AlgebraicCurvature, g: &Metric4) -> Result<CurvatureDecomposition> {
    let scale = rm.max_abs().max(1e-300);
    let defect = rm.symmetry_defect();
    if defect > 1e-8 * scale {
        return Err(contract(alloc::format!(
            "input lacks curvature symmetries (defect {defect:e})"
        )));
    }
    let frame = g.frame();
    let on = rm.transform(&frame);
    Ok(decompose_orthonormal(&on, *g.cholesky(), g.orientation()))
}

/// Decomposition of components already given in an orthonormal frame.
pub fn decompose_orthonormal(
    rm: &AlgebraicCurvature,
    coframe: Mat4,
    orientation: Orientation,
) -> CurvatureDecomposition {
    let id: Mat4 = linalg::identity();
    let mut ricci = rm.ricci_contraction(&id);
    ricci = linalg::symmetrize(&ricci);
    let scalar = linalg::trace(&ricci);
    let traceless_ricci = linalg::sub(&ricci, &linalg::scale(&id, scalar / 4.0));
    let schouten = linalg::scale(&linalg::sub(&ricci, &linalg::scale(&id, scalar / 6.0)), 0.5);
    let weyl = rm.sub(&kn_unchecked(&schouten, &id));
    let chiral = to_chiral(&weyl.to_operator(), orientation);
    let weyl_plus_block = linalg::symmetrize(&block(&chiral, 0, 0));
    let weyl_minus_block = linalg::symmetrize(&block(&chiral, 3, 3));
    let zero3 = [[0.0; 3]; 3];
    let weyl_plus = curvature_from_blocks(&weyl_plus_block, &zero3, &zero3, orientation);
    let weyl_minus = curvature_from_blocks(&zero3, &zero3, &weyl_minus_block, orientation);
    CurvatureDecomposition {
        coframe,
        orientation,
        riemann: *rm,
        scalar,
        ricci,
        traceless_ricci,
        schouten,
        weyl,
        weyl_plus,
        weyl_minus,
        weyl_plus_block,
        weyl_minus_block,
    }
}

fn push_sym(l: &Mat4, t: &Mat4) -> Mat4 {
    linalg::mat_mul(l, &linalg::mat_mul(t, &linalg::transpose(l)))
}

fn contract_ee(w: &AlgebraicCurvature, e: &Mat4) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for k in 0..4 {
            let eik = e[i][k];
            if eik == 0.0 {
                continue;
            }
            for j in 0..4 {
                for l in 0..4 {
                    s += w.r[i][j][k][l] * eik * e[j][l];
                }
            }
        }
    }
    s
}

impl CurvatureDecomposition {
    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn scalar(&self) -> f64 {
        self.scalar
    }

    /// Frame components; see the module docs.
    pub fn riemann(&self) -> &AlgebraicCurvature {
        &self.riemann
    }

    pub fn ricci(&self) -> &Mat4 {
        &self.ricci
    }

    pub fn traceless_ricci(&self) -> &Mat4 {
        &self.traceless_ricci
    }

    pub fn schouten(&self) -> &Mat4 {
        &self.schouten
    }

    pub fn weyl(&self) -> &AlgebraicCurvature {
        &self.weyl
    }

    pub fn weyl_plus(&self) -> &AlgebraicCurvature {
        &self.weyl_plus
    }

    pub fn weyl_minus(&self) -> &AlgebraicCurvature {
        &self.weyl_minus
    }

    /// `W⁺` as a symmetric trace-free endomorphism of `Λ²₊` in the basis `ω±`.
    pub fn weyl_plus_block(&self) -> &Mat3 {
        &self.weyl_plus_block
    }

    pub fn weyl_minus_block(&self) -> &Mat3 {
        &self.weyl_minus_block
    }

    pub fn ricci_coords(&self) -> Mat4 {
        push_sym(&self.coframe, &self.ricci)
    }

    pub fn traceless_ricci_coords(&self) -> Mat4 {
        push_sym(&self.coframe, &self.traceless_ricci)
    }

    pub fn schouten_coords(&self) -> Mat4 {
        push_sym(&self.coframe, &self.schouten)
    }

    pub fn riemann_coords(&self) -> AlgebraicCurvature {
        self.riemann.transform(&linalg::transpose(&self.coframe))
    }

    pub fn weyl_coords(&self) -> AlgebraicCurvature {
        self.weyl.transform(&linalg::transpose(&self.coframe))
    }

    /// `‖Rm − W − P ⊙ g‖ / ‖Rm‖` evaluated in coordinates.
    pub fn reconstruction_residual(&self, g: &Metric4) -> f64 {
        let rm = self.riemann_coords();
        let rebuilt = self.weyl_coords().add(&kn_unchecked(&self.schouten_coords(), g.components()));
        let diff = libm::sqrt(rm.sub(&rebuilt).norm_sq());
        diff / libm::sqrt(rm.norm_sq()).max(1e-300)
    }

    /// `‖W‖²` with `W` viewed as an endomorphism of two-forms, i.e. `¼|W|²`.
    pub fn weyl_norm_sq(&self) -> f64 {
        linalg::frobenius_sq(&self.weyl.to_operator())
    }

    pub fn weyl_plus_norm_sq(&self) -> f64 {
        linalg::frobenius_sq(&self.weyl_plus_block)
    }

    pub fn weyl_minus_norm_sq(&self) -> f64 {
        linalg::frobenius_sq(&self.weyl_minus_block)
    }

    pub fn weyl_plus_norm(&self) -> f64 {
        libm::sqrt(self.weyl_plus_norm_sq())
    }

    pub fn weyl_minus_norm(&self) -> f64 {
        libm::sqrt(self.weyl_minus_norm_sq())
    }

    pub fn weyl_plus_det(&self) -> f64 {
        linalg::det3(&self.weyl_plus_block)
    }

    pub fn weyl_minus_det(&self) -> f64 {
        linalg::det3(&self.weyl_minus_block)
    }

    /// `|E|²`, frame Frobenius norm of the trace-free Ricci tensor.
    pub fn traceless_ricci_norm_sq(&self) -> f64 {
        linalg::frobenius_sq(&self.traceless_ricci)
    }

    pub fn traceless_ricci_cubed_trace(&self) -> f64 {
        let e = &self.traceless_ricci;
        linalg::trace(&linalg::mat_mul(e, &linalg::mat_mul(e, e)))
    }

    /// `W_{ijkl} E_{ik} E_{jl}`.
    pub fn wee(&self) -> f64 {
        contract_ee(&self.weyl, &self.traceless_ricci)
    }

    pub fn w_plus_ee(&self) -> f64 {
        contract_ee(&self.weyl_plus, &self.traceless_ricci)
    }

    pub fn w_minus_ee(&self) -> f64 {
        contract_ee(&self.weyl_minus, &self.traceless_ricci)
    }

    /// `σ₂(g⁻¹P) = ½((tr P)² − |P|²)`.
    pub fn sigma2(&self) -> f64 {
        let t = linalg::trace(&self.schouten);
        0.5 * (t * t - linalg::frobenius_sq(&self.schouten))
    }

    /// `σ₂` as the sum of pairwise products of the eigenvalues of `g⁻¹P`.
    pub fn sigma2_from_eigenvalues(&self) -> f64 {
        let ev = linalg::symmetric_eigenvalues(&self.schouten);
        let mut s = 0.0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                s += ev[i] * ev[j];
            }
        }
        s
    }

    /// `F⁺ = R − 2√6 ‖W⁺‖`.
    pub fn f_plus(&self) -> f64 {
        self.scalar - 2.0 * SQRT6 * self.weyl_plus_norm()
    }

    /// `(F⁺)₋ = min(F⁺, 0)`.
    pub fn f_plus_negative(&self) -> f64 {
        self.f_plus().min(0.0)
    }

    /// `G_k = |E|^k + |R − R̄|^k + ‖W⁻‖^k + |(F⁺)₋|^k`.
    pub fn g_k(&self, k: i32, mean_scalar: Option<f64>) -> Result<f64> {
        let r_bar = mean_scalar.ok_or(LabError::MissingAverageScalar)?;
        let e = libm::sqrt(self.traceless_ricci_norm_sq());
        let terms = [e, (self.scalar - r_bar).abs(), self.weyl_minus_norm(), self.f_plus_negative().abs()];
        Ok(terms.iter().map(|x| libm::pow(*x, k as f64)).sum())
    }
}

/// The named pointwise scalars built from a decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Scalars {
    pub scalar: f64,
    pub weyl_norm_sq: f64,
    pub weyl_plus_norm: f64,
    pub weyl_minus_norm: f64,
    pub weyl_plus_norm_sq: f64,
    pub weyl_minus_norm_sq: f64,
    pub traceless_ricci_norm_sq: f64,
    pub traceless_ricci_cubed_trace: f64,
    pub weyl_plus_det: f64,
    pub weyl_minus_det: f64,
    pub wee: f64,
    pub w_plus_ee: f64,
    pub w_minus_ee: f64,
    pub sigma2: f64,
    pub f_plus: f64,
    pub f_plus_negative: f64,
    /// `[G₂, G₃, G₄, G₆]` when a mean scalar curvature was supplied.
    pub pinching: Option<[f64; 4]>,
}

/// Collects the pointwise scalars. `G_k` needs the mean scalar curvature
/// `R̄`; asking for it without one is an error.
pub fn scalars(dec: &CurvatureDecomposition, mean_scalar: Option<f64>, with_pinching: bool) -> Result<Scalars> {
    let pinching = if with_pinching {
        Some([
            dec.g_k(2, mean_scalar)?,
            dec.g_k(3, mean_scalar)?,
            dec.g_k(4, mean_scalar)?,
            dec.g_k(6, mean_scalar)?,
        ])
    } else {
        None
    };
    Ok(Scalars {
        scalar: dec.scalar(),
        weyl_norm_sq: dec.weyl_norm_sq(),
        weyl_plus_norm: dec.weyl_plus_norm(),
        weyl_minus_norm: dec.weyl_minus_norm(),
        weyl_plus_norm_sq: dec.weyl_plus_norm_sq(),
        weyl_minus_norm_sq: dec.weyl_minus_norm_sq(),
        traceless_ricci_norm_sq: dec.traceless_ricci_norm_sq(),
        traceless_ricci_cubed_trace: dec.traceless_ricci_cubed_trace(),
        weyl_plus_det: dec.weyl_plus_det(),
        weyl_minus_det: dec.weyl_minus_det(),
        wee: dec.wee(),
        w_plus_ee: dec.w_plus_ee(),
        w_minus_ee: dec.w_minus_ee(),
        sigma2: dec.sigma2(),
        f_plus: dec.f_plus(),
        f_plus_negative: dec.f_plus_negative(),
        pinching,
    })
}

/// Block form of the curvature operator on `Λ²₊ ⊕ Λ²₋`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SingerThorpeBlocks {
    /// `W⁺ + (R/12) Id`.
    pub a: Mat3,
    /// Mixed block `Λ²₋ → Λ²₊`.
    pub b: Mat3,
    /// `W⁻ + (R/12) Id`.
    pub c: Mat3,
    pub weyl_plus_eigenvalues: Vec3,
    pub weyl_minus_eigenvalues: Vec3,
    /// Singular values of `B`, ascending.
    pub b_singular_values: Vec3,
}

impl SingerThorpeBlocks {
    /// Reassembled frame-component curvature tensor.
    pub fn reassemble(&self, orientation: Orientation) -> AlgebraicCurvature {
        curvature_from_blocks(&self.a, &self.b, &self.c, orientation)
    }

    pub fn b_singular_sq_sum(&self) -> f64 {
        self.b_singular_values.iter().map(|b| b * b).sum()
    }
}

pub fn singer_thorpe_blocks(rm: &AlgebraicCurvature, g: &Metric4) -> SingerThorpeBlocks {
    let on = rm.transform(&g.frame());
    singer_thorpe_orthonormal(&on, g.orientation())
}

pub fn singer_thorpe_orthonormal(rm: &AlgebraicCurvature, orientation: Orientation) -> SingerThorpeBlocks {
    let chiral = to_chiral(&rm.to_operator(), orientation);
    let a = linalg::symmetrize(&block(&chiral, 0, 0));
    let c = linalg::symmetrize(&block(&chiral, 3, 3));
    let b = block(&chiral, 0, 3);
    let scalar = linalg::trace(&rm.ricci_contraction(&linalg::identity()));
    let shift = linalg::scale(&linalg::identity::<3>(), scalar / 12.0);
    SingerThorpeBlocks {
        a,
        b,
        c,
        weyl_plus_eigenvalues: linalg::symmetric_eigenvalues(&linalg::sub(&a, &shift)),
        weyl_minus_eigenvalues: linalg::symmetric_eigenvalues(&linalg::sub(&c, &shift)),
        b_singular_values: linalg::singular_values3(&b),
    }
}
