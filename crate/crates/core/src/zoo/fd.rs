//! Fourth-order central finite differences for metric components and
//! scalar fields on a chart, and the Levi-Civita curvature built from them.

use crate::curvature::AlgebraicCurvature;
use crate::linalg::{Mat4, Vec4};

const D1: [(f64, f64); 4] = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];
const D2: [(f64, f64); 5] = [(-2.0, -1.0), (-1.0, 16.0), (0.0, -30.0), (1.0, 16.0), (2.0, -1.0)];

fn shifted(x: &Vec4, k: usize, a: f64, l: usize, b: f64) -> Vec4 {
    let mut y = *x;
    y[k] += a;
    y[l] += b;
    y
}

/// Value, gradient and coordinate Hessian of a field, all by finite differences.
#[derive(Debug, Clone, Copy)]
pub struct Jet<T> {
    pub value: T,
    pub d: [T; 4],
    pub dd: [[T; 4]; 4],
}

pub type MetricJet = Jet<Mat4>;
pub type ScalarJet = Jet<f64>;

trait Field: Copy {
    fn zero() -> Self;
    fn axpy(&mut self, a: f64, x: &Self);
}

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += a * x;
    }
}

impl Field for Mat4 {
    fn zero() -> Self {
        [[0.0; 4]; 4]
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        for i in 0..4 {
            for j in 0..4 {
                self[i][j] += a * x[i][j];
            }
        }
    }
}

fn jet<T: Field>(f: &impl Fn(&Vec4) -> T, x: &Vec4, h: f64) -> Jet<T> {
    let value = f(x);
    let mut d = [T::zero(); 4];
    let mut dd = [[T::zero(); 4]; 4];
    for k in 0..4 {
        for &(s, c) in D1.iter() {
            d[k].axpy(c / (12.0 * h), &f(&shifted(x, k, s * h, k, 0.0)));
        }
        for &(s, c) in D2.iter() {
            let v = if s == 0.0 { value } else { f(&shifted(x, k, s * h, k, 0.0)) };
            dd[k][k].axpy(c / (12.0 * h * h), &v);
        }
    }
    for k in 0..4 {
        for l in (k + 1)..4 {
            let mut acc = T::zero();
            for &(sa, ca) in D1.iter() {
                for &(sb, cb) in D1.iter() {
                    acc.axpy(ca * cb / (144.0 * h * h), &f(&shifted(x, k, sa * h, l, sb * h)));
                }
            }
            dd[k][l] = acc;
            dd[l][k] = acc;
        }
    }
    Jet { value, d, dd }
}

pub fn metric_jet(f: &impl Fn(&Vec4) -> Mat4, x: &Vec4, h: f64) -> MetricJet {
    jet(f, x, h)
}

pub fn scalar_jet(f: &impl Fn(&Vec4) -> f64, x: &Vec4, h: f64) -> ScalarJet {
    jet(f, x, h)
}

/// Christoffel symbols of the second kind, `Γ^i_{jk}`.
pub fn christoffel(jet: &MetricJet, g_inv: &Mat4) -> [[[f64; 4]; 4]; 4] {
    let mut first = [[[0.0; 4]; 4]; 4];
    for m in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                first[m][j][k] = 0.5 * (jet.d[j][m][k] + jet.d[k][m][j] - jet.d[m][j][k]);
            }
        }
    }
    let mut gamma = [[[0.0; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let mut s = 0.0;
                for m in 0..4 {
                    s += g_inv[i][m] * first[m][j][k];
                }
                gamma[i][j][k] = s;
            }
        }
    }
    gamma
}

/// `R_{ijkl} = ½(∂_j∂_k g_il + ∂_i∂_l g_jk − ∂_i∂_k g_jl − ∂_j∂_l g_ik)
///            + g_mn (Γ^m_jk Γ^n_il − Γ^m_jl Γ^n_ik)`.
pub fn riemann(jet: &MetricJet, gamma: &[[[f64; 4]; 4]; 4]) -> AlgebraicCurvature {
    let g = &jet.value;
    let dd = &jet.dd;
    // lowered[n][i][l] = g_nm Γ^m_il
    let mut lowered = [[[0.0; 4]; 4]; 4];
    for n in 0..4 {
        for i in 0..4 {
            for l in 0..4 {
                let mut s = 0.0;
                for m in 0..4 {
                    s += g[n][m] * gamma[m][i][l];
                }
                lowered[n][i][l] = s;
            }
        }
    }
    let mut r = [[[[0.0; 4]; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let second = 0.5 * (dd[j][k][i][l] + dd[i][l][j][k] - dd[i][k][j][l] - dd[j][l][i][k]);
                    let mut quad = 0.0;
                    for m in 0..4 {
                        quad += gamma[m][j][k] * lowered[m][i][l] - gamma[m][j][l] * lowered[m][i][k];
                    }
                    r[i][j][k][l] = second + quad;
                }
            }
        }
    }
    AlgebraicCurvature::from_components(r)
}

/// Covariant Hessian `∇²u = ∂∂u − Γ^k ∂_k u`.
pub fn covariant_hessian(u: &ScalarJet, gamma: &[[[f64; 4]; 4]; 4]) -> Mat4 {
    let mut h = u.dd;
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                h[i][j] -= gamma[k][i][j] * u.d[k];
            }
        }
    }
    h
}

/// `Δu = g^{ij} (∇²u)_{ij}`.
pub fn laplacian(u: &ScalarJet, gamma: &[[[f64; 4]; 4]; 4], g_inv: &Mat4) -> f64 {
    let h = covariant_hessian(u, gamma);
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            s += g_inv[i][j] * h[i][j];
        }
    }
    s
}
