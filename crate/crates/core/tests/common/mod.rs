//! Test-side oracles written independently of the library.
#![allow(dead_code)]

use ricci_lab_core::linalg;

pub type Rank4 = [[[[f64; 4]; 4]; 4]; 4];

pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Weyl tensor of an orthonormal-frame tensor, computed from scratch.
pub fn oracle_weyl(r: &Rank4) -> Rank4 {
    let mut ric = [[0.0; 4]; 4];
    for j in 0..4 {
        for l in 0..4 {
            ric[j][l] = (0..4).map(|i| r[i][j][i][l]).sum();
        }
    }
    let s: f64 = (0..4).map(|i| ric[i][i]).sum();
    let d = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let p = |i: usize, j: usize| 0.5 * (ric[i][j] - s / 6.0 * d(i, j));
    let mut w = [[[[0.0; 4]; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let kn = p(i, k) * d(j, l) + p(j, l) * d(i, k) - p(i, l) * d(j, k) - p(j, k) * d(i, l);
                    w[i][j][k][l] = r[i][j][k][l] - kn;
                }
            }
        }
    }
    w
}

/// `‖W±‖²` through the Hodge star on two-forms, orientation `e⁰¹²³`.
pub fn oracle_weyl_halves(r: &Rank4) -> (f64, f64) {
    let w = oracle_weyl(r);
    let mut op = [[0.0; 6]; 6];
    for (p, &(i, j)) in PAIRS.iter().enumerate() {
        for (q, &(k, l)) in PAIRS.iter().enumerate() {
            op[p][q] = w[i][j][k][l];
        }
    }
    let mut star = [[0.0; 6]; 6];
    for (a, b, s) in [(0, 5, 1.0), (1, 4, -1.0), (2, 3, 1.0)] {
        star[a][b] = s;
        star[b][a] = s;
    }
    let half = |sign: f64| {
        let mut proj = [[0.0; 6]; 6];
        for i in 0..6 {
            for j in 0..6 {
                proj[i][j] = 0.5 * (if i == j { 1.0 } else { 0.0 } + sign * star[i][j]);
            }
        }
        let block = linalg::mat_mul(&proj, &linalg::mat_mul(&op, &proj));
        linalg::frobenius_sq(&block)
    };
    (half(1.0), half(-1.0))
}

pub fn oracle_ricci(r: &Rank4) -> [[f64; 4]; 4] {
    core::array::from_fn(|j| core::array::from_fn(|l| (0..4).map(|i| r[i][j][i][l]).sum()))
}

/// `W_{ijkl} E_{ik} E_{jl}` with `E` the trace-free Ricci tensor.
pub fn oracle_wee(r: &Rank4) -> f64 {
    let w = oracle_weyl(r);
    let mut e = oracle_ricci(r);
    let s = (0..4).map(|i| e[i][i]).sum::<f64>();
    (0..4).for_each(|i| e[i][i] -= s / 4.0);
    let mut total = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    total += w[i][j][k][l] * e[i][k] * e[j][l];
                }
            }
        }
    }
    total
}

