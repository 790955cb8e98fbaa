//! Fixed-size dense linear algebra for the 3×3, 4×4 and 6×6 matrices that
//! show up in four-dimensional curvature computations.

pub type Vec3 = [f64; 3];
pub type Vec4 = [f64; 4];
pub type Mat3 = [[f64; 3]; 3];
pub type Mat4 = [[f64; 4]; 4];
pub type Mat6 = [[f64; 6]; 6];

pub fn zeros<const N: usize>() -> [[f64; N]; N] {
    [[0.0; N]; N]
}

pub fn identity<const N: usize>() -> [[f64; N]; N] {
    let mut m = [[0.0; N]; N];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn diag<const N: usize>(d: [f64; N]) -> [[f64; N]; N] {
    let mut m = [[0.0; N]; N];
    for i in 0..N {
        m[i][i] = d[i];
    }
    m
}

pub fn transpose<const N: usize>(a: &[[f64; N]; N]) -> [[f64; N]; N] {
    let mut t = [[0.0; N]; N];
    for i in 0..N {
        for j in 0..N {
            t[j][i] = a[i][j];
        }
    }
    t
}

pub fn mat_mul<const N: usize>(a: &[[f64; N]; N], b: &[[f64; N]; N]) -> [[f64; N]; N] {
    let mut c = [[0.0; N]; N];
    for i in 0..N {
        for k in 0..N {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..N {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

pub fn mat_vec<const N: usize>(a: &[[f64; N]; N], x: &[f64; N]) -> [f64; N] {
    let mut y = [0.0; N];
    for i in 0..N {
        for j in 0..N {
            y[i] += a[i][j] * x[j];
        }
    }
    y
}

pub fn add<const N: usize>(a: &[[f64; N]; N], b: &[[f64; N]; N]) -> [[f64; N]; N] {
    let mut c = *a;
    for i in 0..N {
        for j in 0..N {
            c[i][j] += b[i][j];
        }
    }
    c
}

pub fn sub<const N: usize>(a: &[[f64; N]; N], b: &[[f64; N]; N]) -> [[f64; N]; N] {
    let mut c = *a;
    for i in 0..N {
        for j in 0..N {
            c[i][j] -= b[i][j];
        }
    }
    c
}

pub fn scale<const N: usize>(a: &[[f64; N]; N], s: f64) -> [[f64; N]; N] {
    let mut c = *a;
    for row in c.iter_mut() {
        for x in row.iter_mut() {
            *x *= s;
        }
    }
    c
}

pub fn trace<const N: usize>(a: &[[f64; N]; N]) -> f64 {
    (0..N).map(|i| a[i][i]).sum()
}

/// Sum of squared entries.
pub fn frobenius_sq<const N: usize>(a: &[[f64; N]; N]) -> f64 {
    a.iter().flat_map(|r| r.iter()).map(|x| x * x).sum()
}

pub fn max_abs<const N: usize>(a: &[[f64; N]; N]) -> f64 {
    a.iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Largest |a_ij − a_ji|.
pub fn asymmetry<const N: usize>(a: &[[f64; N]; N]) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..N {
        for j in (i + 1)..N {
            worst = worst.max((a[i][j] - a[j][i]).abs());
        }
    }
    worst
}

pub fn symmetrize<const N: usize>(a: &[[f64; N]; N]) -> [[f64; N]; N] {
    let mut s = *a;
    for i in 0..N {
        for j in (i + 1)..N {
            let m = 0.5 * (a[i][j] + a[j][i]);
            s[i][j] = m;
            s[j][i] = m;
        }
    }
    s
}

pub fn det3(a: &Mat3) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// Lower-triangular `L` with `a = L Lᵀ`, or `None` when `a` is not positive definite.
pub fn cholesky4(a: &Mat4) -> Option<Mat4> {
    let mut l = zeros::<4>();
    for j in 0..4 {
        let mut d = a[j][j];
        for k in 0..j {
            d -= l[j][k] * l[j][k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let ljj = libm::sqrt(d);
        l[j][j] = ljj;
        for i in (j + 1)..4 {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            l[i][j] = s / ljj;
        }
    }
    Some(l)
}

/// Inverse of a lower-triangular matrix with nonzero diagonal.
pub fn lower_inverse4(l: &Mat4) -> Mat4 {
    let mut inv = zeros::<4>();
    for j in 0..4 {
        inv[j][j] = 1.0 / l[j][j];
        for i in (j + 1)..4 {
            let mut s = 0.0;
            for k in j..i {
                s -= l[i][k] * inv[k][j];
            }
            inv[i][j] = s / l[i][i];
        }
    }
    inv
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Eigenvalues come back in ascending order; equal eigenvalues keep the order
/// in which the sweep left them on the diagonal. Column `k` of the returned
/// matrix is the unit eigenvector for eigenvalue `k`.
pub fn symmetric_eigen<const N: usize>(a: &[[f64; N]; N]) -> ([f64; N], [[f64; N]; N]) {
    let mut m = symmetrize(a);
    let mut v = identity::<N>();
    let norm = libm::sqrt(frobenius_sq(&m));
    if norm == 0.0 {
        return ([0.0; N], v);
    }
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..N {
            for q in (p + 1)..N {
                off += m[p][q] * m[p][q];
            }
        }
        if libm::sqrt(off) <= 1e-17 * norm {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = m[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + libm::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..N {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..N {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for k in 0..N {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut vals = [0.0; N];
    let mut order = [0usize; N];
    for i in 0..N {
        vals[i] = m[i][i];
        order[i] = i;
    }
    // insertion sort is stable, which pins the tie order
    for i in 1..N {
        let mut j = i;
        while j > 0 && vals[order[j - 1]] > vals[order[j]] {
            order.swap(j - 1, j);
            j -= 1;
        }
    }
    let mut sorted = [0.0; N];
    let mut vecs = [[0.0; N]; N];
    for (k, &idx) in order.iter().enumerate() {
        sorted[k] = vals[idx];
        for r in 0..N {
            vecs[r][k] = v[r][idx];
        }
    }
    (sorted, vecs)
}

pub fn symmetric_eigenvalues<const N: usize>(a: &[[f64; N]; N]) -> [f64; N] {
    symmetric_eigen(a).0
}

/// Singular values in ascending order.
pub fn singular_values3(b: &Mat3) -> Vec3 {
    let bbt = mat_mul(b, &transpose(b));
    let mut s = symmetric_eigenvalues(&bbt);
    for x in s.iter_mut() {
        *x = libm::sqrt(x.max(0.0));
    }
    s
}

/// Compensated (Neumaier) accumulator; summation order is the call order.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}
