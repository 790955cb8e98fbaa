use alloc::vec::Vec;
use core::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[lo, hi]`.
pub fn gauss_legendre(n: usize, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    for i in 0..n {
        // Tricomi initial guess, then Newton on P_n
        let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((mid - half * x, half * w));
    }
    out
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 12, 48] {
            let nodes = gauss_legendre(n, -1.0, 2.0);
            let deg = 2 * n - 1;
            let approx: f64 = nodes.iter().map(|(x, w)| w * libm::pow(*x, deg as f64)).sum();
            let exact = (libm::pow(2.0, (deg + 1) as f64) - libm::pow(-1.0, (deg + 1) as f64)) / (deg + 1) as f64;
            assert!((approx - exact).abs() < 1e-11 * exact.abs().max(1.0), "n={n}");
        }
    }

    #[test]
    fn sine_cubed_on_half_period() {
        let nodes = gauss_legendre(16, 0.0, PI);
        let s: f64 = nodes.iter().map(|(x, w)| w * libm::pow(libm::sin(*x), 3.0)).sum();
        assert!((s - 4.0 / 3.0).abs() < 1e-14);
    }
}
