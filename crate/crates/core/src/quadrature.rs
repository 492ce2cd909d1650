//! Gauss-Legendre rules.

use std::f64::consts::PI;

/// Nodes and weights of the n-point Gauss-Legendre rule on [lo, hi].
pub fn gauss_legendre(n: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        xs[i] = mid - half * z;
        xs[n - 1 - i] = mid + half * z;
        ws[i] = half * w;
        ws[n - 1 - i] = half * w;
    }
    (xs, ws)
}
