//! Cholesky factorisation of Hermitian positive-definite band matrices.

use nalgebra::DVector;
use num_complex::Complex64 as C64;

/// A = L Lᴴ with L lower triangular of half-bandwidth `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandCholesky {
    n: usize,
    p: usize,
    /// Row i holds L[i, i − p ..= i] (entries before column 0 unused).
    l: Vec<C64>,
}

impl BandCholesky {
    /// Factorises the matrix with the given diagonal and strictly lower band
    /// entries `lower(i, j)` for i − p ≤ j < i. Returns None if it is not
    /// positive definite.
    pub fn new(diag: &[f64], p: usize, lower: impl Fn(usize, usize) -> C64) -> Option<Self> {
        let n = diag.len();
        let w = p + 1;
        let mut l = vec![C64::new(0.0, 0.0); n * w];
        // column offset of (i, j) within row i
        let at = |i: usize, j: usize| i * w + (j + p - i);
        for i in 0..n {
            let j0 = i.saturating_sub(p);
            for j in j0..i {
                let mut s = lower(i, j);
                let k0 = j0.max(j.saturating_sub(p));
                for k in k0..j {
                    s -= l[at(i, k)] * l[at(j, k)].conj();
                }
                l[at(i, j)] = s / l[at(j, j)].re;
            }
            let mut d = diag[i];
            for k in j0..i {
                d -= l[at(i, k)].norm_sqr();
            }
            if !(d > 0.0) {
                return None;
            }
            l[at(i, i)] = C64::new(d.sqrt(), 0.0);
        }
        Some(BandCholesky { n, p, l })
    }

    pub fn solve(&self, b: &DVector<C64>) -> DVector<C64> {
        let (n, p, w) = (self.n, self.p, self.p + 1);
        let at = |i: usize, j: usize| i * w + (j + p - i);
        let mut y = b.clone();
        for i in 0..n {
            let mut s = y[i];
            for k in i.saturating_sub(p)..i {
                s -= self.l[at(i, k)] * y[k];
            }
            y[i] = s / self.l[at(i, i)].re;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..(i + p + 1).min(n) {
                s -= self.l[at(k, i)].conj() * y[k];
            }
            y[i] = s / self.l[at(i, i)].re;
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn solves_a_banded_system() {
        let (n, p) = (40, 5);
        let a = DMatrix::from_fn(n, n, |i, j| {
            let d = i.abs_diff(j);
            if i == j {
                C64::new(4.0 + (i as f64).cos(), 0.0)
            } else if d <= p {
                let v = C64::new(0.3 / d as f64, 0.1 * ((i + j) as f64).sin());
                if i > j {
                    v
                } else {
                    C64::new(0.3 / d as f64, -0.1 * ((i + j) as f64).sin())
                }
            } else {
                C64::new(0.0, 0.0)
            }
        });
        assert!((&a - a.adjoint()).norm() < 1e-14);
        let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
        let ch = BandCholesky::new(&diag, p, |i, j| a[(i, j)]).unwrap();
        let b = DVector::from_fn(n, |i, _| C64::new(i as f64, 1.0));
        let x = ch.solve(&b);
        assert!((&a * x - b).norm() < 1e-10);
    }

    #[test]
    fn rejects_indefinite() {
        assert!(BandCholesky::new(&[1.0, -1.0], 1, |_, _| C64::new(0.0, 0.0)).is_none());
    }
}
