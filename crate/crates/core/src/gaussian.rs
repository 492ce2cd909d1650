//! Polynomial-times-Gaussian algebra shared by the orbital and integral code.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Highest power kept in each variable of a [`Poly`].
pub const MAX_DEG: usize = 4;
const W: usize = MAX_DEG + 1;

/// Complex polynomial in two variables `u` and `y`, stored densely.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Poly {
    c: [[C64; W]; W],
}

impl Default for Poly {
    fn default() -> Self {
        Poly { c: [[C64::new(0.0, 0.0); W]; W] }
    }
}

impl Poly {
    pub fn constant(v: C64) -> Self {
        let mut p = Poly::default();
        p.c[0][0] = v;
        p
    }

    /// `cu·u + cy·y + c0`
    pub fn linear(c0: C64, cu: C64, cy: C64) -> Self {
        let mut p = Poly::default();
        p.c[0][0] = c0;
        p.c[1][0] = cu;
        p.c[0][1] = cy;
        p
    }

    #[inline]
    pub fn coeff(&self, a: usize, b: usize) -> C64 {
        self.c[a][b]
    }

    /// Degree in `u` and in `y` actually present.
    pub fn degrees(&self) -> (usize, usize) {
        let mut du = 0;
        let mut dy = 0;
        for a in 0..W {
            for b in 0..W {
                if self.c[a][b] != C64::new(0.0, 0.0) {
                    du = du.max(a);
                    dy = dy.max(b);
                }
            }
        }
        (du, dy)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut r = *self;
        for a in 0..W {
            for b in 0..W {
                r.c[a][b] += o.c[a][b];
            }
        }
        r
    }

    pub fn scale(&self, s: C64) -> Poly {
        let mut r = *self;
        for row in r.c.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        r
    }

    /// Product; panics if a degree would exceed [`MAX_DEG`].
    pub fn mul(&self, o: &Poly) -> Poly {
        let mut r = Poly::default();
        for a in 0..W {
            for b in 0..W {
                let x = self.c[a][b];
                if x == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..W {
                    for d in 0..W {
                        let z = o.c[c][d];
                        if z == C64::new(0.0, 0.0) {
                            continue;
                        }
                        assert!(a + c < W && b + d < W, "polynomial degree overflow");
                        r.c[a + c][b + d] += x * z;
                    }
                }
            }
        }
        r
    }

    pub fn conj(&self) -> Poly {
        let mut r = *self;
        for row in r.c.iter_mut() {
            for v in row.iter_mut() {
                *v = v.conj();
            }
        }
        r
    }

    pub fn eval(&self, u: f64, y: f64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        let mut ua = 1.0;
        for a in 0..W {
            let mut yb = 1.0;
            for b in 0..W {
                acc += self.c[a][b] * (ua * yb);
                yb *= y;
            }
            ua *= u;
        }
        acc
    }
}

/// Raw moments E[Uⁿ], n = 0..=nmax, of a Gaussian with (complex) mean `m` and variance `s2`.
#[inline]
pub fn gaussian_moments(m: C64, s2: f64, out: &mut [C64]) {
    if out.is_empty() {
        return;
    }
    out[0] = C64::new(1.0, 0.0);
    if out.len() > 1 {
        out[1] = m;
    }
    for n in 1..out.len() - 1 {
        out[n + 1] = m * out[n] + (n as f64 * s2) * out[n - 1];
    }
}

/// ∫ uⁿ exp(−βu² − γ(u − d)² + iku) du for n = 0..out.len().
pub fn gauss_poly_integrals(beta: f64, gamma: f64, d: f64, k: f64, out: &mut [C64]) {
    let p = beta + gamma;
    let m = C64::new(gamma * d / p, k / (2.0 * p));
    let base = (p * m * m - gamma * d * d).exp() * (PI / p).sqrt();
    gaussian_moments(m, 0.5 / p, out);
    for v in out.iter_mut() {
        *v *= base;
    }
}

/// Single-`n` convenience wrapper around [`gauss_poly_integrals`].
#[cfg(test)]
pub fn gauss_poly_integral(n: usize, beta: f64, gamma: f64, d: f64, k: f64) -> C64 {
    let mut buf = [C64::new(0.0, 0.0); 2 * W];
    assert!(n < buf.len());
    gauss_poly_integrals(beta, gamma, d, k, &mut buf[..=n]);
    buf[n]
}

/// Product φᵢ*·φₖ of two orbitals with a shared Gaussian width:
/// `pref · poly(x − xc, y) · exp(−β((x − xc)² + y²)) · exp(i k y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDensity {
    pub pref: f64,
    pub xc: f64,
    pub beta: f64,
    pub k: f64,
    pub poly: Poly,
}

impl PairDensity {
    pub fn eval(&self, x: f64, y: f64) -> C64 {
        let u = x - self.xc;
        let g = (-self.beta * (u * u + y * y)).exp();
        self.poly.eval(u, y) * C64::from_polar(self.pref * g, self.k * y)
    }

    /// ∫ ρ · exp(−γx (x − cx)² − γy y²) d²r; γ = 0 gives the plain integral.
    pub fn integrate_gaussian(&self, gamma_x: f64, cx: f64, gamma_y: f64) -> C64 {
        let (du, dy) = self.poly.degrees();
        let mut ix = [C64::new(0.0, 0.0); W];
        let mut iy = [C64::new(0.0, 0.0); W];
        gauss_poly_integrals(self.beta, gamma_x, cx - self.xc, 0.0, &mut ix[..=du]);
        gauss_poly_integrals(self.beta, gamma_y, 0.0, self.k, &mut iy[..=dy]);
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..=du {
            for b in 0..=dy {
                acc += self.poly.coeff(a, b) * ix[a] * iy[b];
            }
        }
        acc * self.pref
    }

    pub fn integrate(&self) -> C64 {
        self.integrate_gaussian(0.0, 0.0, 0.0)
    }

    /// Same density multiplied by an extra polynomial in (u, y).
    pub fn times(&self, p: &Poly) -> PairDensity {
        PairDensity { poly: self.poly.mul(p), ..*self }
    }

    /// Fourier transform ∫ ρ(r) e^{−i q·r} d²r.
    pub fn fourier(&self, qx: f64, qy: f64) -> C64 {
        let (du, dy) = self.poly.degrees();
        let mut ix = [C64::new(0.0, 0.0); W];
        let mut iy = [C64::new(0.0, 0.0); W];
        gauss_poly_integrals(self.beta, 0.0, 0.0, -qx, &mut ix[..=du]);
        gauss_poly_integrals(self.beta, 0.0, 0.0, self.k - qy, &mut iy[..=dy]);
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..=du {
            for b in 0..=dy {
                acc += self.poly.coeff(a, b) * ix[a] * iy[b];
            }
        }
        acc * C64::from_polar(self.pref, -qx * self.xc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trapezoid<F: Fn(f64) -> C64>(f: F, lo: f64, hi: f64, n: usize) -> C64 {
        let h = (hi - lo) / n as f64;
        let mut s = 0.5 * (f(lo) + f(hi));
        for i in 1..n {
            s += f(lo + i as f64 * h);
        }
        s * h
    }

    #[test]
    fn primitive_matches_numerical_integration() {
        for &(n, beta, gamma, d, k) in &[
            (0usize, 0.3, 0.0, 0.0, 0.0),
            (1, 0.3, 0.1, 2.0, 0.4),
            (2, 0.05, 0.02, -7.0, 0.1),
            (3, 0.5, 0.0, 0.0, -1.3),
            (4, 0.2, 0.3, 1.5, 0.8),
        ] {
            let exact = gauss_poly_integral(n, beta, gamma, d, k);
            let num = trapezoid(
                |u| {
                    let e = -beta * u * u - gamma * (u - d) * (u - d);
                    C64::from_polar(u.powi(n as i32) * e.exp(), k * u)
                },
                -80.0,
                80.0,
                40_000,
            );
            assert!((exact - num).norm() < 1e-9, "n={n}: {exact} vs {num}");
        }
    }

    #[test]
    fn moments_of_standard_normal() {
        let mut m = [C64::new(0.0, 0.0); 7];
        gaussian_moments(C64::new(0.0, 0.0), 1.0, &mut m);
        let expect = [1.0, 0.0, 1.0, 0.0, 3.0, 0.0, 15.0];
        for (a, b) in m.iter().zip(expect) {
            assert!((a.re - b).abs() < 1e-14 && a.im == 0.0);
        }
    }

    #[test]
    fn poly_algebra() {
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let p = Poly::linear(C64::new(2.0, 0.0), one, i);
        let q = p.conj().mul(&p);
        // |2 + u + i y|² = (2 + u)² + y²
        for &(u, y) in &[(0.3, -1.0), (2.0, 5.0)] {
            let v = q.eval(u, y);
            assert!((v.re - ((2.0 + u) * (2.0 + u) + y * y)).abs() < 1e-12);
            assert!(v.im.abs() < 1e-12);
        }
        assert_eq!(q.degrees(), (2, 2));
        let s = p.add(&p).scale(C64::new(0.5, 0.0));
        assert_eq!(s, p);
    }

    #[test]
    fn fourier_transform_at_zero_is_the_integral() {
        let rho = PairDensity {
            pref: 0.7,
            xc: 3.0,
            beta: 0.02,
            k: 0.05,
            poly: Poly::linear(C64::new(1.0, 0.0), C64::new(0.5, 0.1), C64::new(0.0, -0.3)),
        };
        assert!((rho.fourier(0.0, 0.0) - rho.integrate()).norm() < 1e-12);
    }
}
