//! Single-particle Hamiltonian and Coulomb kernel on a [`Mesh`].
//!
//! Operators act on u = W^{1/2} ψ, so that Σ |u|² = ∫ |ψ|² and the
//! discretised Hamiltonian is an ordinary Hermitian matrix.

use super::band::BandCholesky;
use super::mesh::Mesh;
use crate::model::{magnetic_length, MaterialParams, Potential2d};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

/// Finite-volume Peierls Hamiltonian, stored as a diagonal plus one entry
/// per nearest-neighbour link.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub n: usize,
    /// Nodes per mesh row; also the half-bandwidth of the matrix.
    pub nx: usize,
    pub diag: Vec<f64>,
    /// (a, b, H_ab) with a < b; H_ba is the conjugate.
    pub links: Vec<(usize, usize, C64)>,
    pub weights: Vec<f64>,
    pub potential: Vec<f64>,
}

impl Lattice {
    /// Kinetic term (ħ²/2m*)(−i∇ − a)² with a = (−(y − y_g), x − x_g)/(2 lB²),
    /// Dirichlet walls at the box edge, plus V on the cell centres.
    pub fn new<P: Potential2d + ?Sized>(mesh: &Mesh, pot: &P, mat: &MaterialParams, b: f64, gauge_center: (f64, f64)) -> Self {
        let n = mesh.len();
        let k = 0.5 * mat.scales().kinetic;
        let lb = magnetic_length(b);
        let inv2lb2 = if lb.is_infinite() { 0.0 } else { 0.5 / (lb * lb) };
        let (xg, yg) = gauge_center;
        let weights = mesh.weights();
        let mut diag = vec![0.0; n];
        let mut links = Vec::with_capacity(2 * n);
        let mut add_link = |a: usize, b: usize, c: f64, theta: f64, diag: &mut Vec<f64>| {
            diag[a] += c;
            diag[b] += c;
            // c |e^{−iθ} ψ_b − ψ_a|²
            links.push((a, b, -C64::from_polar(c, -theta)));
        };
        for j in 0..mesh.ny {
            for i in 0..mesh.nx {
                let a = mesh.index(i, j);
                let (x, y) = (mesh.xs[i], mesh.ys[j]);
                if i + 1 < mesh.nx {
                    let d = mesh.xs[i + 1] - x;
                    add_link(a, mesh.index(i + 1, j), k * mesh.dy[j] / d, -(y - yg) * d * inv2lb2, &mut diag);
                }
                if j + 1 < mesh.ny {
                    let d = mesh.ys[j + 1] - y;
                    add_link(a, mesh.index(i, j + 1), k * mesh.dx[i] / d, (x - xg) * d * inv2lb2, &mut diag);
                }
                // ψ = 0 on the walls
                if i == 0 || i + 1 == mesh.nx {
                    diag[a] += k * mesh.dy[j] / (mesh.extent.0 - x.abs());
                }
                if j == 0 || j + 1 == mesh.ny {
                    diag[a] += k * mesh.dx[i] / (mesh.extent.1 - y.abs());
                }
            }
        }
        let potential: Vec<f64> = mesh.nodes().iter().map(|&(x, y)| pot.value(x, y)).collect();
        let diag = diag.iter().zip(&weights).zip(&potential).map(|((d, w), v)| d / w + v).collect();
        let links = links
            .into_iter()
            .map(|(a, b, h)| (a, b, h / (weights[a] * weights[b]).sqrt()))
            .collect();
        Lattice { n, nx: mesh.nx, diag, links, weights, potential }
    }

    pub fn apply(&self, x: &DVector<C64>) -> DVector<C64> {
        let mut y = DVector::from_iterator(self.n, self.diag.iter().zip(x.iter()).map(|(d, v)| v * *d));
        for &(a, b, h) in &self.links {
            y[a] += h * x[b];
            y[b] += h.conj() * x[a];
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::from_diagonal(&DVector::from_iterator(self.n, self.diag.iter().map(|&d| C64::new(d, 0.0))));
        for &(a, b, h) in &self.links {
            m[(a, b)] += h;
            m[(b, a)] += h.conj();
        }
        m
    }

    /// Band Cholesky factor of H + diag(extra) − σ, or None if that matrix
    /// is not positive definite.
    pub fn shifted_cholesky(&self, extra: &[f64], sigma: f64) -> Option<BandCholesky> {
        // H_ab for b < a sits at b = a − 1 or b = a − nx
        let mut left = vec![C64::new(0.0, 0.0); self.n];
        let mut below = vec![C64::new(0.0, 0.0); self.n];
        for &(a, b, h) in &self.links {
            if b == a + 1 {
                left[b] = h.conj();
            } else {
                below[b] = h.conj();
            }
        }
        let diag: Vec<f64> = self.diag.iter().zip(extra).map(|(d, e)| d + e - sigma).collect();
        let nx = self.nx;
        BandCholesky::new(&diag, nx, |i, j| {
            if j + 1 == i {
                left[i]
            } else if j + nx == i {
                below[i]
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// ψ = u / √W
    pub fn to_wavefunction(&self, u: &DVector<C64>) -> DVector<C64> {
        DVector::from_iterator(self.n, u.iter().zip(&self.weights).map(|(v, w)| v / w.sqrt()))
    }
}

/// e²/(ε|r − r'|) between cell centres; the diagonal is the average of
/// e²/(εr) over the cell around its own centre.
pub fn coulomb_kernel(mesh: &Mesh, mat: &MaterialParams) -> DMatrix<f64> {
    let c = mat.scales().coulomb;
    let nodes = mesh.nodes();
    let n = nodes.len();
    let mut v = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..a {
            let (dx, dy) = (nodes[a].0 - nodes[b].0, nodes[a].1 - nodes[b].1);
            let r = (dx * dx + dy * dy).sqrt();
            v[(a, b)] = c / r;
            v[(b, a)] = c / r;
        }
    }
    for j in 0..mesh.ny {
        for i in 0..mesh.nx {
            let (p, q) = (0.5 * mesh.dx[i], 0.5 * mesh.dy[j]);
            let a = mesh.index(i, j);
            v[(a, a)] = c * (p * (q / p).asinh() + q * (p / q).asinh()) / (p * q);
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::uhf::mesh::{build_mesh, Stretch};

    struct Parabola(f64);

    impl Potential2d for Parabola {
        fn value(&self, x: f64, y: f64) -> f64 {
            0.5 * self.0 * (x * x + y * y)
        }
        fn slope_x(&self, x: f64, _: f64) -> f64 {
            self.0 * x
        }
        fn curvature(&self, _: f64, _: f64) -> (f64, f64) {
            (self.0, self.0)
        }
    }

    fn lowest(l: &Lattice, k: usize) -> Vec<f64> {
        let mut e: Vec<f64> = nalgebra::SymmetricEigen::new(l.to_dense()).eigenvalues.iter().copied().collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e.truncate(k);
        e
    }

    #[test]
    fn fock_darwin_levels() {
        let mat = MaterialParams::gaas();
        let hw0 = 5.0;
        let k = hw0 * hw0 / mat.scales().kinetic;
        let mesh = build_mesh(30, 30, (60.0, 60.0), Stretch::Core { half_x: 30.0, half_y: 30.0, fraction_x: 0.8, fraction_y: 0.8 }).unwrap();
        for b in [0.0, 3.0] {
            let l = Lattice::new(&mesh, &Parabola(k), &mat, b, (0.0, 0.0));
            let wc = mat.scales().cyclotron_per_tesla * b;
            let big = (hw0 * hw0 + 0.25 * wc * wc).sqrt();
            // (2n + |m| + 1) ħΩ − m ħω_c/2
            let mut exact: Vec<f64> = (0..3)
                .flat_map(|nr| (-4i32..=4).map(move |m| (2 * nr + m.unsigned_abs() as i32 + 1) as f64 * big - m as f64 * 0.5 * wc))
                .collect();
            exact.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let e = lowest(&l, 4);
            for (x, y) in e.iter().zip(&exact) {
                assert!((x - y).abs() < 0.01 * y, "B={b} {e:?} {:?}", &exact[..4]);
            }
        }
    }

    #[test]
    fn hermitian_and_dense_agree() {
        let mat = MaterialParams::gaas();
        let mesh = build_mesh(9, 7, (20.0, 15.0), Stretch::Tanh { wx: 15.0, wy: 10.0 }).unwrap();
        let l = Lattice::new(&mesh, &Parabola(0.02), &mat, 4.0, (3.0, -1.0));
        let h = l.to_dense();
        assert!((&h - h.adjoint()).norm() < 1e-12 * h.norm());
        let x = DVector::from_fn(l.n, |i, _| C64::new((i as f64).sin(), (2.0 * i as f64).cos()));
        assert!((l.apply(&x) - &h * &x).norm() < 1e-10 * h.norm());
    }

    #[test]
    fn shifted_factor_inverts_the_hamiltonian() {
        let mat = MaterialParams::gaas();
        let mesh = build_mesh(9, 7, (20.0, 15.0), Stretch::Tanh { wx: 15.0, wy: 10.0 }).unwrap();
        let l = Lattice::new(&mesh, &Parabola(0.02), &mat, 4.0, (3.0, -1.0));
        let extra: Vec<f64> = (0..l.n).map(|i| 0.1 * i as f64).collect();
        let ch = l.shifted_cholesky(&extra, -1.0).unwrap();
        let b = DVector::from_fn(l.n, |i, _| C64::new(1.0, i as f64));
        let x = ch.solve(&b);
        let hx = l.apply(&x) + DVector::from_fn(l.n, |i, _| x[i] * (extra[i] + 1.0));
        assert!((hx - &b).norm() < 1e-9 * b.norm());
        assert!(l.shifted_cholesky(&extra, 1e6).is_none());
    }

    #[test]
    fn gauge_shift_is_a_lattice_gauge_transform() {
        let mat = MaterialParams::gaas();
        let mesh = build_mesh(12, 10, (25.0, 20.0), Stretch::Tanh { wx: 20.0, wy: 15.0 }).unwrap();
        let a = lowest(&Lattice::new(&mesh, &Parabola(0.03), &mat, 5.0, (0.0, 0.0)), 4);
        let b = lowest(&Lattice::new(&mesh, &Parabola(0.03), &mat, 5.0, (10.0, 0.0)), 4);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn kernel_is_symmetric_and_self_term_is_finite() {
        let mat = MaterialParams::gaas();
        let mesh = build_mesh(6, 4, (12.0, 8.0), Stretch::Uniform).unwrap();
        let v = coulomb_kernel(&mesh, &mat);
        assert_eq!(v, v.transpose());
        // square cell of side h: (2/h)·2 asinh(1) · C
        let h = mesh.dx[0];
        assert_eq!(h, mesh.dy[0]);
        let expect = mat.scales().coulomb * 4.0 * 1f64.asinh() / h;
        assert!((v[(0, 0)] - expect).abs() < 1e-12 * expect);
        assert!(v[(0, 0)] > v[(0, 1)]);
    }
}
