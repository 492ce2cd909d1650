use crate::basis::{pair_density, Orbital};
use crate::error::{Error, Result};
use crate::gaussian::{PairDensity, Poly};
use crate::model::{ConfinementPotential, MaterialParams, Potential2d};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// A potential whose matrix element against a pair density can be computed.
pub trait PairIntegrable: Sync {
    /// ∫ ρ(r) V(r) d²r
    fn pair_integral(&self, rho: &PairDensity) -> Result<C64>;
}

impl PairIntegrable for ConfinementPotential {
    fn pair_integral(&self, rho: &PairDensity) -> Result<C64> {
        let (gx, gy) = (1.0 / (self.lx * self.lx), 1.0 / (self.ly * self.ly));
        let wells = rho.integrate_gaussian(gx, self.a, gy) + rho.integrate_gaussian(gx, -self.a, gy);
        let barrier = rho.integrate_gaussian(1.0 / (self.lbx * self.lbx), 0.0, 1.0 / (self.lby * self.lby));
        Ok(wells * self.v0 + barrier * self.vb)
    }
}

/// Any [`Potential2d`] integrated numerically with a refined trapezoid rule
/// on a box centred at the pair-density centre.
pub struct GridPotential<'a, P: Potential2d + ?Sized> {
    pub pot: &'a P,
    /// Box half-width in units of the Gaussian width 1/√β.
    pub half_width: f64,
    pub rtol: f64,
    /// Absolute floor on the accepted change, for densities that are negligible anyway.
    pub atol: f64,
}

impl<'a, P: Potential2d + ?Sized> GridPotential<'a, P> {
    pub fn new(pot: &'a P) -> Self {
        GridPotential { pot, half_width: 9.0, rtol: 1e-9, atol: 0.0 }
    }

    fn rule(&self, rho: &PairDensity, n: usize) -> C64 {
        let w = self.half_width / rho.beta.sqrt();
        let h = 2.0 * w / n as f64;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..=n {
            let x = rho.xc - w + i as f64 * h;
            let fx = if i == 0 || i == n { 0.5 } else { 1.0 };
            for j in 0..=n {
                let y = -w + j as f64 * h;
                let fy = if j == 0 || j == n { 0.5 } else { 1.0 };
                acc += rho.eval(x, y) * (fx * fy * self.pot.value(x, y));
            }
        }
        acc * h * h
    }
}

impl<'a, P: Potential2d + ?Sized> PairIntegrable for GridPotential<'a, P> {
    fn pair_integral(&self, rho: &PairDensity) -> Result<C64> {
        let mut n = 64;
        let mut last = self.rule(rho, n);
        let mut change = f64::INFINITY;
        for _ in 0..5 {
            n *= 2;
            let next = self.rule(rho, n);
            change = (next - last).norm();
            let scale = next.norm().max(rho.pref * std::f64::consts::PI / rho.beta);
            if change <= self.rtol * scale + self.atol {
                return Ok(next);
            }
            last = next;
        }
        Err(Error::QuadratureNotConverged { what: "one-body potential".into(), change })
    }
}

/// ⟨φᵢ| Π²/2m* + V |φⱼ⟩.
///
/// The kinetic part acts analytically: φⱼ is an eigenfunction of its own
/// parabola, so ⟨φᵢ|h|φⱼ⟩ = εⱼ Sᵢⱼ + ⟨φᵢ|V − V_par,j|φⱼ⟩. The field enters
/// through the orbitals' magnetic length.
pub fn one_body_element(oi: &Orbital, oj: &Orbital, pot: &dyn PairIntegrable, mat: &MaterialParams) -> Result<C64> {
    let rho = pair_density(oi, oj);
    let s = rho.integrate();
    let v = pot.pair_integral(&rho)?;
    let kappa = oj.hbar_omega0 * oj.hbar_omega0 / (2.0 * mat.scales().kinetic);
    let t = rho.xc - oj.center;
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let dx = Poly::linear(C64::new(t, 0.0), one, zero);
    let dy = Poly::linear(zero, zero, one);
    let r2 = dx.mul(&dx).add(&dy.mul(&dy));
    let vpar = rho.times(&r2).integrate() * kappa;
    Ok(s * oj.own_energy() + v - vpar)
}

/// One-body Hamiltonian and overlap matrices over an orbital list.
#[derive(Debug, Clone, PartialEq)]
pub struct OneBodyMatrix {
    pub h: DMatrix<C64>,
    pub s: DMatrix<C64>,
}

impl OneBodyMatrix {
    /// Change of basis χ_p = Σ_a U_ap φ_a.
    pub fn transform(&self, u: &DMatrix<C64>) -> OneBodyMatrix {
        let ud = u.adjoint();
        OneBodyMatrix { h: &ud * &self.h * u, s: &ud * &self.s * u }
    }
}

pub fn one_body_matrix(orbitals: &[Orbital], pot: &dyn PairIntegrable, mat: &MaterialParams) -> Result<OneBodyMatrix> {
    let n = orbitals.len();
    let mut h = DMatrix::zeros(n, n);
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] = one_body_element(&orbitals[i], &orbitals[j], pot, mat)?;
            s[(i, j)] = pair_density(&orbitals[i], &orbitals[j]).integrate();
        }
    }
    Ok(OneBodyMatrix { h, s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{dot_orbitals, eval_orbital, length_scales, Orbital, Shell};
    use crate::model::evaluate_potential;

    /// ½ m* ω0² |r − R|² for a single well.
    struct Parabola {
        k: f64,
        x0: f64,
    }

    impl Potential2d for Parabola {
        fn value(&self, x: f64, y: f64) -> f64 {
            0.5 * self.k * ((x - self.x0).powi(2) + y * y)
        }
        fn slope_x(&self, x: f64, _y: f64) -> f64 {
            self.k * (x - self.x0)
        }
        fn curvature(&self, _x: f64, _y: f64) -> (f64, f64) {
            (self.k, self.k)
        }
    }

    fn parabola_for(mat: &MaterialParams, hw0: f64, x0: f64) -> Parabola {
        Parabola { k: hw0 * hw0 / mat.scales().kinetic, x0 }
    }

    #[test]
    fn oscillator_levels_in_their_own_well() {
        let mat = MaterialParams::gaas();
        let hw0 = 7.5;
        let ls = length_scales(0.0, hw0, &mat);
        let par = parabola_for(&mat, hw0, 10.0);
        let grid = GridPotential::new(&par);
        let s = Orbital::new(10.0, Shell::S, &ls);
        let p = Orbital::new(10.0, Shell::PPlus, &ls);
        let es = one_body_element(&s, &s, &grid, &mat).unwrap();
        let ep = one_body_element(&p, &p, &grid, &mat).unwrap();
        assert!((es.re - hw0).abs() < 1e-7 && es.im.abs() < 1e-9);
        assert!((ep.re - 2.0 * hw0).abs() < 1e-7);
    }

    /// Peierls finite-difference Hamiltonian applied to sampled orbitals on a
    /// uniform grid, with the symmetric gauge centred at `oj.gauge_center`.
    fn fd_element(oi: &Orbital, oj: &Orbital, pot: &ConfinementPotential, mat: &MaterialParams, half: f64, n: usize) -> C64 {
        let h = 2.0 * half / n as f64;
        let k = mat.scales().kinetic / 2.0;
        let inv_lb2 = if oj.lb.is_infinite() { 0.0 } else { 1.0 / (oj.lb * oj.lb) };
        let (xg, yg) = oj.gauge_center;
        let coord = |i: usize| -half + i as f64 * h;
        let f = |i: usize, j: usize| eval_orbital(oj, coord(i), coord(j));
        let mut acc = C64::new(0.0, 0.0);
        for i in 1..n {
            let x = coord(i);
            for j in 1..n {
                let y = coord(j);
                // link phase exp(−i ∫ a·dl), a = (1/2lB²)(−(y − y_g), x − x_g)
                let ax = -0.5 * (y - yg) * inv_lb2 * h;
                let ay = 0.5 * (x - xg) * inv_lb2 * h;
                let c = f(i, j);
                let lap = f(i + 1, j) * C64::from_polar(1.0, -ax)
                    + f(i - 1, j) * C64::from_polar(1.0, ax)
                    + f(i, j + 1) * C64::from_polar(1.0, -ay)
                    + f(i, j - 1) * C64::from_polar(1.0, ay)
                    - c * 4.0;
                let hpsi = -lap * (k / (h * h)) + c * evaluate_potential(pot, x, y);
                acc += eval_orbital(oi, x, y).conj() * hpsi;
            }
        }
        acc * h * h
    }

    #[test]
    fn closed_form_agrees_with_finite_difference_hamiltonian() {
        let mat = MaterialParams::gaas();
        let pot = ConfinementPotential { vb: 30.0, ..Default::default() };
        for b in [0.0, 3.0] {
            let ls = length_scales(b, 10.0, &mat);
            let orbs = dot_orbitals(14.0, true, &ls);
            for &(i, j) in &[(0usize, 0usize), (0, 1), (2, 2), (3, 0), (4, 5)] {
                let exact = one_body_element(&orbs[i], &orbs[j], &pot, &mat).unwrap();
                let fd = fd_element(&orbs[i], &orbs[j], &pot, &mat, 80.0, 400);
                // second-order error with h = 0.4 nm
                assert!((exact - fd).norm() < 2e-2, "B={b} ({i},{j}): {exact} vs {fd}");
            }
        }
    }

    #[test]
    fn shifted_gauge_origin_leaves_elements_unchanged() {
        let mat = MaterialParams::gaas();
        let pot = ConfinementPotential { vb: 25.0, ..Default::default() };
        let ls = length_scales(4.0, 10.0, &mat);
        let orbs: Vec<Orbital> = dot_orbitals(14.0, true, &ls).into_iter().map(|o| o.with_gauge_center((10.0, -3.0))).collect();
        for &(i, j) in &[(0usize, 0usize), (0, 1), (2, 3), (5, 0)] {
            let exact = one_body_element(&orbs[i], &orbs[j], &pot, &mat).unwrap();
            let fd = fd_element(&orbs[i], &orbs[j], &pot, &mat, 80.0, 400);
            assert!((exact - fd).norm() < 2e-2, "({i},{j}): {exact} vs {fd}");
        }
    }

    #[test]
    fn gaussian_potential_closed_form_matches_quadrature() {
        let mat = MaterialParams::gaas();
        let pot = ConfinementPotential { vb: 25.0, ..Default::default() };
        let grid = GridPotential::new(&pot);
        let ls = length_scales(5.0, 9.0, &mat);
        let orbs = dot_orbitals(15.0, true, &ls);
        for i in 0..orbs.len() {
            for j in 0..orbs.len() {
                let rho = pair_density(&orbs[i], &orbs[j]);
                let a = pot.pair_integral(&rho).unwrap();
                let b = grid.pair_integral(&rho).unwrap();
                assert!((a - b).norm() < 1e-8, "({i},{j}) {a} {b}");
            }
        }
    }

    #[test]
    fn matrices_are_hermitian_and_real_at_zero_field() {
        let mat = MaterialParams::gaas();
        let pot = ConfinementPotential::default();
        for b in [0.0, 6.0] {
            let ls = length_scales(b, 9.0, &mat);
            let m = one_body_matrix(&dot_orbitals(15.0, true, &ls), &pot, &mat).unwrap();
            let scale = m.h.iter().map(|v| v.norm()).fold(0.0, f64::max);
            assert!((&m.h - m.h.adjoint()).iter().all(|v| v.norm() < 1e-10 * scale));
            assert!((&m.s - m.s.adjoint()).iter().all(|v| v.norm() < 1e-14));
            if b == 0.0 {
                assert!(m.h.iter().all(|v| v.im.abs() < 1e-10 * scale));
            }
            let eig = nalgebra::SymmetricEigen::new(m.s.clone());
            assert!(eig.eigenvalues.iter().all(|&e| e > 0.0));
        }
    }

    #[test]
    fn grid_quadrature_reports_failure() {
        struct Step;
        impl Potential2d for Step {
            // a step defeats the trapezoid rule's spectral accuracy
            fn value(&self, x: f64, _y: f64) -> f64 {
                if x > 0.1234 {
                    1e3
                } else {
                    0.0
                }
            }
            fn slope_x(&self, _: f64, _: f64) -> f64 {
                0.0
            }
            fn curvature(&self, _: f64, _: f64) -> (f64, f64) {
                (0.0, 0.0)
            }
        }
        let mat = MaterialParams::gaas();
        let ls = length_scales(0.0, 9.0, &mat);
        let o = Orbital::new(0.0, Shell::S, &ls);
        let r = one_body_element(&o, &o, &GridPotential::new(&Step), &mat);
        assert!(matches!(r, Err(Error::QuadratureNotConverged { .. })), "{r:?}");
    }
}
