//! Fock-Darwin s and p orbitals centred on the two dots, and their
//! inversion-symmetric combinations.

use crate::error::{Error, Result};
use crate::gaussian::{PairDensity, Poly};
use crate::model::{magnetic_length, MaterialParams};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Characteristic lengths and energies of a parabolic well in a field.
///
/// Frequencies are carried as energies ħω in meV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthScales {
    /// Effective oscillator length sqrt(ħ/(m*Ω)), nm.
    pub l0: f64,
    /// Magnetic length, nm; infinite at zero field.
    pub lb: f64,
    pub hbar_omega_c: f64,
    pub hbar_omega0: f64,
}

impl LengthScales {
    /// ħΩ = sqrt((ħω₀)² + (ħω_c)²/4).
    pub fn hbar_omega(&self) -> f64 {
        (self.hbar_omega0 * self.hbar_omega0 + 0.25 * self.hbar_omega_c * self.hbar_omega_c).sqrt()
    }
}

pub fn length_scales(b: f64, hbar_omega0: f64, mat: &MaterialParams) -> LengthScales {
    let sc = mat.scales();
    let hbar_omega_c = sc.cyclotron_per_tesla * b.abs();
    let big = (hbar_omega0 * hbar_omega0 + 0.25 * hbar_omega_c * hbar_omega_c).sqrt();
    LengthScales { l0: (sc.kinetic / big).sqrt(), lb: magnetic_length(b), hbar_omega_c, hbar_omega0 }
}

/// Angular momentum of a lowest-Landau-like Fock-Darwin orbital.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Shell {
    S,
    /// m = +1, polynomial (x − X) + i y
    PPlus,
    /// m = −1, polynomial (x − X) − i y
    PMinus,
}

impl Shell {
    pub fn m(self) -> i32 {
        match self {
            Shell::S => 0,
            Shell::PPlus => 1,
            Shell::PMinus => -1,
        }
    }
}

/// A Fock-Darwin orbital
/// `N · P_m(x − X, y) · exp(−((x − X)² + y²)/(2 l0²)) · exp(i X y / (2 lB²))`.
///
/// The phase makes it an eigenfunction of the symmetric-gauge Hamiltonian
/// with gauge origin at 0 for a parabola centred at X. Moving the gauge
/// origin to `gauge_center` multiplies every orbital by the same
/// exp(i (y_g x − x_g y)/(2 lB²)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orbital {
    pub center: f64,
    /// Radial quantum number; always 0 here.
    pub n: u32,
    pub shell: Shell,
    pub l0: f64,
    pub lb: f64,
    pub hbar_omega0: f64,
    pub hbar_omega_c: f64,
    /// Origin (x, y) of the symmetric gauge in nm.
    pub gauge_center: (f64, f64),
}

impl Orbital {
    pub fn new(center: f64, shell: Shell, ls: &LengthScales) -> Self {
        Orbital {
            center,
            n: 0,
            shell,
            l0: ls.l0,
            lb: ls.lb,
            hbar_omega0: ls.hbar_omega0,
            hbar_omega_c: ls.hbar_omega_c,
            gauge_center: (0.0, 0.0),
        }
    }

    pub fn with_gauge_center(mut self, center: (f64, f64)) -> Self {
        self.gauge_center = center;
        self
    }

    pub fn m(&self) -> i32 {
        self.shell.m()
    }

    /// Wave number of the gauge phase, X/(2 lB²).
    pub fn phase_k(&self) -> f64 {
        if self.lb.is_infinite() {
            0.0
        } else {
            self.center / (2.0 * self.lb * self.lb)
        }
    }

    pub fn norm_const(&self) -> f64 {
        match self.shell {
            Shell::S => 1.0 / (PI.sqrt() * self.l0),
            _ => 1.0 / (PI.sqrt() * self.l0 * self.l0),
        }
    }

    /// Eigenvalue of the orbital in its own parabolic well (meV):
    /// (|m| + 1) ħΩ − m ħω_c/2.
    pub fn own_energy(&self) -> f64 {
        let big = (self.hbar_omega0 * self.hbar_omega0 + 0.25 * self.hbar_omega_c * self.hbar_omega_c).sqrt();
        let m = self.m();
        (m.abs() as f64 + 1.0) * big - m as f64 * 0.5 * self.hbar_omega_c
    }

    /// Polynomial prefactor in (x − X, y) as coefficients (c0, cx, cy).
    fn poly_coeffs(&self) -> (C64, C64, C64) {
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        match self.shell {
            Shell::S => (one, z, z),
            Shell::PPlus => (z, one, C64::new(0.0, 1.0)),
            Shell::PMinus => (z, one, C64::new(0.0, -1.0)),
        }
    }

    fn compatible(&self, other: &Orbital) -> bool {
        let same_len = |a: f64, b: f64| (a == b) || ((a - b).abs() <= 1e-12 * a.abs().max(b.abs()));
        same_len(self.l0, other.l0)
            && (same_len(self.lb, other.lb) || (self.lb.is_infinite() && other.lb.is_infinite()))
            && self.gauge_center == other.gauge_center
    }
}

pub fn eval_orbital(orb: &Orbital, x: f64, y: f64) -> C64 {
    let u = x - orb.center;
    let (c0, cx, cy) = orb.poly_coeffs();
    let p = c0 + cx * u + cy * y;
    let g = (-(u * u + y * y) / (2.0 * orb.l0 * orb.l0)).exp();
    let (xg, yg) = orb.gauge_center;
    let shift = if orb.lb.is_infinite() { 0.0 } else { (yg * x - xg * y) / (2.0 * orb.lb * orb.lb) };
    p * C64::from_polar(orb.norm_const() * g, orb.phase_k() * y + shift)
}

/// φᵢ* φₖ as a closed-form Gaussian product. Both must share l0 and lB.
pub fn pair_density(oi: &Orbital, ok: &Orbital) -> PairDensity {
    debug_assert!(oi.compatible(ok), "orbitals with different length scales");
    let d = ok.center - oi.center;
    let l02 = oi.l0 * oi.l0;
    // with u = x − xc: x − Xi = u + d/2 and x − Xk = u − d/2
    let (a0, ax, ay) = oi.poly_coeffs();
    let (b0, bx, by) = ok.poly_coeffs();
    let pi = Poly::linear(a0 + ax * (0.5 * d), ax, ay).conj();
    let pk = Poly::linear(b0 - bx * (0.5 * d), bx, by);
    PairDensity {
        pref: oi.norm_const() * ok.norm_const() * (-d * d / (4.0 * l02)).exp(),
        xc: 0.5 * (oi.center + ok.center),
        beta: 1.0 / l02,
        k: ok.phase_k() - oi.phase_k(),
        poly: pi.mul(&pk),
    }
}

/// ⟨orb1|orb2⟩ in closed form.
pub fn overlap(orb1: &Orbital, orb2: &Orbital) -> C64 {
    pair_density(orb1, orb2).integrate()
}

pub fn overlap_matrix(orbitals: &[Orbital]) -> DMatrix<C64> {
    let n = orbitals.len();
    DMatrix::from_fn(n, n, |i, j| overlap(&orbitals[i], &orbitals[j]))
}

/// Orbitals on two centres ±x0: s only, or s with both p orbitals.
///
/// Ordering is sL, sR, p+L, p+R, p−L, p−R so that index 0 is always the
/// left-dot s orbital.
pub fn dot_orbitals(x0: f64, with_p: bool, ls: &LengthScales) -> Vec<Orbital> {
    let mut shells = vec![Shell::S];
    if with_p {
        shells.push(Shell::PPlus);
        shells.push(Shell::PMinus);
    }
    let mut out = Vec::with_capacity(2 * shells.len());
    for s in shells {
        out.push(Orbital::new(-x0, s, ls));
        out.push(Orbital::new(x0, s, ls));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn times(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// A normalized combination (φ_left ± σ φ_right)/N, σ = (−1)^|m|, that is an
/// eigenfunction of the inversion r → −r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParityOrbital {
    pub parity: Parity,
    pub left: usize,
    pub right: usize,
    /// Coefficients on the two source orbitals.
    pub c_left: f64,
    pub c_right: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParityBasis {
    /// Even combinations first, then odd.
    pub combos: Vec<ParityOrbital>,
    /// Column p holds the coefficients of combination p over the source orbitals.
    pub u: DMatrix<C64>,
}

impl ParityBasis {
    pub fn parities(&self) -> Vec<Parity> {
        self.combos.iter().map(|c| c.parity).collect()
    }

    pub fn eval(&self, orbitals: &[Orbital], p: usize, x: f64, y: f64) -> C64 {
        let c = &self.combos[p];
        if c.left == c.right {
            eval_orbital(&orbitals[c.left], x, y) * c.c_left
        } else {
            eval_orbital(&orbitals[c.left], x, y) * c.c_left + eval_orbital(&orbitals[c.right], x, y) * c.c_right
        }
    }
}

/// Build even and odd inversion eigenfunctions from mirror pairs.
///
/// An orbital sitting at the origin is its own partner.
pub fn parity_symmetrize(orbitals: &[Orbital]) -> Result<ParityBasis> {
    let n = orbitals.len();
    let mut used = vec![false; n];
    let mut even = Vec::new();
    let mut odd = Vec::new();
    for i in 0..n {
        if used[i] {
            continue;
        }
        let oi = &orbitals[i];
        let sigma = if oi.m().abs() % 2 == 0 { 1.0 } else { -1.0 };
        if oi.center == 0.0 {
            used[i] = true;
            let p = if sigma > 0.0 { Parity::Even } else { Parity::Odd };
            let combo = ParityOrbital { parity: p, left: i, right: i, c_left: 1.0, c_right: 0.0 };
            if p == Parity::Even { even.push(combo) } else { odd.push(combo) }
            continue;
        }
        let partner = (0..n).find(|&j| {
            !used[j]
                && j != i
                && orbitals[j].shell == oi.shell
                && orbitals[j].compatible(oi)
                && (orbitals[j].center + oi.center).abs() <= 1e-12 * oi.center.abs().max(1.0)
        });
        let j = partner.ok_or(Error::UnpairedOrbital(i))?;
        used[i] = true;
        used[j] = true;
        let (l, r) = if oi.center < 0.0 { (i, j) } else { (j, i) };
        let s = overlap(&orbitals[l], &orbitals[r]).re;
        let ne = (2.0 + 2.0 * sigma * s).sqrt();
        let no = (2.0 - 2.0 * sigma * s).sqrt();
        even.push(ParityOrbital { parity: Parity::Even, left: l, right: r, c_left: 1.0 / ne, c_right: sigma / ne });
        odd.push(ParityOrbital { parity: Parity::Odd, left: l, right: r, c_left: 1.0 / no, c_right: -sigma / no });
    }
    let combos: Vec<ParityOrbital> = even.into_iter().chain(odd).collect();
    let mut u = DMatrix::zeros(n, combos.len());
    for (p, c) in combos.iter().enumerate() {
        u[(c.left, p)] += C64::new(c.c_left, 0.0);
        if c.right != c.left {
            u[(c.right, p)] += C64::new(c.c_right, 0.0);
        }
    }
    Ok(ParityBasis { combos, u })
}
