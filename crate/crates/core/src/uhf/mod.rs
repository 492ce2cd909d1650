//! Unrestricted Hartree-Fock for two electrons on a stretched real-space mesh.

mod band;
mod davidson;
mod lattice;
mod mesh;

pub use band::BandCholesky;
pub use davidson::{diagonal_preconditioner, lowest_eigenpairs, DavidsonOptions};
pub use lattice::{coulomb_kernel, Lattice};
pub use mesh::{build_mesh, Mesh, Stretch, MAX_NODES};

use crate::error::{Error, Result};
use crate::model::{zeeman_splitting, ConfinementPotential, FieldConfig, MaterialParams, Potential2d};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinConfig {
    /// Both electrons spin up (S_z = 1).
    Parallel,
    /// One up, one down (S_z = 0).
    Opposite,
}

impl SpinConfig {
    fn occupations(self) -> (usize, usize) {
        match self {
            SpinConfig::Parallel => (2, 0),
            SpinConfig::Opposite => (1, 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UhfOptions {
    /// Weight of the new density matrix in each update.
    pub mixing: f64,
    /// Energy change (meV) accepted as converged.
    pub energy_tol: f64,
    /// Frobenius change of the density matrices accepted as converged.
    pub density_tol: f64,
    pub max_iter: usize,
    /// Multiplies the Coulomb kernel; 0 gives independent electrons.
    pub coulomb_scale: f64,
    /// Origin of the symmetric gauge (nm).
    pub gauge_center: (f64, f64),
    /// Force both opposite-spin electrons into one spatial orbital. Test use only.
    pub restricted: bool,
    pub eigensolver: DavidsonOptions,
}

impl Default for UhfOptions {
    fn default() -> Self {
        UhfOptions {
            mixing: 0.3,
            energy_tol: 1e-6,
            density_tol: 1e-4,
            max_iter: 200,
            coulomb_scale: 1.0,
            gauge_center: (0.0, 0.0),
            restricted: false,
            eigensolver: DavidsonOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UhfState {
    /// Occupied spin-up orbitals ψ on the mesh nodes, ∫|ψ|² = 1.
    pub orbitals_up: Vec<DVector<C64>>,
    pub orbitals_down: Vec<DVector<C64>>,
    /// Fock eigenvalues of the occupied orbitals, up then down (meV).
    pub orbital_energies: Vec<f64>,
    /// Includes the Zeeman energy when the field asks for it (meV).
    pub total_energy: f64,
    pub spin_config: SpinConfig,
    pub converged: bool,
    pub iterations: usize,
    /// Energy after each Fock diagonalisation.
    pub energy_history: Vec<f64>,
    /// Energy never rose by more than 1e-9 meV after the third iteration.
    pub monotone: bool,
    /// ⟨S²⟩ of the determinant.
    pub spin_squared: f64,
}

impl UhfState {
    /// `Err(ScfNotConverged)` unless the run converged.
    pub fn check(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            let h = &self.energy_history;
            let delta = if h.len() > 1 { (h[h.len() - 1] - h[h.len() - 2]).abs() } else { f64::INFINITY };
            Err(Error::ScfNotConverged { iterations: self.iterations, delta })
        }
    }
}

/// Mesh covering both dots: box of a + 5 l0 by 5 l0, tanh-stretched so that
/// 90% of the x nodes lie within a + 2 l0 and 80% of the y nodes within 2 l0,
/// l0 being the oscillator length of one well.
pub fn double_dot_mesh(pot: &ConfinementPotential, mat: &MaterialParams, nx: usize, ny: usize) -> Result<Mesh> {
    let l0 = mat.oscillator_length(pot.well_parabolicity(mat)?);
    build_mesh(
        nx,
        ny,
        (pot.a + 5.0 * l0, 5.0 * l0),
        Stretch::Core { half_x: pot.a + 2.0 * l0, half_y: 2.0 * l0, fraction_x: 0.9, fraction_y: 0.8 },
    )
}

fn density_matrix(orbs: &[DVector<C64>], n: usize) -> DMatrix<C64> {
    let mut g = DMatrix::zeros(n, n);
    for u in orbs {
        g.ger(C64::new(1.0, 0.0), u, &u.conjugate(), C64::new(1.0, 0.0));
    }
    g
}

struct Problem<'a> {
    lattice: &'a Lattice,
    h0: DMatrix<C64>,
    v: DMatrix<f64>,
}

impl Problem<'_> {
    /// Hartree potential of the density n (electrons per cell).
    fn hartree(&self, density: &[f64]) -> Vec<f64> {
        (&self.v * DVector::from_column_slice(density)).iter().copied().collect()
    }

    /// H0 + J[n_total] − v ⊙ Γσ
    fn fock(&self, hartree: &[f64], gamma_same: &DMatrix<C64>) -> DMatrix<C64> {
        let n = self.lattice.n;
        let mut f = self.h0.clone();
        for b in 0..n {
            for a in 0..n {
                f[(a, b)] -= gamma_same[(a, b)] * self.v[(a, b)];
            }
            f[(b, b)] += hartree[b];
        }
        f
    }

    /// E = Σσ Tr(h Γσ) + ½ Σ v n n − ½ Σσ Σ v |Γσ|², for idempotent Γσ.
    fn energy(&self, up: &[DVector<C64>], down: &[DVector<C64>]) -> f64 {
        let n = self.lattice.n;
        let mut e = 0.0;
        let mut dens = vec![0.0; n];
        for u in up.iter().chain(down) {
            e += u.dotc(&self.lattice.apply(u)).re;
            for (d, x) in dens.iter_mut().zip(u.iter()) {
                *d += x.norm_sqr();
            }
        }
        let nd = DVector::from_vec(dens);
        e += 0.5 * nd.dot(&(&self.v * &nd));
        for set in [up, down] {
            if set.is_empty() {
                continue;
            }
            let g = density_matrix(set, n);
            let mut ex = 0.0;
            for b in 0..n {
                for a in 0..n {
                    ex += self.v[(a, b)] * g[(a, b)].norm_sqr();
                }
            }
            e -= 0.5 * ex;
        }
        e
    }
}

fn diag_re(m: &DMatrix<C64>) -> Vec<f64> {
    (0..m.nrows()).map(|i| m[(i, i)].re).collect()
}

/// Factor of H0 + extra − σ with σ a little below `floor`, a lower bound on
/// its spectrum; used as a shift-and-invert preconditioner.
fn preconditioner(lattice: &Lattice, extra: &[f64], floor: f64) -> BandCholesky {
    let mut margin = 1.0;
    loop {
        if let Some(c) = lattice.shifted_cholesky(extra, floor - margin) {
            return c;
        }
        margin *= 4.0;
    }
}

/// Left/right localised combinations of two orthonormal orbitals.
fn localise(e0: &DVector<C64>, e1: &DVector<C64>, mesh: &Mesh) -> (DVector<C64>, DVector<C64>) {
    let nodes = mesh.nodes();
    // choose the relative phase so that e0 + e1 sits on the left
    let c = e0.iter().zip(e1.iter()).zip(&nodes).filter(|(_, p)| p.0 < 0.0).map(|((a, b), _)| a.conj() * b).sum::<C64>();
    let phase = if c.norm() > 1e-12 { c.conj() / c.norm() } else { C64::new(1.0, 0.0) };
    let e1p = e1 * phase.conj();
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    ((e0 + &e1p) * s, (e0 - &e1p) * s)
}

/// Lowest two single-particle states and their left/right localised combinations.
fn initial_guess(lattice: &Lattice, mesh: &Mesh, opts: &UhfOptions) -> Result<(f64, [DVector<C64>; 4])> {
    // the kinetic term is positive, so min V bounds the spectrum from below
    let vmin = lattice.potential.iter().copied().fold(f64::INFINITY, f64::min);
    let zero = vec![0.0; lattice.n];
    let pre = preconditioner(lattice, &zero, vmin);
    let (vals, vecs) = lowest_eigenpairs(|x| lattice.apply(x), |r, _| pre.solve(r), &lattice.diag, 2, &[], &opts.eigensolver)?;
    let (e0, e1) = (vecs[0].clone(), vecs[1].clone());
    let (left, right) = localise(&e0, &e1, mesh);
    Ok((vals[0], [e0, e1, left, right]))
}

/// Self-consistent UHF (or, with `opts.restricted`, RHF) ground state of the
/// given spin configuration.
///
/// Returns the last iterate with `converged = false` when the iteration
/// budget runs out; see [`UhfState::check`].
pub fn scf<P: Potential2d + ?Sized>(
    pot: &P,
    mat: &MaterialParams,
    field: &FieldConfig,
    spin: SpinConfig,
    mesh: &Mesh,
    opts: &UhfOptions,
) -> Result<UhfState> {
    if !(opts.mixing > 0.0 && opts.mixing <= 1.0) {
        return Err(Error::InvalidInput("mixing must lie in (0, 1]".into()));
    }
    if opts.restricted && spin == SpinConfig::Parallel {
        return Err(Error::InvalidInput("restricted mode applies to opposite spins only".into()));
    }
    let lattice = Lattice::new(mesh, pot, mat, field.b, opts.gauge_center);
    let n = lattice.n;
    let v = coulomb_kernel(mesh, mat) * opts.coulomb_scale;
    let problem = Problem { lattice: &lattice, h0: lattice.to_dense(), v };

    let (e_lowest, [e0, e1, left, right]) = initial_guess(&lattice, mesh, opts)?;
    let mut floor = e_lowest;
    let (n_up, n_dn) = spin.occupations();
    let (mut up, mut down) = match (spin, opts.restricted) {
        (SpinConfig::Parallel, _) => (vec![e0, e1], vec![]),
        (SpinConfig::Opposite, false) => (vec![left], vec![right]),
        (SpinConfig::Opposite, true) => (vec![e0.clone()], vec![e0]),
    };
    let mut g_up = density_matrix(&up, n);
    let mut g_dn = density_matrix(&down, n);
    let mut history = Vec::new();
    let mut orbital_energies = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let zero = DMatrix::<C64>::zeros(0, 0);

    for it in 0..opts.max_iter {
        iterations = it + 1;
        let total: Vec<f64> = (0..n).map(|i| g_up[(i, i)].re + if n_dn > 0 { g_dn[(i, i)].re } else { 0.0 }).collect();
        let hartree = problem.hartree(&total);
        // H0 + J ≥ F, so the lowest orbital energy is a good floor
        let pre = preconditioner(&lattice, &hartree, floor);
        let f_up = problem.fock(&hartree, &g_up);
        let (eu, new_up) = lowest_eigenpairs(|x| &f_up * x, |r, _| pre.solve(r), &diag_re(&f_up), n_up, &up, &opts.eigensolver)?;
        let (ed, new_dn) = if n_dn == 0 {
            (vec![], vec![])
        } else if opts.restricted {
            (eu.clone(), new_up.clone())
        } else {
            let f_dn = problem.fock(&hartree, &g_dn);
            lowest_eigenpairs(|x| &f_dn * x, |r, _| pre.solve(r), &diag_re(&f_dn), n_dn, &down, &opts.eigensolver)?
        };
        up = new_up;
        down = new_dn;
        orbital_energies = eu.into_iter().chain(ed).collect();
        floor = orbital_energies.iter().copied().fold(f64::INFINITY, f64::min);
        let energy = problem.energy(&up, &down);
        let new_g_up = density_matrix(&up, n);
        let new_g_dn = if n_dn > 0 { density_matrix(&down, n) } else { zero.clone() };
        let change = (&new_g_up - &g_up).norm() + if n_dn > 0 { (&new_g_dn - &g_dn).norm() } else { 0.0 };
        let de = history.last().map_or(f64::INFINITY, |&last: &f64| (energy - last).abs());
        history.push(energy);
        log::debug!("scf {spin:?} iter {iterations}: E = {energy:.9} meV, dE = {de:.3e}, dP = {change:.3e}");
        if de < opts.energy_tol && change < opts.density_tol {
            converged = true;
            break;
        }
        let a = C64::new(opts.mixing, 0.0);
        let b = C64::new(1.0 - opts.mixing, 0.0);
        g_up = &g_up * b + new_g_up * a;
        if n_dn > 0 {
            g_dn = &g_dn * b + new_g_dn * a;
        }
    }

    let monotone = history.windows(2).skip(3).all(|w| w[1] <= w[0] + 1e-9);
    let spin_squared = match spin {
        SpinConfig::Parallel => 2.0,
        SpinConfig::Opposite => 1.0 - up[0].dotc(&down[0]).norm_sqr(),
    };
    let mut total_energy = *history.last().unwrap_or(&f64::NAN);
    if field.include_zeeman && spin == SpinConfig::Parallel {
        total_energy -= zeeman_splitting(mat, field.b);
    }
    Ok(UhfState {
        orbitals_up: up.iter().map(|u| lattice.to_wavefunction(u)).collect(),
        orbitals_down: down.iter().map(|u| lattice.to_wavefunction(u)).collect(),
        orbital_energies,
        total_energy,
        spin_config: spin,
        converged,
        iterations,
        energy_history: history,
        monotone,
        spin_squared,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct UhfSplitting {
    pub b: f64,
    pub opposite: UhfState,
    pub parallel: UhfState,
    /// E(parallel) − E(opposite), meV.
    pub j: f64,
}

/// Parallel/opposite-spin splitting; both runs must converge.
pub fn uhf_splitting<P: Potential2d + ?Sized>(pot: &P, mat: &MaterialParams, field: &FieldConfig, mesh: &Mesh, opts: &UhfOptions) -> Result<UhfSplitting> {
    let opposite = scf(pot, mat, field, SpinConfig::Opposite, mesh, opts)?.check()?;
    let parallel = scf(pot, mat, field, SpinConfig::Parallel, mesh, &UhfOptions { restricted: false, ..*opts })?.check()?;
    let j = parallel.total_energy - opposite.total_energy;
    Ok(UhfSplitting { b: field.b, opposite, parallel, j })
}

/// [`uhf_splitting`] over a field grid, points in parallel.
pub fn uhf_field_sweep<P: Potential2d + ?Sized>(pot: &P, mat: &MaterialParams, b_grid: &[f64], mesh: &Mesh, opts: &UhfOptions) -> Vec<Result<UhfSplitting>> {
    b_grid
        .par_iter()
        .map(|&b| uhf_splitting(pot, mat, &FieldConfig::new(b), mesh, opts))
        .collect()
}
