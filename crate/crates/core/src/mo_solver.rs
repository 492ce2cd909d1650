//! Two-electron configuration interaction over a non-orthogonal orbital set.

use crate::basis::{dot_orbitals, length_scales, parity_symmetrize, Orbital, Parity};
use crate::error::{Error, Result};
use crate::integrals::{coulomb_tensor, one_body_matrix, CoulombOptions, CoulombTensor, OneBodyMatrix, ScaledTwoBody, TwoBody};
use crate::model::{zeeman_splitting, ConfinementPotential, FieldConfig, MaterialParams};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sector {
    Singlet,
    Triplet,
}

/// ψ_ab = c (φ_a(1)φ_b(2) ± φ_b(1)φ_a(2)), + for singlets, with a ≤ b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoElectronState {
    pub orbital_pair: (usize, usize),
    pub sector: Sector,
    pub parity: Option<Parity>,
    /// c = 1/2 for a = b, 1/√2 otherwise.
    pub norm_factor: f64,
}

/// Singlet states use a ≤ b, triplet states a < b. With orbital parities the
/// states are grouped even first, keeping pair order inside each group.
pub fn build_two_electron_basis(n_orbitals: usize, parities: Option<&[Parity]>, sector: Sector) -> Vec<TwoElectronState> {
    let mut out = Vec::new();
    for a in 0..n_orbitals {
        for b in a..n_orbitals {
            if a == b && sector == Sector::Triplet {
                continue;
            }
            out.push(TwoElectronState {
                orbital_pair: (a, b),
                sector,
                parity: parities.map(|p| p[a].times(p[b])),
                norm_factor: if a == b { 0.5 } else { std::f64::consts::FRAC_1_SQRT_2 },
            });
        }
    }
    out.sort_by_key(|s| s.parity);
    out
}

/// ⟨ψ_ab|H|ψ_cd⟩ and ⟨ψ_ab|ψ_cd⟩ for the given states.
pub fn assemble(states: &[TwoElectronState], one_body: &OneBodyMatrix, coulomb: &dyn TwoBody) -> (DMatrix<C64>, DMatrix<C64>) {
    let n = states.len();
    let (h, s) = (&one_body.h, &one_body.s);
    let mut hm = DMatrix::zeros(n, n);
    let mut sm = DMatrix::zeros(n, n);
    for (p, sp) in states.iter().enumerate() {
        for (q, sq) in states.iter().enumerate() {
            if sp.sector != sq.sector {
                continue;
            }
            let sign = if sp.sector == Sector::Singlet { 1.0 } else { -1.0 };
            let (a, b) = sp.orbital_pair;
            let (c, d) = sq.orbital_pair;
            let prod = |c: usize, d: usize| h[(a, c)] * s[(b, d)] + s[(a, c)] * h[(b, d)] + coulomb.element(a, b, c, d);
            let pref = 2.0 * sp.norm_factor * sq.norm_factor;
            hm[(p, q)] = (prod(c, d) + prod(d, c) * sign) * pref;
            sm[(p, q)] = (s[(a, c)] * s[(b, d)] + s[(a, d)] * s[(b, c)] * sign) * pref;
        }
    }
    (hm, sm)
}

fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Eigen-decomposition of S with the singularity check.
fn overlap_eigen(s: &DMatrix<C64>) -> Result<SymmetricEigen<C64, nalgebra::Dyn>> {
    let eig = SymmetricEigen::new(hermitian_part(s));
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min >= 1e-10) {
        return Err(Error::SingularOverlap(min));
    }
    Ok(eig)
}

fn matrix_power(eig: &SymmetricEigen<C64, nalgebra::Dyn>, p: f64) -> DMatrix<C64> {
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::new(l.powf(p), 0.0)));
    v * d * v.adjoint()
}

/// Solve H c = E S c. Returns ascending energies and S-normalized columns.
pub fn solve_generalized(h: &DMatrix<C64>, s: &DMatrix<C64>) -> Result<(Vec<f64>, DMatrix<C64>)> {
    if h.nrows() == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    let x = matrix_power(&overlap_eigen(s)?, -0.5);
    let hp = hermitian_part(&(x.adjoint() * hermitian_part(h) * &x));
    let eig = SymmetricEigen::new(hp);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let c = &x * &eig.eigenvectors;
    let energies = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let cols: Vec<DVector<C64>> = order.iter().map(|&i| c.column(i).into_owned()).collect();
    Ok((energies, DMatrix::from_columns(&cols)))
}

/// One eigenstate of the two-electron problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub energy: f64,
    pub sector: Sector,
    pub parity: Option<Parity>,
    /// Index into [`SpectrumResult::blocks`].
    pub block: usize,
    /// Expansion over the states of that block.
    pub vector: DVector<C64>,
}

/// A symmetry block of the two-electron basis with its matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub sector: Sector,
    pub parity: Option<Parity>,
    pub states: Vec<TwoElectronState>,
    pub h: DMatrix<C64>,
    pub s: DMatrix<C64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub b: f64,
    /// Sorted by energy, then singlet before triplet, then even before odd.
    pub levels: Vec<Level>,
    pub blocks: Vec<Block>,
    /// E(lowest triplet) − E(lowest singlet).
    pub j: f64,
    pub double_occupation: f64,
}

impl SpectrumResult {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    pub fn lowest(&self, sector: Sector) -> Option<&Level> {
        self.levels.iter().find(|l| l.sector == sector)
    }

    /// Distance from the higher of the lowest singlet and lowest triplet to
    /// the next level of either sector.
    pub fn low_pair_gap(&self) -> Option<f64> {
        let is = self.levels.iter().position(|l| l.sector == Sector::Singlet)?;
        let it = self.levels.iter().position(|l| l.sector == Sector::Triplet)?;
        let top = self.levels[is].energy.max(self.levels[it].energy);
        let next = (0..self.levels.len()).find(|&k| k != is && k != it)?;
        Some(self.levels[next].energy - top)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisLevel {
    /// One s orbital per dot.
    HundMulliken,
    /// s and both p orbitals per dot.
    SP,
}

impl BasisLevel {
    pub fn label(self) -> &'static str {
        match self {
            BasisLevel::HundMulliken => "hm",
            BasisLevel::SP => "sp",
        }
    }
}

/// Parabolic wells whose Fock-Darwin states form the basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FittingWells {
    pub hbar_omega0: f64,
    /// Centres sit at ±x0.
    pub x0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoConfig {
    pub pot: ConfinementPotential,
    pub mat: MaterialParams,
    pub field: FieldConfig,
    pub basis: BasisLevel,
    pub wells: FittingWells,
    pub use_parity: bool,
    pub coulomb: CoulombOptions,
    /// Multiplies every Coulomb element; 1 for the physical problem.
    pub coulomb_scale: f64,
    /// Origin of the symmetric gauge (nm).
    pub gauge_center: (f64, f64),
}

impl MoConfig {
    pub fn new(pot: ConfinementPotential, wells: FittingWells, basis: BasisLevel, b: f64) -> Self {
        MoConfig {
            pot,
            mat: MaterialParams::gaas(),
            field: FieldConfig::new(b),
            basis,
            wells,
            use_parity: true,
            coulomb: CoulombOptions::default(),
            coulomb_scale: 1.0,
            gauge_center: (0.0, 0.0),
        }
    }

    pub fn orbitals(&self) -> Vec<Orbital> {
        let ls = length_scales(self.field.b, self.wells.hbar_omega0, &self.mat);
        dot_orbitals(self.wells.x0, self.basis == BasisLevel::SP, &ls)
            .into_iter()
            .map(|o| o.with_gauge_center(self.gauge_center))
            .collect()
    }
}

/// Full spectrum from precomputed integrals over `cfg.orbitals()`.
pub fn solve_with_integrals(cfg: &MoConfig, one_body: &OneBodyMatrix, tensor: &CoulombTensor) -> Result<SpectrumResult> {
    let orbitals = cfg.orbitals();
    let n = orbitals.len();
    if one_body.h.nrows() != n || tensor.n_orbitals() != n {
        return Err(Error::InvalidInput("integrals do not match the orbital basis".into()));
    }
    let dense;
    let transformed;
    let (ob, two, parities, u): (OneBodyMatrix, &dyn TwoBody, Option<Vec<Parity>>, Option<DMatrix<C64>>) = if cfg.use_parity {
        let pb = parity_symmetrize(&orbitals)?;
        dense = tensor.to_dense();
        transformed = dense.transform(&pb.u);
        (one_body.transform(&pb.u), &transformed, Some(pb.parities()), Some(pb.u))
    } else {
        (one_body.clone(), tensor, None, None)
    };
    let scaled = ScaledTwoBody { inner: two, scale: cfg.coulomb_scale };

    let zeeman = if cfg.field.include_zeeman { zeeman_splitting(&cfg.mat, cfg.field.b) } else { 0.0 };
    let mut blocks = Vec::new();
    let mut levels = Vec::new();
    for sector in [Sector::Singlet, Sector::Triplet] {
        let all = build_two_electron_basis(n, parities.as_deref(), sector);
        let groups: Vec<Option<Parity>> = if parities.is_some() { vec![Some(Parity::Even), Some(Parity::Odd)] } else { vec![None] };
        for g in groups {
            let states: Vec<TwoElectronState> = all.iter().filter(|s| s.parity == g).cloned().collect();
            if states.is_empty() {
                continue;
            }
            let (h, s) = assemble(&states, &ob, &scaled);
            let (e, c) = solve_generalized(&h, &s)?;
            let bi = blocks.len();
            for (k, &energy) in e.iter().enumerate() {
                let shift = if sector == Sector::Triplet { -zeeman } else { 0.0 };
                levels.push(Level { energy: energy + shift, sector, parity: g, block: bi, vector: c.column(k).into_owned() });
            }
            blocks.push(Block { sector, parity: g, states, h, s });
        }
    }
    levels.sort_by(|a, b| {
        a.energy.total_cmp(&b.energy).then(a.sector.cmp(&b.sector)).then_with(|| a.parity.cmp(&b.parity)).then(Ordering::Equal)
    });
    let es = levels.iter().find(|l| l.sector == Sector::Singlet).map(|l| l.energy);
    let et = levels.iter().find(|l| l.sector == Sector::Triplet).map(|l| l.energy);
    let j = match (es, et) {
        (Some(s), Some(t)) => t - s,
        _ => f64::NAN,
    };
    let ground = levels.iter().find(|l| l.sector == Sector::Singlet).ok_or_else(|| Error::InvalidInput("no singlet states".into()))?;
    let p = double_occupation(&ground.vector, &blocks[ground.block].states, u.as_ref(), &one_body.s)?;
    Ok(SpectrumResult { b: cfg.field.b, levels, blocks, j, double_occupation: p })
}

/// Integrals for `cfg` followed by the full solve.
pub fn run_mo(cfg: &MoConfig) -> Result<SpectrumResult> {
    let orbitals = cfg.orbitals();
    let ob = one_body_matrix(&orbitals, &cfg.pot, &cfg.mat)?;
    let t = coulomb_tensor(&orbitals, &cfg.mat, &cfg.coulomb)?;
    solve_with_integrals(cfg, &ob, &t)
}

pub fn exchange_coupling(cfg: &MoConfig) -> Result<f64> {
    Ok(run_mo(cfg)?.j)
}

/// Weight of the "both electrons in the left s orbital" configuration in a
/// singlet, after symmetric orthogonalization of the raw singlet basis.
///
/// `vector` expands the state over `states`, whose orbitals are the columns of
/// `u` over the raw orbitals (identity if `None`). `s_raw` is the raw orbital
/// overlap; raw orbital 0 must be the left s orbital.
pub fn double_occupation(vector: &DVector<C64>, states: &[TwoElectronState], u: Option<&DMatrix<C64>>, s_raw: &DMatrix<C64>) -> Result<f64> {
    let n_raw = s_raw.nrows();
    let n_mo = u.map(|u| u.ncols()).unwrap_or(n_raw);
    let mut c = DMatrix::<C64>::zeros(n_mo, n_mo);
    for (st, x) in states.iter().zip(vector.iter()) {
        if st.sector != Sector::Singlet {
            return Err(Error::InvalidInput("double occupation needs a singlet".into()));
        }
        let (a, b) = st.orbital_pair;
        let v = *x * st.norm_factor;
        c[(a, b)] += v;
        c[(b, a)] += v;
    }
    let c_raw = match u {
        Some(u) => u * c * u.transpose(),
        None => c,
    };
    let raw_states = build_two_electron_basis(n_raw, None, Sector::Singlet);
    let coef = DVector::from_iterator(
        raw_states.len(),
        raw_states.iter().map(|st| {
            let (a, b) = st.orbital_pair;
            if a == b {
                c_raw[(a, a)]
            } else {
                c_raw[(a, b)] * std::f64::consts::SQRT_2
            }
        }),
    );
    let s2 = two_electron_overlap(&raw_states, s_raw);
    let half = matrix_power(&overlap_eigen(&s2)?, 0.5);
    let d = half * coef;
    let idx = raw_states.iter().position(|s| s.orbital_pair == (0, 0)).unwrap();
    Ok(d[idx].norm_sqr().clamp(0.0, 1.0))
}

fn two_electron_overlap(states: &[TwoElectronState], s: &DMatrix<C64>) -> DMatrix<C64> {
    let n = states.len();
    DMatrix::from_fn(n, n, |p, q| {
        let (sp, sq) = (&states[p], &states[q]);
        let sign = if sp.sector == Sector::Singlet { 1.0 } else { -1.0 };
        let (a, b) = sp.orbital_pair;
        let (c, d) = sq.orbital_pair;
        (s[(a, c)] * s[(b, d)] + s[(a, d)] * s[(b, c)] * sign) * (2.0 * sp.norm_factor * sq.norm_factor)
    })
}

/// Full spectra on a field grid; points are independent and run in parallel.
pub fn spectrum_scan(cfg: &MoConfig, b_grid: &[f64]) -> Result<Vec<SpectrumResult>> {
    b_grid
        .par_iter()
        .map(|&b| {
            let mut c = *cfg;
            c.field.b = b;
            run_mo(&c)
        })
        .collect()
}
