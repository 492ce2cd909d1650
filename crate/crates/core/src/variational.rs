//! Variational tuning of the fitting parabolas at zero field.

use crate::basis::{dot_orbitals, length_scales};
use crate::error::{Error, Result};
use crate::integrals::{coulomb_tensor, one_body_matrix, CoulombOptions, PairIntegrable, ScaledTwoBody};
use crate::model::{fit_parabola_at_minima, ConfinementPotential, MaterialParams};
use crate::mo_solver::{assemble, build_two_electron_basis, solve_generalized, FittingWells, Sector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationalOptions {
    /// Half-widths of the search box (meV, nm).
    pub max_delta_parabolicity: f64,
    pub max_delta_location: f64,
    /// Stop when the simplex values span less than this (meV).
    pub tol: f64,
    pub max_evals: usize,
    /// Starting offsets (δE, δa).
    pub start: (f64, f64),
    /// Initial simplex edge lengths (meV, nm).
    pub step: (f64, f64),
    pub coulomb: CoulombOptions,
    pub coulomb_scale: f64,
}

impl Default for VariationalOptions {
    fn default() -> Self {
        VariationalOptions {
            max_delta_parabolicity: 6.0,
            max_delta_location: 5.0,
            tol: 1e-4,
            max_evals: 400,
            start: (0.0, 0.0),
            step: (1.0, 1.0),
            coulomb: CoulombOptions::default(),
            coulomb_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariationalFit {
    pub base: FittingWells,
    pub delta_parabolicity: f64,
    pub delta_location: f64,
    /// Lowest Hund-Mulliken singlet at the optimum, meV.
    pub ground_energy: f64,
    /// Same objective at the unshifted base wells.
    pub base_energy: f64,
    pub n_evals: usize,
    /// Best objective value after each simplex iteration.
    pub history: Vec<f64>,
}

impl VariationalFit {
    pub fn actual_parabolicity(&self) -> f64 {
        self.base.hbar_omega0 + self.delta_parabolicity
    }

    pub fn actual_location(&self) -> f64 {
        self.base.x0 + self.delta_location
    }

    pub fn wells(&self) -> FittingWells {
        FittingWells { hbar_omega0: self.actual_parabolicity(), x0: self.actual_location() }
    }
}

/// Lowest zero-field Hund-Mulliken singlet for the given wells.
pub fn hund_mulliken_singlet(pot: &dyn PairIntegrable, mat: &MaterialParams, wells: FittingWells, coulomb: &CoulombOptions, coulomb_scale: f64) -> Result<f64> {
    if !(wells.hbar_omega0 > 0.0) || !(wells.x0 > 0.0) {
        return Err(Error::InvalidInput("fitting wells need positive parabolicity and separation".into()));
    }
    let ls = length_scales(0.0, wells.hbar_omega0, mat);
    let orbitals = dot_orbitals(wells.x0, false, &ls);
    let ob = one_body_matrix(&orbitals, pot, mat)?;
    let t = coulomb_tensor(&orbitals, mat, coulomb)?;
    let states = build_two_electron_basis(2, None, Sector::Singlet);
    let (h, s) = assemble(&states, &ob, &ScaledTwoBody { inner: &t, scale: coulomb_scale });
    let (e, _) = solve_generalized(&h, &s)?;
    Ok(e[0])
}

/// Bounded Nelder-Mead minimization in two dimensions. Points outside the box
/// are projected onto it.
pub(crate) struct NelderMead {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    pub tol: f64,
    pub max_evals: usize,
}

pub(crate) struct NmResult {
    pub x: [f64; 2],
    pub f: f64,
    pub evals: usize,
    pub history: Vec<f64>,
    pub converged: bool,
}

impl NelderMead {
    fn project(&self, x: [f64; 2]) -> [f64; 2] {
        [x[0].clamp(self.lo[0], self.hi[0]), x[1].clamp(self.lo[1], self.hi[1])]
    }

    pub fn minimize<F: FnMut([f64; 2]) -> Result<f64>>(&self, mut f: F, start: [f64; 2], step: [f64; 2]) -> Result<NmResult> {
        let mut evals = 0;
        let mut eval = |x: [f64; 2], evals: &mut usize| -> Result<f64> {
            *evals += 1;
            f(x)
        };
        let p0 = self.project(start);
        let mut p1 = self.project([p0[0] + step[0], p0[1]]);
        if p1 == p0 {
            p1 = self.project([p0[0] - step[0], p0[1]]);
        }
        let mut p2 = self.project([p0[0], p0[1] + step[1]]);
        if p2 == p0 {
            p2 = self.project([p0[0], p0[1] - step[1]]);
        }
        let mut s: Vec<([f64; 2], f64)> = Vec::with_capacity(3);
        for p in [p0, p1, p2] {
            let v = eval(p, &mut evals)?;
            s.push((p, v));
        }
        let mut history = Vec::new();
        let comb = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
        loop {
            s.sort_by(|a, b| a.1.total_cmp(&b.1));
            history.push(s[0].1);
            if s[2].1 - s[0].1 <= self.tol {
                return Ok(NmResult { x: s[0].0, f: s[0].1, evals, history, converged: true });
            }
            if evals >= self.max_evals {
                return Ok(NmResult { x: s[0].0, f: s[0].1, evals, history, converged: false });
            }
            let c = [(s[0].0[0] + s[1].0[0]) * 0.5, (s[0].0[1] + s[1].0[1]) * 0.5];
            let worst = s[2];
            let xr = self.project(comb(c, worst.0, -1.0));
            let fr = eval(xr, &mut evals)?;
            if fr < s[0].1 {
                let xe = self.project(comb(c, worst.0, -2.0));
                let fe = eval(xe, &mut evals)?;
                s[2] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < s[1].1 {
                s[2] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < worst.1 {
                let x = self.project(comb(c, worst.0, -0.5));
                (x, eval(x, &mut evals)?)
            } else {
                let x = self.project(comb(c, worst.0, 0.5));
                (x, eval(x, &mut evals)?)
            };
            if fc < worst.1.min(fr) {
                s[2] = (xc, fc);
                continue;
            }
            // shrink toward the best vertex
            let best = s[0].0;
            for v in s.iter_mut().skip(1) {
                let x = comb(best, v.0, 0.5);
                *v = (x, eval(x, &mut evals)?);
            }
        }
    }
}

/// Optimize (δE, δa) around `base` for an arbitrary confinement.
pub fn optimize_wells(pot: &dyn PairIntegrable, mat: &MaterialParams, base: FittingWells, opts: &VariationalOptions) -> Result<VariationalFit> {
    let lo_e = (-opts.max_delta_parabolicity).max(1e-3 - base.hbar_omega0);
    let lo_a = (-opts.max_delta_location).max(1e-3 - base.x0);
    let nm = NelderMead {
        lo: [lo_e, lo_a],
        hi: [opts.max_delta_parabolicity, opts.max_delta_location],
        tol: opts.tol,
        max_evals: opts.max_evals,
    };
    let objective = |d: [f64; 2]| {
        let w = FittingWells { hbar_omega0: base.hbar_omega0 + d[0], x0: base.x0 + d[1] };
        hund_mulliken_singlet(pot, mat, w, &opts.coulomb, opts.coulomb_scale)
    };
    let base_energy = objective([0.0, 0.0])?;
    let r = nm.minimize(objective, [opts.start.0, opts.start.1], [opts.step.0, opts.step.1])?;
    if !r.converged {
        return Err(Error::OptimizerDidNotConverge(r.evals));
    }
    // the base point itself is always a candidate
    let (x, f) = if r.f <= base_energy { (r.x, r.f) } else { ([0.0, 0.0], base_energy) };
    Ok(VariationalFit {
        base,
        delta_parabolicity: x[0],
        delta_location: x[1],
        ground_energy: f,
        base_energy,
        n_evals: r.evals + 1,
        history: r.history,
    })
}

/// Zero-field optimization starting from the harmonic fit of `pot`.
pub fn optimize_fitting_wells(pot: &ConfinementPotential, mat: &MaterialParams, opts: &VariationalOptions) -> Result<VariationalFit> {
    let fit = fit_parabola_at_minima(pot, mat)?;
    optimize_wells(pot, mat, FittingWells { hbar_omega0: fit.hbar_omega0, x0: fit.x_min }, opts)
}
