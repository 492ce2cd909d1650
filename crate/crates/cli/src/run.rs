//! Sweep execution and CSV output.
//!
//! Points are computed on the rayon pool and written by a single collector
//! in grid order (distance, then Vb, then B), so files are byte-identical
//! across runs and thread counts.

use anyhow::{Context, Result};
use dqdot::analysis::{adiabatic_lower_bound, heitler_london_j, phase_noise, swap_time, zeeman_phase_mismatch};
use dqdot::basis::Orbital;
use dqdot::integrals::{canonical_quadruple, coulomb_oracle_mc, one_body_matrix, CoulombTensor};
use dqdot::model::{calibrate_well_depth, effective_barrier, fit_parabola_at_minima};
use dqdot::mo_solver::{solve_with_integrals, BasisLevel, FittingWells, MoConfig, SpectrumResult};
use dqdot::uhf::{double_dot_mesh, scf, SpinConfig, UhfOptions, UhfState};
use dqdot::variational::{optimize_fitting_wells, VariationalFit, VariationalOptions};
use dqdot::{ConfinementPotential, FieldConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

use crate::cache::CoulombCache;
use crate::config::{RunConfig, Solver, Task};

/// Some sweep points failed; the rows that succeeded were still written.
#[derive(Debug, Error)]
#[error("{failed} of {total} points failed, first at {first_point}: {first_error}")]
pub struct NumericalFailure {
    pub failed: usize,
    pub total: usize,
    pub first_point: String,
    pub first_error: String,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub files: Vec<PathBuf>,
    pub rows: usize,
    pub cache_hits: usize,
}

/// One (distance, Vb) combination with its confinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setting {
    pub distance: f64,
    pub vb: f64,
    pub pot: ConfinementPotential,
}

impl Setting {
    fn label(&self) -> String {
        format!("distance={} Vb={}", self.distance, self.vb)
    }
}

fn interpolate(anchors: &[(f64, f64)], x: f64) -> f64 {
    let first = anchors[0];
    let last = anchors[anchors.len() - 1];
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    let k = anchors.windows(2).position(|w| x <= w[1].0).unwrap();
    let (a, b) = (anchors[k], anchors[k + 1]);
    a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
}

/// V0 at each calibration anchor for inter-dot distance `distance`.
pub fn anchor_depths(cfg: &RunConfig, distance: f64) -> dqdot::Result<Vec<(f64, f64)>> {
    cfg.calibration
        .iter()
        .map(|&(vb, target)| {
            let tpl = ConfinementPotential { a: 0.5 * distance, vb, ..cfg.potential };
            Ok((vb, calibrate_well_depth(&tpl, target)?.v0))
        })
        .collect()
}

/// Confinement for one grid point: the configured shape at half-distance
/// `distance/2` and barrier `vb`, with V0 from the calibration anchors when
/// there are any.
pub fn potential_for(cfg: &RunConfig, distance: f64, vb: f64) -> dqdot::Result<ConfinementPotential> {
    let mut pot = ConfinementPotential { a: 0.5 * distance, vb, ..cfg.potential };
    if !cfg.calibration.is_empty() {
        pot.v0 = interpolate(&anchor_depths(cfg, distance)?, vb);
    }
    Ok(pot)
}

/// Fitting wells used as the orbital basis.
pub fn fitting_wells(cfg: &RunConfig, pot: &ConfinementPotential) -> dqdot::Result<FittingWells> {
    if cfg.variational {
        Ok(optimize_fitting_wells(pot, &cfg.material, &VariationalOptions::default())?.wells())
    } else {
        let f = fit_parabola_at_minima(pot, &cfg.material)?;
        Ok(FittingWells { hbar_omega0: f.hbar_omega0, x0: f.x_min })
    }
}

fn settings(cfg: &RunConfig) -> Vec<dqdot::Result<Setting>> {
    let mut out = Vec::new();
    for &distance in &cfg.distance_grid {
        let anchors = if cfg.calibration.is_empty() { Ok(Vec::new()) } else { anchor_depths(cfg, distance) };
        for &vb in &cfg.vb_grid {
            out.push(anchors.clone().map(|a| {
                let mut pot = ConfinementPotential { a: 0.5 * distance, vb, ..cfg.potential };
                if !a.is_empty() {
                    pot.v0 = interpolate(&a, vb);
                }
                Setting { distance, vb, pot }
            }));
        }
    }
    out
}

/// Shortest round-trip decimal, never in exponent form.
pub fn num(x: f64) -> String {
    format!("{x}")
}

fn axes_label(cfg: &RunConfig, with_b: bool) -> String {
    let mut parts = Vec::new();
    if cfg.distance_grid.len() > 1 {
        parts.push("distance");
    }
    if cfg.vb_grid.len() > 1 {
        parts.push("vb");
    }
    if with_b && cfg.b_grid.len() > 1 {
        parts.push("b");
    }
    if parts.is_empty() {
        "point".into()
    } else {
        parts.join("_")
    }
}

type Row = Vec<String>;

/// Writes header and rows; rows that failed are skipped and reported.
fn write_table(path: &Path, header: &[String], rows: &[std::result::Result<Vec<Row>, (String, String)>]) -> Result<(usize, Vec<(String, String)>)> {
    let mut w = csv::WriterBuilder::new().from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    let mut n = 0;
    let mut failures = Vec::new();
    for r in rows {
        match r {
            Ok(rs) => {
                for row in rs {
                    w.write_record(row)?;
                    n += 1;
                }
            }
            Err(e) => failures.push(e.clone()),
        }
    }
    w.flush()?;
    Ok((n, failures))
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    cache: CoulombCache,
    summary: Summary,
    failures: Vec<(String, String)>,
    total: usize,
}

impl Ctx<'_> {
    fn emit(&mut self, name: &str, header: Vec<String>, rows: Vec<std::result::Result<Vec<Row>, (String, String)>>) -> Result<()> {
        let path = self.cfg.output.join(name);
        self.total += rows.len();
        let (n, f) = write_table(&path, &header, &rows)?;
        self.summary.rows += n;
        self.summary.files.push(path);
        self.failures.extend(f);
        Ok(())
    }
}

fn mo_config(cfg: &RunConfig, pot: ConfinementPotential, wells: FittingWells, basis: BasisLevel, b: f64) -> MoConfig {
    let mut c = MoConfig::new(pot, wells, basis, b);
    c.mat = cfg.material;
    c.field.include_zeeman = cfg.include_zeeman;
    c.gauge_center = cfg.gauge_center;
    c
}

fn solve_mo(ctx_cache: &CoulombCache, c: &MoConfig) -> dqdot::Result<(SpectrumResult, CoulombTensor, Vec<Orbital>, bool)> {
    let orbitals = c.orbitals();
    let ob = one_body_matrix(&orbitals, &c.pot, &c.mat)?;
    let (t, hit) = ctx_cache
        .tensor(&orbitals, &c.mat, &c.coulomb)
        .map_err(|e| match e.downcast::<dqdot::Error>() {
            Ok(d) => d,
            Err(e) => dqdot::Error::InvalidInput(e.to_string()),
        })?;
    let r = solve_with_integrals(c, &ob, &t)?;
    Ok((r, t, orbitals, hit))
}

fn bases(cfg: &RunConfig) -> Vec<BasisLevel> {
    if cfg.compare_basis {
        vec![BasisLevel::HundMulliken, BasisLevel::SP]
    } else {
        vec![cfg.basis_level]
    }
}

fn n_levels(basis: BasisLevel) -> usize {
    // singlets n(n+1)/2 plus triplets n(n-1)/2
    let n = match basis {
        BasisLevel::HundMulliken => 2,
        BasisLevel::SP => 6,
    };
    n * n
}

/// Basis for each setting, computed once and shared by its field points.
fn prepare(cfg: &RunConfig) -> Vec<dqdot::Result<(Setting, FittingWells)>> {
    settings(cfg)
        .into_par_iter()
        .map(|s| {
            let s = s?;
            let w = fitting_wells(cfg, &s.pot)?;
            Ok((s, w))
        })
        .collect()
}

fn run_mo(ctx: &mut Ctx<'_>) -> Result<()> {
    let cfg = ctx.cfg;
    let prepared = prepare(cfg);
    let bases = bases(cfg);
    let width = bases.iter().map(|&b| n_levels(b)).max().unwrap();
    let mut header: Vec<String> = ["B_T", "Vb_meV", "distance_nm"].iter().map(|s| s.to_string()).collect();
    header.extend((1..=width).map(|k| format!("E{k}_meV")));
    header.extend(
        ["J_meV", "P_double", "basis_level", "barrier_meV", "V0_meV", "hbar_omega0_meV", "x0_nm", "gap_meV"].iter().map(|s| s.to_string()),
    );

    let jobs: Vec<(usize, f64)> = (0..prepared.len()).flat_map(|i| cfg.b_grid.iter().map(move |&b| (i, b))).collect();
    let cache = &ctx.cache;
    let results: Vec<(std::result::Result<Vec<Row>, (String, String)>, usize, Vec<Row>)> = jobs
        .par_iter()
        .enumerate()
        .map(|(job_index, &(i, b))| {
            let label = |s: &Setting| format!("{} B={b}", s.label());
            let (s, w) = match &prepared[i] {
                Ok(v) => *v,
                Err(e) => {
                    let d = cfg.distance_grid[i / cfg.vb_grid.len()];
                    let vb = cfg.vb_grid[i % cfg.vb_grid.len()];
                    return (Err((format!("distance={d} Vb={vb} B={b}"), e.to_string())), 0, Vec::new());
                }
            };
            let barrier = effective_barrier(&s.pot).map(num).unwrap_or_default();
            let mut rows = Vec::new();
            let mut hits = 0;
            let mut mc_rows = Vec::new();
            for &basis in &bases {
                let c = mo_config(cfg, s.pot, w, basis, b);
                match solve_mo(cache, &c) {
                    Ok((r, t, orbitals, hit)) => {
                        hits += hit as usize;
                        let mut row = vec![num(b), num(s.vb), num(s.distance)];
                        let e = r.energies();
                        row.extend((0..width).map(|k| e.get(k).map(|&x| num(x)).unwrap_or_default()));
                        row.push(num(r.j));
                        row.push(num(r.double_occupation));
                        row.push(basis.label().to_string());
                        row.push(barrier.clone());
                        row.push(num(s.pot.v0));
                        row.push(num(w.hbar_omega0));
                        row.push(num(w.x0));
                        row.push(r.low_pair_gap().map(num).unwrap_or_default());
                        rows.push(row);
                        if cfg.mc_samples > 0 {
                            let seed = cfg.seed ^ (job_index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ basis as u64;
                            mc_rows.extend(mc_spot_check(cfg, &t, &orbitals, seed, b, &s, basis));
                        }
                    }
                    Err(e) => return (Err((format!("{} basis={}", label(&s), basis.label()), e.to_string())), hits, mc_rows),
                }
            }
            (Ok(rows), hits, mc_rows)
        })
        .collect();
    ctx.summary.cache_hits += results.iter().map(|r| r.1).sum::<usize>();
    let mc: Vec<Row> = results.iter().flat_map(|r| r.2.clone()).collect();
    let rows = results.into_iter().map(|r| r.0).collect();
    ctx.emit(&format!("mo_{}.csv", axes_label(cfg, true)), header, rows)?;
    if cfg.mc_samples > 0 {
        let header = ["B_T", "Vb_meV", "distance_nm", "basis_level", "i", "j", "k", "l", "exact_re", "exact_im", "mc_re", "mc_im", "std_err", "within_3_sigma"];
        ctx.emit("mc_check.csv", header.iter().map(|s| s.to_string()).collect(), vec![Ok(mc)])?;
    }
    Ok(())
}

const MC_ELEMENTS: usize = 4;

fn mc_spot_check(cfg: &RunConfig, t: &CoulombTensor, orbitals: &[Orbital], seed: u64, b: f64, s: &Setting, basis: BasisLevel) -> Vec<Row> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = orbitals.len();
    let dense = t.to_dense();
    let mut rows = Vec::new();
    for _ in 0..MC_ELEMENTS {
        let q = [rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n)];
        let (q, _) = canonical_quadruple(q);
        use dqdot::integrals::TwoBody;
        let exact = dense.element(q[0], q[1], q[2], q[3]);
        let est = coulomb_oracle_mc(&orbitals[q[0]], &orbitals[q[1]], &orbitals[q[2]], &orbitals[q[3]], &cfg.material, cfg.mc_samples, &mut rng);
        rows.push(vec![
            num(b),
            num(s.vb),
            num(s.distance),
            basis.label().to_string(),
            q[0].to_string(),
            q[1].to_string(),
            q[2].to_string(),
            q[3].to_string(),
            num(exact.re),
            num(exact.im),
            num(est.value.re),
            num(est.value.im),
            num(est.std_error()),
            est.agrees_with(exact, 3.0).to_string(),
        ]);
    }
    rows
}

fn uhf_options(cfg: &RunConfig) -> UhfOptions {
    UhfOptions {
        mixing: cfg.uhf.mixing,
        energy_tol: cfg.uhf.energy_tol,
        max_iter: cfg.uhf.max_iter,
        gauge_center: cfg.gauge_center,
        ..UhfOptions::default()
    }
}

fn run_uhf(ctx: &mut Ctx<'_>) -> Result<()> {
    let cfg = ctx.cfg;
    let opts = uhf_options(cfg);
    let sets = settings(cfg);
    let jobs: Vec<(usize, f64)> = (0..sets.len()).flat_map(|i| cfg.b_grid.iter().map(move |&b| (i, b))).collect();
    let header = [
        "B_T",
        "E_opposite_meV",
        "E_parallel_meV",
        "J_uhf_meV",
        "iters_opposite",
        "iters_parallel",
        "converged_opposite",
        "converged_parallel",
        "Vb_meV",
        "distance_nm",
        "S2_opposite",
    ];
    let rows = jobs
        .par_iter()
        .map(|&(i, b)| {
            let s = sets[i].clone().map_err(|e| (format!("setting {i} B={b}"), e.to_string()))?;
            let label = format!("{} B={b}", s.label());
            let fail = |e: dqdot::Error| (label.clone(), e.to_string());
            let mesh = double_dot_mesh(&s.pot, &cfg.material, cfg.uhf.nx, cfg.uhf.ny).map_err(fail)?;
            let field = FieldConfig { b, include_zeeman: cfg.include_zeeman };
            let run = |spin| scf(&s.pot, &cfg.material, &field, spin, &mesh, &opts);
            let o: UhfState = run(SpinConfig::Opposite).map_err(fail)?;
            let p: UhfState = run(SpinConfig::Parallel).map_err(fail)?;
            let row = vec![
                num(b),
                num(o.total_energy),
                num(p.total_energy),
                num(p.total_energy - o.total_energy),
                o.iterations.to_string(),
                p.iterations.to_string(),
                o.converged.to_string(),
                p.converged.to_string(),
                num(s.vb),
                num(s.distance),
                num(o.spin_squared),
            ];
            Ok(vec![row])
        })
        .collect::<Vec<_>>();
    // a row whose SCF did not converge is kept but counts as a failure
    let unconverged: Vec<(String, String)> = rows
        .iter()
        .filter_map(|r| r.as_ref().ok())
        .flatten()
        .filter(|row| row[6] != "true" || row[7] != "true")
        .map(|row| (format!("distance={} Vb={} B={}", row[9], row[8], row[0]), "SCF did not converge".to_string()))
        .collect();
    ctx.emit(&format!("uhf_{}.csv", axes_label(cfg, true)), header.iter().map(|s| s.to_string()).collect(), rows)?;
    ctx.failures.extend(unconverged);
    Ok(())
}

fn run_hl(ctx: &mut Ctx<'_>) -> Result<()> {
    let cfg = ctx.cfg;
    let prepared = prepare(cfg);
    let jobs: Vec<(usize, f64)> = (0..prepared.len()).flat_map(|i| cfg.b_grid.iter().map(move |&b| (i, b))).collect();
    let header = ["B_T", "Vb_meV", "distance_nm", "J_hl_meV", "J_r_meV", "J_c_meV", "overlap_abs"];
    let rows = jobs
        .par_iter()
        .map(|&(i, b)| {
            let (s, w) = *prepared[i].as_ref().map_err(|e| (format!("setting {i} B={b}"), e.to_string()))?;
            let field = FieldConfig { b, include_zeeman: cfg.include_zeeman };
            let d = heitler_london_j(&s.pot, &cfg.material, &field, w).map_err(|e| (format!("{} B={b}", s.label()), e.to_string()))?;
            Ok(vec![vec![num(b), num(s.vb), num(s.distance), num(d.j_total), num(d.j_r), num(d.j_c), num(d.s_lr.norm())]])
        })
        .collect();
    ctx.emit(&format!("hl_{}.csv", axes_label(cfg, true)), header.iter().map(|s| s.to_string()).collect(), rows)
}

fn run_variational(ctx: &mut Ctx<'_>) -> Result<()> {
    let cfg = ctx.cfg;
    let header = [
        "distance_nm",
        "Vb_meV",
        "barrier_meV",
        "V0_meV",
        "base_hbar_omega_meV",
        "base_location_nm",
        "delta_parabolicity_meV",
        "delta_location_nm",
        "actual_parabolicity_meV",
        "actual_location_nm",
        "E_singlet_meV",
        "evaluations",
    ];
    let rows = settings(cfg)
        .into_par_iter()
        .map(|s| {
            let s = s.map_err(|e| ("calibration".to_string(), e.to_string()))?;
            let fail = |e: dqdot::Error| (s.label(), e.to_string());
            let fit: VariationalFit = optimize_fitting_wells(&s.pot, &cfg.material, &VariationalOptions::default()).map_err(fail)?;
            let barrier = effective_barrier(&s.pot).map_err(fail)?;
            Ok(vec![vec![
                num(s.distance),
                num(s.vb),
                num(barrier),
                num(s.pot.v0),
                num(fit.base.hbar_omega0),
                num(fit.base.x0),
                num(fit.delta_parabolicity),
                num(fit.delta_location),
                num(fit.actual_parabolicity()),
                num(fit.actual_location()),
                num(fit.ground_energy),
                fit.n_evals.to_string(),
            ]])
        })
        .collect();
    ctx.emit(&format!("variational_{}.csv", axes_label(cfg, false)), header.iter().map(|s| s.to_string()).collect(), rows)
}

fn run_calibrate(ctx: &mut Ctx<'_>) -> Result<()> {
    let cfg = ctx.cfg;
    let header = ["distance_nm", "Vb_meV", "target_barrier_meV", "V0_meV", "barrier_meV"];
    let mut rows = Vec::new();
    for &d in &cfg.distance_grid {
        if cfg.calibration.is_empty() {
            for &vb in &cfg.vb_grid {
                let pot = ConfinementPotential { a: 0.5 * d, vb, ..cfg.potential };
                rows.push(
                    effective_barrier(&pot)
                        .map(|e| vec![vec![num(d), num(vb), String::new(), num(pot.v0), num(e)]])
                        .map_err(|e| (format!("distance={d} Vb={vb}"), e.to_string())),
                );
            }
        } else {
            for &(vb, target) in &cfg.calibration {
                let tpl = ConfinementPotential { a: 0.5 * d, vb, ..cfg.potential };
                let r = calibrate_well_depth(&tpl, target)
                    .and_then(|p| Ok(vec![vec![num(d), num(vb), num(target), num(p.v0), num(effective_barrier(&p)?)]]))
                    .map_err(|e| (format!("distance={d} Vb={vb}"), e.to_string()));
                rows.push(r);
            }
        }
    }
    ctx.emit("calibration.csv", header.iter().map(|s| s.to_string()).collect(), rows)
}

fn run_analyze(ctx: &mut Ctx<'_>) -> Result<()> {
    let cfg = ctx.cfg;
    let prepared = prepare(cfg);
    let jobs: Vec<(usize, f64)> = (0..prepared.len()).flat_map(|i| cfg.b_grid.iter().map(move |&b| (i, b))).collect();
    let header = [
        "B_T",
        "Vb_meV",
        "distance_nm",
        "J_meV",
        "gap_meV",
        "adiabatic_bound_ps",
        "swap_raw_ps",
        "swap_padded_ps",
        "zeeman_mismatch",
        "phase_var_rate_per_s",
        "phase_variance",
    ];
    let a = &cfg.analysis;
    let cache = &ctx.cache;
    let rows = jobs
        .par_iter()
        .map(|&(i, b)| {
            let (s, w) = *prepared[i].as_ref().map_err(|e| (format!("setting {i} B={b}"), e.to_string()))?;
            let fail = |e: dqdot::Error| (format!("{} B={b}", s.label()), e.to_string());
            let c = mo_config(cfg, s.pot, w, cfg.basis_level, b);
            let (r, ..) = solve_mo(cache, &c).map_err(fail)?;
            let gap = r.low_pair_gap().ok_or_else(|| fail(dqdot::Error::InvalidInput("spectrum too small for a gap".into())))?;
            let bound = adiabatic_lower_bound(gap).map_err(fail)?;
            let swap = swap_time(r.j).map_err(fail)?;
            let zeeman = if a.delta_b != 0.0 && r.j > 0.0 { num(zeeman_phase_mismatch(r.j, a.delta_b, &cfg.material).map_err(fail)?) } else { String::new() };
            let noise = phase_noise(a.resistance_ohm, a.temperature_k, a.alpha, swap.padded_ps * 1e-12).map_err(fail)?;
            Ok(vec![vec![
                num(b),
                num(s.vb),
                num(s.distance),
                num(r.j),
                num(gap),
                num(bound),
                num(swap.raw_ps),
                num(swap.padded_ps),
                zeeman,
                num(noise.phase_var_rate),
                num(noise.phase_var),
            ]])
        })
        .collect();
    ctx.emit(&format!("analysis_{}.csv", axes_label(cfg, true)), header.iter().map(|s| s.to_string()).collect(), rows)
}

/// Runs `task` and writes its CSV files under `cfg.output`.
///
/// Numerical failures at individual points do not stop the sweep; the
/// remaining rows are written and a [`NumericalFailure`] is returned.
pub fn run(cfg: &RunConfig, task: Task) -> Result<Summary> {
    fs::create_dir_all(&cfg.output).with_context(|| format!("creating output directory {}", cfg.output.display()))?;
    let mut ctx = Ctx { cfg, cache: CoulombCache::new(cfg.cache_dir.as_deref())?, summary: Summary::default(), failures: Vec::new(), total: 0 };
    match task {
        Task::Solve => match cfg.solver {
            Solver::Mo => run_mo(&mut ctx)?,
            Solver::Uhf => run_uhf(&mut ctx)?,
            Solver::Hl => run_hl(&mut ctx)?,
        },
        Task::Variational => run_variational(&mut ctx)?,
        Task::Calibrate => run_calibrate(&mut ctx)?,
        Task::Analyze => run_analyze(&mut ctx)?,
    }
    if let Some((point, err)) = ctx.failures.first().cloned() {
        return Err(NumericalFailure { failed: ctx.failures.len(), total: ctx.total, first_point: point, first_error: err, files: ctx.summary.files }.into());
    }
    Ok(ctx.summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_is_piecewise_linear_and_clamped() {
        let a = [(10.0, -1.0), (20.0, -3.0), (30.0, -2.0)];
        assert_eq!(interpolate(&a, 5.0), -1.0);
        assert_eq!(interpolate(&a, 15.0), -2.0);
        assert_eq!(interpolate(&a, 25.0), -2.5);
        assert_eq!(interpolate(&a, 20.0), -3.0);
        assert_eq!(interpolate(&a, 99.0), -2.0);
        assert_eq!(interpolate(&[(1.0, 4.0)], 7.0), 4.0);
    }

    #[test]
    fn anchors_reproduce_their_barriers() {
        let cfg = RunConfig { calibration: vec![(20.0, 3.38), (30.0, 9.61)], ..RunConfig::default() };
        for (vb, target) in [(20.0, 3.38), (30.0, 9.61)] {
            let p = potential_for(&cfg, 30.0, vb).unwrap();
            assert!((effective_barrier(&p).unwrap() - target).abs() < 1e-6);
        }
    }

    #[test]
    fn numbers_print_in_plain_decimal() {
        assert_eq!(num(0.1), "0.1");
        assert_eq!(num(1e-7), "0.0000001");
        assert_eq!(num(-2.5), "-2.5");
    }
}
