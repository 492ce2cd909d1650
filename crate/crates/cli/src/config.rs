//! Run configuration: TOML files, presets and command-line overrides.

use dqdot::mo_solver::BasisLevel;
use dqdot::uhf::MAX_NODES;
use dqdot::{ConfinementPotential, MaterialParams};
use serde::Deserialize;
use std::fmt;
use std::path::PathBuf;
use thiserror::Error;

use crate::presets;

/// Problem with a configuration, pointing at the offending line or flag.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ConfigError {
    pub message: String,
    /// 1-based line in the config file.
    pub line: Option<usize>,
    /// Command-line flag the value came from.
    pub flag: Option<String>,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        ConfigError { message: message.into(), line: None, flag: None }
    }

    fn at_line(mut self, line: Option<usize>) -> Self {
        self.line = line;
        self
    }

    fn at_flag(mut self, flag: &str) -> Self {
        self.flag = Some(flag.to_string());
        self
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.line, &self.flag) {
            (Some(l), _) => write!(f, "line {l}: {}", self.message),
            (None, Some(flag)) => write!(f, "flag {flag}: {}", self.message),
            (None, None) => write!(f, "{}", self.message),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Mo,
    Uhf,
    Hl,
}

impl Solver {
    pub fn label(self) -> &'static str {
        match self {
            Solver::Mo => "mo",
            Solver::Uhf => "uhf",
            Solver::Hl => "hl",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "mo" => Some(Solver::Mo),
            "uhf" => Some(Solver::Uhf),
            "hl" => Some(Solver::Hl),
            _ => None,
        }
    }
}

fn parse_basis(s: &str) -> Option<BasisLevel> {
    match s {
        "hm" => Some(BasisLevel::HundMulliken),
        "sp" => Some(BasisLevel::SP),
        _ => None,
    }
}

/// What a `sweep` run produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    /// Run the configured solver over the grids.
    Solve,
    Variational,
    Calibrate,
    Analyze,
}

impl Task {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "solve" => Some(Task::Solve),
            "variational" => Some(Task::Variational),
            "calibrate" => Some(Task::Calibrate),
            "analyze" => Some(Task::Analyze),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UhfSettings {
    pub nx: usize,
    pub ny: usize,
    pub mixing: f64,
    pub max_iter: usize,
    pub energy_tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisSettings {
    pub resistance_ohm: f64,
    pub temperature_k: f64,
    /// Lever arm in eV/V.
    pub alpha: f64,
    /// Field difference between the two dots for the Zeeman phase (T).
    pub delta_b: f64,
}

/// Fully validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    pub potential: ConfinementPotential,
    pub material: MaterialParams,
    pub b_grid: Vec<f64>,
    /// Inter-dot distances 2a (nm).
    pub distance_grid: Vec<f64>,
    pub vb_grid: Vec<f64>,
    /// (Vb, effective barrier) anchors for fixing V0; V0 is interpolated
    /// linearly in Vb between anchors.
    pub calibration: Vec<(f64, f64)>,
    pub basis_level: BasisLevel,
    /// Emit both hm and sp rows for the mo solver.
    pub compare_basis: bool,
    pub solver: Solver,
    /// Optimize the fitting wells at zero field before solving.
    pub variational: bool,
    pub include_zeeman: bool,
    pub gauge_center: (f64, f64),
    pub output: PathBuf,
    pub cache_dir: Option<PathBuf>,
    pub seed: u64,
    /// Monte-Carlo samples per spot-checked Coulomb element (0 disables).
    pub mc_samples: usize,
    pub uhf: UhfSettings,
    pub analysis: AnalysisSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            task: Task::Solve,
            potential: ConfinementPotential::default(),
            material: MaterialParams::gaas(),
            b_grid: (0..=16).map(|k| 0.5 * k as f64).collect(),
            distance_grid: vec![30.0],
            vb_grid: vec![30.0],
            calibration: Vec::new(),
            basis_level: BasisLevel::SP,
            compare_basis: false,
            solver: Solver::Mo,
            variational: true,
            include_zeeman: false,
            gauge_center: (0.0, 0.0),
            output: PathBuf::from("out"),
            cache_dir: None,
            seed: 1,
            mc_samples: 0,
            uhf: UhfSettings { nx: 60, ny: 30, mixing: 0.3, max_iter: 200, energy_tol: 1e-6 },
            analysis: AnalysisSettings { resistance_ohm: 50.0, temperature_k: 1.0, alpha: 0.021, delta_b: 0.0 },
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    task: Option<String>,
    solver: Option<String>,
    basis_level: Option<String>,
    compare_basis: Option<bool>,
    variational: Option<bool>,
    include_zeeman: Option<bool>,
    gauge_center: Option<[f64; 2]>,
    seed: Option<u64>,
    output: Option<PathBuf>,
    cache_dir: Option<PathBuf>,
    mc_samples: Option<usize>,
    b_grid: Option<Vec<f64>>,
    distance_grid: Option<Vec<f64>>,
    vb_grid: Option<Vec<f64>>,
    calibration: Option<Vec<[f64; 2]>>,
    potential: Option<PotentialSection>,
    material: Option<MaterialSection>,
    uhf: Option<UhfSection>,
    analysis: Option<AnalysisSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PotentialSection {
    v0: Option<f64>,
    a: Option<f64>,
    vb: Option<f64>,
    lx: Option<f64>,
    ly: Option<f64>,
    lbx: Option<f64>,
    lby: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialSection {
    effective_mass_ratio: Option<f64>,
    dielectric_const: Option<f64>,
    g_factor: Option<f64>,
    interband_coupling_ep: Option<f64>,
    band_gap_eg: Option<f64>,
    so_splitting_delta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct UhfSection {
    nx: Option<usize>,
    ny: Option<usize>,
    mixing: Option<f64>,
    max_iter: Option<usize>,
    energy_tol: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalysisSection {
    resistance_ohm: Option<f64>,
    temperature_k: Option<f64>,
    alpha: Option<f64>,
    delta_b: Option<f64>,
}

/// Values given on the command line. They win over file and preset values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub solver: Option<String>,
    pub basis_level: Option<String>,
}

/// Where the configuration text came from.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sources<'a> {
    pub preset: Option<&'a str>,
    /// Contents of the --config file.
    pub file: Option<&'a str>,
}

/// A parsed configuration together with the warnings raised on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub config: RunConfig,
    pub warnings: Vec<String>,
}

fn line_of_offset(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

/// Line of `key = ...` inside `[section]` (or the top level when `None`).
fn find_key_line(src: &str, section: Option<&str>, key: &str) -> Option<usize> {
    let mut current: Option<String> = None;
    for (k, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix('[') {
            current = rest.split(']').next().map(|s| s.trim().to_string());
            continue;
        }
        if current.as_deref() != section {
            continue;
        }
        if let Some((lhs, _)) = line.split_once('=') {
            if lhs.trim() == key {
                return Some(k + 1);
            }
        }
    }
    None
}

fn parse_file(src: &str) -> Result<FileConfig, ConfigError> {
    toml::from_str::<FileConfig>(src).map_err(|e| {
        let line = e.span().map(|s| line_of_offset(src, s.start));
        ConfigError::new(e.message().trim().to_string()).at_line(line)
    })
}

/// Layered settings: later layers override earlier ones key by key.
struct Layers<'a> {
    files: Vec<(FileConfig, Option<&'a str>)>,
}

macro_rules! pick {
    ($layers:expr, $($path:tt)+) => {{
        let mut out = None;
        for (f, src) in &$layers.files {
            if let Some(v) = f.$($path)+.clone() {
                out = Some((v, *src));
            }
        }
        out
    }};
}

macro_rules! pick_section {
    ($layers:expr, $sec:ident, $key:ident) => {{
        let mut out = None;
        for (f, src) in &$layers.files {
            if let Some(s) = &f.$sec {
                if let Some(v) = s.$key.clone() {
                    out = Some((v, *src));
                }
            }
        }
        out
    }};
}

fn err_at(src: Option<&str>, section: Option<&str>, key: &str, message: String) -> ConfigError {
    ConfigError::new(message).at_line(src.and_then(|s| find_key_line(s, section, key)))
}

/// Builds and validates a [`RunConfig`] from an optional preset, an optional
/// file and command-line overrides, in increasing precedence.
pub fn parse_config(sources: Sources<'_>, overrides: &Overrides) -> Result<Parsed, ConfigError> {
    let mut layers = Layers { files: Vec::new() };
    if let Some(name) = sources.preset {
        let text = presets::preset_text(name)
            .ok_or_else(|| ConfigError::new(format!("unknown preset `{name}` (known: {})", presets::NAMES.join(", "))).at_flag("--preset"))?;
        // presets are not user files, so their line numbers mean nothing
        layers.files.push((parse_file(text).map_err(|e| ConfigError::new(format!("preset {name}: {e}")))?, None));
    }
    if let Some(text) = sources.file {
        layers.files.push((parse_file(text)?, Some(text)));
    }

    let mut c = RunConfig::default();
    let mut warnings = Vec::new();

    if let Some((t, src)) = pick!(layers, task) {
        c.task = Task::parse(&t).ok_or_else(|| err_at(src, None, "task", format!("unknown task `{t}` (solve, variational, calibrate, analyze)")))?;
    }
    let mut solver_src = None;
    if let Some((s, src)) = pick!(layers, solver) {
        c.solver = Solver::parse(&s).ok_or_else(|| err_at(src, None, "solver", format!("unknown solver `{s}` (mo, uhf, hl)")))?;
        solver_src = Some(src);
    }
    let mut basis_src = None;
    if let Some((b, src)) = pick!(layers, basis_level) {
        c.basis_level = parse_basis(&b).ok_or_else(|| err_at(src, None, "basis_level", format!("unknown basis level `{b}` (hm, sp)")))?;
        basis_src = Some(src);
    }
    if let Some((v, _)) = pick!(layers, compare_basis) {
        c.compare_basis = v;
    }
    if let Some((v, _)) = pick!(layers, variational) {
        c.variational = v;
    }
    if let Some((v, _)) = pick!(layers, include_zeeman) {
        c.include_zeeman = v;
    }
    if let Some((v, _)) = pick!(layers, gauge_center) {
        c.gauge_center = (v[0], v[1]);
    }
    let seed_set = pick!(layers, seed);
    if let Some((v, _)) = seed_set {
        c.seed = v;
    }
    let output_set = pick!(layers, output);
    if let Some((v, _)) = &output_set {
        c.output = v.clone();
    }
    let cache_set = pick!(layers, cache_dir);
    if let Some((v, _)) = &cache_set {
        c.cache_dir = Some(v.clone());
    }
    if let Some((v, _)) = pick!(layers, mc_samples) {
        c.mc_samples = v;
    }

    let grid = |key: &str, v: Option<(Vec<f64>, Option<&str>)>, target: &mut Vec<f64>, min: f64| -> Result<(), ConfigError> {
        if let Some((g, src)) = v {
            if g.is_empty() {
                return Err(err_at(src, None, key, format!("{key} must not be empty")));
            }
            if let Some(x) = g.iter().find(|x| !x.is_finite() || **x < min) {
                return Err(err_at(src, None, key, format!("{key} contains {x}, values must be finite and >= {min}")));
            }
            *target = g;
        }
        Ok(())
    };
    grid("b_grid", pick!(layers, b_grid), &mut c.b_grid, 0.0)?;
    grid("distance_grid", pick!(layers, distance_grid), &mut c.distance_grid, 0.0)?;
    grid("vb_grid", pick!(layers, vb_grid), &mut c.vb_grid, f64::MIN)?;
    if let Some((anchors, src)) = pick!(layers, calibration) {
        for a in &anchors {
            if !(a[1] > 0.0) {
                return Err(err_at(src, None, "calibration", format!("target barrier {} must be positive", a[1])));
            }
        }
        let mut v: Vec<(f64, f64)> = anchors.iter().map(|a| (a[0], a[1])).collect();
        v.sort_by(|x, y| x.0.total_cmp(&y.0));
        if v.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(err_at(src, None, "calibration", "calibration anchors must have distinct Vb".into()));
        }
        c.calibration = v;
    }

    let p = &mut c.potential;
    if let Some((v, _)) = pick_section!(layers, potential, v0) {
        p.v0 = v;
    }
    if let Some((v, _)) = pick_section!(layers, potential, a) {
        p.a = v;
    }
    if let Some((v, _)) = pick_section!(layers, potential, vb) {
        p.vb = v;
    }
    if let Some((v, _)) = pick_section!(layers, potential, lx) {
        p.lx = v;
    }
    if let Some((v, _)) = pick_section!(layers, potential, ly) {
        p.ly = v;
    }
    if let Some((v, _)) = pick_section!(layers, potential, lbx) {
        p.lbx = v;
    }
    if let Some((v, _)) = pick_section!(layers, potential, lby) {
        p.lby = v;
    }
    if let Err(e) = c.potential.validate() {
        return Err(ConfigError::new(format!("[potential]: {e}")));
    }
    let m = &mut c.material;
    if let Some((v, _)) = pick_section!(layers, material, effective_mass_ratio) {
        m.effective_mass_ratio = v;
    }
    if let Some((v, _)) = pick_section!(layers, material, dielectric_const) {
        m.dielectric_const = v;
    }
    if let Some((v, _)) = pick_section!(layers, material, g_factor) {
        m.g_factor = v;
    }
    if let Some((v, _)) = pick_section!(layers, material, interband_coupling_ep) {
        m.interband_coupling_ep = v;
    }
    if let Some((v, _)) = pick_section!(layers, material, band_gap_eg) {
        m.band_gap_eg = v;
    }
    if let Some((v, _)) = pick_section!(layers, material, so_splitting_delta) {
        m.so_splitting_delta = v;
    }
    if let Err(e) = c.material.validate() {
        return Err(ConfigError::new(format!("[material]: {e}")));
    }

    if let Some((v, _)) = pick_section!(layers, uhf, nx) {
        c.uhf.nx = v;
    }
    if let Some((v, _)) = pick_section!(layers, uhf, ny) {
        c.uhf.ny = v;
    }
    if let Some((v, _)) = pick_section!(layers, uhf, mixing) {
        c.uhf.mixing = v;
    }
    if let Some((v, _)) = pick_section!(layers, uhf, max_iter) {
        c.uhf.max_iter = v;
    }
    if let Some((v, _)) = pick_section!(layers, uhf, energy_tol) {
        c.uhf.energy_tol = v;
    }
    let uhf_src = layers.files.iter().rev().find(|(f, _)| f.uhf.is_some()).and_then(|(_, s)| *s);
    if c.uhf.nx < 2 || c.uhf.ny < 2 || c.uhf.nx * c.uhf.ny > MAX_NODES {
        return Err(err_at(uhf_src, Some("uhf"), "nx", format!("mesh {}x{} must have 2..{MAX_NODES} nodes", c.uhf.nx, c.uhf.ny)));
    }
    if !(c.uhf.mixing > 0.0 && c.uhf.mixing <= 1.0) {
        return Err(err_at(uhf_src, Some("uhf"), "mixing", "mixing must lie in (0, 1]".into()));
    }

    if let Some((v, _)) = pick_section!(layers, analysis, resistance_ohm) {
        c.analysis.resistance_ohm = v;
    }
    if let Some((v, _)) = pick_section!(layers, analysis, temperature_k) {
        c.analysis.temperature_k = v;
    }
    if let Some((v, _)) = pick_section!(layers, analysis, alpha) {
        c.analysis.alpha = v;
    }
    if let Some((v, _)) = pick_section!(layers, analysis, delta_b) {
        c.analysis.delta_b = v;
    }

    // command-line flags win
    if let Some(s) = &overrides.solver {
        let solver = Solver::parse(s).ok_or_else(|| ConfigError::new(format!("unknown solver `{s}` (mo, uhf, hl)")).at_flag("--solver"))?;
        if solver_src.is_some() && solver != c.solver {
            warnings.push(format!("--solver {s} overrides solver = \"{}\" from the configuration", c.solver.label()));
        }
        c.solver = solver;
        solver_src = None;
    }
    if let Some(b) = &overrides.basis_level {
        let basis = parse_basis(b).ok_or_else(|| ConfigError::new(format!("unknown basis level `{b}` (hm, sp)")).at_flag("--basis"))?;
        if basis_src.is_some() && basis != c.basis_level {
            warnings.push(format!("--basis {b} overrides basis_level = \"{}\" from the configuration", c.basis_level.label()));
        }
        c.basis_level = basis;
        basis_src = None;
    }
    if let Some(s) = overrides.seed {
        if let Some((v, _)) = seed_set {
            if v != s {
                warnings.push(format!("--seed {s} overrides seed = {v} from the configuration"));
            }
        }
        c.seed = s;
    }
    if let Some(o) = &overrides.output {
        if let Some((v, _)) = &output_set {
            if v != o {
                warnings.push(format!("--out {} overrides output = {:?} from the configuration", o.display(), v.display().to_string()));
            }
        }
        c.output = o.clone();
    }
    if let Some(d) = &overrides.cache_dir {
        if let Some((v, _)) = &cache_set {
            if v != d {
                warnings.push(format!("--cache {} overrides cache_dir = {:?} from the configuration", d.display(), v.display().to_string()));
            }
        }
        c.cache_dir = Some(d.clone());
    }

    if c.solver == Solver::Hl && (c.basis_level == BasisLevel::SP || c.compare_basis) {
        let e = ConfigError::new("the hl solver uses s orbitals only; set basis_level = \"hm\"");
        // blame the basis before the solver, and a flag before the file
        return Err(match (solver_src, basis_src) {
            _ if overrides.basis_level.is_some() => e.at_flag("--basis"),
            (_, Some(src)) => e.at_line(src.and_then(|s| find_key_line(s, None, "basis_level"))),
            _ if overrides.solver.is_some() => e.at_flag("--solver"),
            (Some(src), None) => e.at_line(src.and_then(|s| find_key_line(s, None, "solver"))),
            (None, None) => e,
        });
    }
    if c.compare_basis && c.solver != Solver::Mo {
        return Err(ConfigError::new("compare_basis only applies to the mo solver"));
    }
    Ok(Parsed { config: c, warnings })
}
