//! Material constants, the three-Gaussian confinement potential and scalar
//! estimators derived from it.
//!
//! Public quantities are in meV, nm, Tesla and picoseconds throughout.

use crate::error::{Error, Result};

/// Physical constants in the working unit system (meV, nm, T, ps, K).
pub mod units {
    /// ħ in meV·ps.
    pub const HBAR_MEV_PS: f64 = 0.658_211_956_9;
    /// ħ²/m₀ in meV·nm².
    pub const HBAR2_OVER_M0: f64 = 76.199_642_31;
    /// e²/(4πε₀) in meV·nm.
    pub const COULOMB_MEV_NM: f64 = 1_439.964_548;
    /// Bohr magneton in meV/T.
    pub const MU_B_MEV_PER_T: f64 = 5.788_381_806e-2;
    /// ħ/e in T·nm², so that l_B² = ħ/(eB).
    pub const HBAR_OVER_E_T_NM2: f64 = 658.211_956_9;
    /// Boltzmann constant in meV/K.
    pub const K_B_MEV_PER_K: f64 = 8.617_333_262e-2;

    pub mod si {
        pub const HBAR: f64 = 1.054_571_817e-34;
        pub const K_B: f64 = 1.380_649e-23;
        pub const E_CHARGE: f64 = 1.602_176_634e-19;
    }
}

/// Energy scales of a material in the working units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scales {
    /// ħ²/(m* · 1 nm²) in meV.
    pub kinetic: f64,
    /// e²/(ε · 1 nm) in meV.
    pub coulomb: f64,
    /// ħω_c per Tesla in meV.
    pub cyclotron_per_tesla: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    /// m*/m₀
    pub effective_mass_ratio: f64,
    pub dielectric_const: f64,
    pub g_factor: f64,
    /// Interband coupling energy E_p in eV.
    pub interband_coupling_ep: f64,
    /// Fundamental gap E_g in eV.
    pub band_gap_eg: f64,
    /// Spin-orbit split-off energy Δ in eV.
    pub so_splitting_delta: f64,
}

impl MaterialParams {
    pub fn gaas() -> Self {
        MaterialParams {
            effective_mass_ratio: 0.067,
            dielectric_const: 13.1,
            g_factor: -0.44,
            interband_coupling_ep: 22.71,
            band_gap_eg: 1.5192,
            so_splitting_delta: 0.341,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.effective_mass_ratio > 0.0) {
            return Err(Error::InvalidInput("effective mass ratio must be positive".into()));
        }
        if !(self.dielectric_const >= 1.0) {
            return Err(Error::InvalidInput("dielectric constant must be >= 1".into()));
        }
        if !(self.band_gap_eg > 0.0) {
            return Err(Error::InvalidInput("band gap must be positive".into()));
        }
        Ok(())
    }

    /// The single place where unit conversion factors are derived.
    pub fn scales(&self) -> Scales {
        Scales {
            kinetic: units::HBAR2_OVER_M0 / self.effective_mass_ratio,
            coulomb: units::COULOMB_MEV_NM / self.dielectric_const,
            cyclotron_per_tesla: 2.0 * units::MU_B_MEV_PER_T / self.effective_mass_ratio,
        }
    }

    /// ħω for a parabola with curvature `k` = ∂²V/∂x² (meV/nm²).
    pub fn hbar_omega_from_curvature(&self, k: f64) -> f64 {
        (self.scales().kinetic * k).sqrt()
    }

    /// Oscillator length sqrt(ħ/(m*ω)) in nm for a given ħω.
    pub fn oscillator_length(&self, hbar_omega: f64) -> f64 {
        (self.scales().kinetic / hbar_omega).sqrt()
    }
}

impl Default for MaterialParams {
    fn default() -> Self {
        Self::gaas()
    }
}

/// Magnetic length sqrt(ħ/(eB)) in nm; infinite at B = 0.
pub fn magnetic_length(b: f64) -> f64 {
    if b == 0.0 {
        f64::INFINITY
    } else {
        (units::HBAR_OVER_E_T_NM2 / b.abs()).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldConfig {
    /// Perpendicular field in Tesla.
    pub b: f64,
    pub include_zeeman: bool,
}

impl FieldConfig {
    pub fn new(b: f64) -> Self {
        FieldConfig { b, include_zeeman: false }
    }
}

/// A 2D confinement that can be evaluated with analytic derivatives.
pub trait Potential2d: Sync {
    fn value(&self, x: f64, y: f64) -> f64;
    /// ∂V/∂x
    fn slope_x(&self, x: f64, y: f64) -> f64;
    /// (∂²V/∂x², ∂²V/∂y²)
    fn curvature(&self, x: f64, y: f64) -> (f64, f64);
}

/// Two Gaussian wells at ±a and a Gaussian central barrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfinementPotential {
    /// Well depth in meV (negative for wells).
    pub v0: f64,
    /// Half the inter-dot distance in nm.
    pub a: f64,
    /// Barrier strength in meV.
    pub vb: f64,
    pub lx: f64,
    pub ly: f64,
    pub lbx: f64,
    pub lby: f64,
}

impl Default for ConfinementPotential {
    fn default() -> Self {
        ConfinementPotential { v0: -50.0, a: 15.0, vb: 30.0, lx: 30.0, ly: 30.0, lbx: 15.0, lby: 15.0 }
    }
}

#[inline]
fn gauss(u: f64, l: f64) -> f64 {
    (-(u * u) / (l * l)).exp()
}

#[inline]
fn gauss_d1(u: f64, l: f64) -> f64 {
    -2.0 * u / (l * l) * gauss(u, l)
}

#[inline]
fn gauss_d2(u: f64, l: f64) -> f64 {
    let l2 = l * l;
    (4.0 * u * u / (l2 * l2) - 2.0 / l2) * gauss(u, l)
}

impl ConfinementPotential {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("lx", self.lx), ("ly", self.ly), ("lbx", self.lbx), ("lby", self.lby)] {
            if !(v > 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be positive")));
            }
        }
        if !(self.a >= 0.0) {
            return Err(Error::InvalidInput("a must be non-negative".into()));
        }
        Ok(())
    }

    /// Harmonic constant ħω of a single well Gaussian at its own centre,
    /// the geometric mean of its x and y curvatures.
    pub fn well_parabolicity(&self, mat: &MaterialParams) -> Result<f64> {
        if !(self.v0 < 0.0) {
            return Err(Error::InvalidInput("well depth V0 must be negative".into()));
        }
        let kx = -2.0 * self.v0 / (self.lx * self.lx);
        let ky = -2.0 * self.v0 / (self.ly * self.ly);
        Ok((mat.hbar_omega_from_curvature(kx) * mat.hbar_omega_from_curvature(ky)).sqrt())
    }

    /// Typical extent of the structure along x, used to bound searches.
    fn search_extent(&self) -> f64 {
        self.a + 4.0 * self.lx.max(self.lbx)
    }
}

impl Potential2d for ConfinementPotential {
    fn value(&self, x: f64, y: f64) -> f64 {
        evaluate_potential(self, x, y)
    }

    fn slope_x(&self, x: f64, y: f64) -> f64 {
        let wy = gauss(y, self.ly);
        let by = gauss(y, self.lby);
        self.v0 * (gauss_d1(x - self.a, self.lx) + gauss_d1(x + self.a, self.lx)) * wy
            + self.vb * gauss_d1(x, self.lbx) * by
    }

    fn curvature(&self, x: f64, y: f64) -> (f64, f64) {
        let wx = gauss(x - self.a, self.lx) + gauss(x + self.a, self.lx);
        let wxx = gauss_d2(x - self.a, self.lx) + gauss_d2(x + self.a, self.lx);
        let vxx = self.v0 * wxx * gauss(y, self.ly) + self.vb * gauss_d2(x, self.lbx) * gauss(y, self.lby);
        let vyy = self.v0 * wx * gauss_d2(y, self.ly) + self.vb * gauss(x, self.lbx) * gauss_d2(y, self.lby);
        (vxx, vyy)
    }
}

/// V(x, y) of the three-Gaussian double well, in meV.
pub fn evaluate_potential(pot: &ConfinementPotential, x: f64, y: f64) -> f64 {
    pot.v0 * (gauss(x - pot.a, pot.lx) + gauss(x + pot.a, pot.lx)) * gauss(y, pot.ly)
        + pot.vb * gauss(x, pot.lbx) * gauss(y, pot.lby)
}

/// Location of the global minimum of `pot` along the half line y = 0, x ≥ 0.
///
/// Returns `NoDoubleWell` when that minimum sits at the origin.
pub fn minimum_along_x<P: Potential2d + ?Sized>(pot: &P, x_max: f64) -> Result<f64> {
    const SCAN: usize = 4000;
    let h = x_max / SCAN as f64;
    let (mut best_i, mut best_v) = (0usize, pot.value(0.0, 0.0));
    for i in 1..=SCAN {
        let v = pot.value(i as f64 * h, 0.0);
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    if best_i == 0 {
        return Err(Error::NoDoubleWell);
    }
    // golden-section refinement inside the bracketing cells
    let (mut lo, mut hi) = ((best_i as f64 - 1.0) * h, ((best_i + 1) as f64 * h).min(x_max));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (pot.value(c, 0.0), pot.value(d, 0.0));
    while hi - lo > 1e-12 * (1.0 + hi.abs()) {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = pot.value(c, 0.0);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = pot.value(d, 0.0);
        }
    }
    let mut x = 0.5 * (lo + hi);
    // polish with Newton on the analytic slope
    for _ in 0..8 {
        let (vxx, _) = pot.curvature(x, 0.0);
        if vxx <= 0.0 {
            break;
        }
        let step = pot.slope_x(x, 0.0) / vxx;
        if !step.is_finite() || step.abs() > h {
            break;
        }
        x -= step;
        if step.abs() < 1e-14 {
            break;
        }
    }
    if x <= 0.5 * h {
        return Err(Error::NoDoubleWell);
    }
    Ok(x)
}

/// Height of the central saddle above the well minima: V(0,0) − V(x_min,0).
pub fn effective_barrier(pot: &ConfinementPotential) -> Result<f64> {
    if pot.a <= 0.0 {
        return Err(Error::NoDoubleWell);
    }
    let x_min = minimum_along_x(pot, pot.search_extent())?;
    Ok(evaluate_potential(pot, 0.0, 0.0) - evaluate_potential(pot, x_min, 0.0))
}

/// Harmonic description of the right-hand well.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolaFit {
    /// Base parabolicity ħω₀ in meV (curvature of the well Gaussian at its centre).
    pub hbar_omega0: f64,
    /// Location of the right-well minimum in nm.
    pub x_min: f64,
    /// ħω from ∂²V/∂x² at the actual minimum.
    pub local_hbar_omega_x: f64,
    /// ħω from ∂²V/∂y² at the actual minimum.
    pub local_hbar_omega_y: f64,
}

impl ParabolaFit {
    /// Geometric mean of the two local curvatures at the minimum.
    pub fn local_hbar_omega(&self) -> f64 {
        (self.local_hbar_omega_x * self.local_hbar_omega_y).sqrt()
    }
}

/// Locate the right-well minimum of any potential and measure its curvature there.
pub fn local_parabola<P: Potential2d + ?Sized>(
    pot: &P,
    mat: &MaterialParams,
    x_max: f64,
) -> Result<(f64, f64, f64)> {
    let x_min = minimum_along_x(pot, x_max)?;
    let (kx, ky) = pot.curvature(x_min, 0.0);
    if kx <= 0.0 || ky <= 0.0 {
        return Err(Error::NoDoubleWell);
    }
    Ok((x_min, mat.hbar_omega_from_curvature(kx), mat.hbar_omega_from_curvature(ky)))
}

pub fn fit_parabola_at_minima(pot: &ConfinementPotential, mat: &MaterialParams) -> Result<ParabolaFit> {
    if pot.a <= 0.0 {
        return Err(Error::NoDoubleWell);
    }
    let (x_min, wx, wy) = local_parabola(pot, mat, pot.search_extent())?;
    Ok(ParabolaFit {
        hbar_omega0: pot.well_parabolicity(mat)?,
        x_min,
        local_hbar_omega_x: wx,
        local_hbar_omega_y: wy,
    })
}

/// Solve for the well depth V₀ that produces `target_barrier` (meV) with all
/// other shape parameters of `template` held fixed.
pub fn calibrate_well_depth(template: &ConfinementPotential, target_barrier: f64) -> Result<ConfinementPotential> {
    if !(target_barrier > 0.0) {
        return Err(Error::InvalidInput("target barrier must be positive".into()));
    }
    let residual = |v0: f64| -> Result<f64> {
        let p = ConfinementPotential { v0, ..*template };
        Ok(effective_barrier(&p)? - target_barrier)
    };
    // expand outward from the template depth until the residual changes sign
    let v_start = if template.v0 < 0.0 { template.v0 } else { -50.0 };
    let f0 = residual(v_start)?;
    if f0 == 0.0 {
        return Ok(ConfinementPotential { v0: v_start, ..*template });
    }
    let mut step = 0.02 * v_start.abs();
    let (mut lo, mut hi) = (v_start, v_start);
    let (mut flo, mut fhi) = (f0, f0);
    let mut bracketed = false;
    for _ in 0..60 {
        lo -= step;
        hi = (hi + step).min(-1e-6);
        flo = residual(lo).unwrap_or(f64::NAN);
        fhi = residual(hi).unwrap_or(f64::NAN);
        if flo.is_finite() && flo * f0 <= 0.0 {
            hi = lo + step;
            fhi = residual(hi)?;
            bracketed = true;
            break;
        }
        if fhi.is_finite() && fhi * f0 <= 0.0 {
            lo = hi - step;
            flo = residual(lo)?;
            bracketed = true;
            break;
        }
        step *= 1.5;
    }
    if !bracketed {
        return Err(Error::InvalidInput(format!(
            "cannot reach an effective barrier of {target_barrier} meV by varying V0"
        )));
    }
    // bisection; the residual is smooth but may be flat-ish, keep it robust
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = residual(mid)?;
        if fm == 0.0 || (hi - lo).abs() < 1e-13 {
            lo = mid;
            hi = mid;
            break;
        }
        if fm * flo < 0.0 {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    let _ = fhi;
    Ok(ConfinementPotential { v0: 0.5 * (lo + hi), ..*template })
}

/// Small parameters measuring interband (p) and spin-orbit (p′) corrections to
/// the single-band envelope description. Energies in meV, band constants in eV.
pub fn envelope_validity(mat: &MaterialParams, e_bar: f64, v_bar: f64) -> (f64, f64) {
    let ep = mat.interband_coupling_ep * 1e3;
    let eg = mat.band_gap_eg * 1e3;
    let delta = mat.so_splitting_delta * 1e3;
    let m = mat.effective_mass_ratio;
    let p = ep * e_bar * m / (eg * eg);
    let p_prime = ep * delta * v_bar * m / (eg * eg * eg);
    (p, p_prime)
}

/// |g*| μ_B B in meV.
pub fn zeeman_splitting(mat: &MaterialParams, b: f64) -> f64 {
    mat.g_factor.abs() * units::MU_B_MEV_PER_T * b.abs()
}
