//! Closed-form estimators built on top of the solvers: Heitler-London exchange,
//! gate timing and noise budgets.

use crate::basis::{dot_orbitals, length_scales, overlap};
use crate::error::{Error, Result};
use crate::integrals::{coulomb_element, one_body_element, PairIntegrable};
use crate::model::{units, zeeman_splitting, FieldConfig, MaterialParams};
use crate::mo_solver::FittingWells;
use num_complex::Complex64 as C64;

/// Heitler-London exchange split into one-body and Coulomb parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HLDecomposition {
    pub j_total: f64,
    pub j_r: f64,
    pub j_c: f64,
    pub s_lr: C64,
}

/// J = J_r + J_c for the singly occupied states (|LR⟩ ± |RL⟩).
///
/// With ΔV_X = V − V_par,X the deviation from the parabola of dot X:
///   J_r = 2[|S|²(⟨L|ΔV_L|L⟩ + ⟨R|ΔV_R|R⟩) − Re(⟨L|ΔV_R|R⟩S* + ⟨R|ΔV_L|L⟩S)] / (1 − |S|⁴)
///   J_c = 2[|S|²(LR|LR) − Re(LR|RL)] / (1 − |S|⁴)
pub fn heitler_london_j(pot: &dyn PairIntegrable, mat: &MaterialParams, field: &FieldConfig, wells: FittingWells) -> Result<HLDecomposition> {
    let ls = length_scales(field.b, wells.hbar_omega0, mat);
    let orbs = dot_orbitals(wells.x0, false, &ls);
    let (l, r) = (&orbs[0], &orbs[1]);
    let s = overlap(l, r);
    let s2 = s.norm_sqr();
    // ⟨i|ΔV_j|j⟩ = ⟨i|h|j⟩ − ε_j ⟨i|j⟩
    let dv = |i: &crate::basis::Orbital, j: &crate::basis::Orbital| -> Result<C64> {
        Ok(one_body_element(i, j, pot, mat)? - overlap(i, j) * j.own_energy())
    };
    let d_ll = dv(l, l)?.re;
    let d_rr = dv(r, r)?.re;
    let cross = (dv(l, r)? * s.conj() + dv(r, l)? * s).re;
    let direct = coulomb_element(l, r, l, r, mat)?.re;
    let exchange = coulomb_element(l, r, r, l, mat)?.re;
    let denom = 1.0 - s2 * s2;
    let j_r = 2.0 * (s2 * (d_ll + d_rr) - cross) / denom;
    let j_c = 2.0 * (s2 * direct - exchange) / denom;
    Ok(HLDecomposition { j_total: j_r + j_c, j_r, j_c, s_lr: s })
}

/// ħ/gap in picoseconds.
pub fn adiabatic_lower_bound(gap: f64) -> Result<f64> {
    if !(gap > 0.0) {
        return Err(Error::InvalidInput("gap must be positive".into()));
    }
    Ok(units::HBAR_MEV_PS / gap)
}

/// Factor relating the bare exchange π-pulse to a ramped, adiabatic gate.
pub const ADIABATIC_PADDING: f64 = 13.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapTime {
    /// πħ/|J| in ps.
    pub raw_ps: f64,
    /// raw_ps × [`ADIABATIC_PADDING`].
    pub padded_ps: f64,
}

pub fn swap_time(j: f64) -> Result<SwapTime> {
    if j == 0.0 || !j.is_finite() {
        return Err(Error::ZeroCoupling);
    }
    let raw = std::f64::consts::PI * units::HBAR_MEV_PS / j.abs();
    Ok(SwapTime { raw_ps: raw, padded_ps: raw * ADIABATIC_PADDING })
}

/// Zeeman energy difference for a field mismatch ΔB, relative to J.
pub fn zeeman_phase_mismatch(j: f64, delta_b: f64, mat: &MaterialParams) -> Result<f64> {
    if !(j > 0.0) {
        return Err(Error::InvalidInput("J must be positive".into()));
    }
    Ok(zeeman_splitting(mat, delta_b) / j)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseEstimate {
    /// Ohm
    pub r: f64,
    /// Kelvin
    pub t: f64,
    /// dJ/dV in eV/V
    pub alpha: f64,
    /// Seconds
    pub duration: f64,
    /// ⟨δφ²⟩/t in 1/s
    pub phase_var_rate: f64,
    pub phase_var: f64,
}

/// Nyquist gate-voltage noise: ⟨δφ²⟩ ≈ 4 R k_B T α² t / ħ².
pub fn phase_noise(r: f64, t: f64, alpha: f64, duration: f64) -> Result<NoiseEstimate> {
    if r < 0.0 || t < 0.0 || duration < 0.0 || !alpha.is_finite() {
        return Err(Error::InvalidInput("noise inputs must be non-negative".into()));
    }
    let a = alpha * units::si::E_CHARGE;
    let rate = 4.0 * r * units::si::K_B * t * a * a / (units::si::HBAR * units::si::HBAR);
    Ok(NoiseEstimate { r, t, alpha, duration, phase_var_rate: rate, phase_var: rate * duration })
}

/// Duration (s) needed to accumulate `phase_var` at `rate` (1/s).
pub fn duration_for_phase_variance(phase_var: f64, rate: f64) -> Result<f64> {
    if !(rate > 0.0) {
        return Err(Error::InvalidInput("rate must be positive".into()));
    }
    Ok(phase_var / rate)
}

/// Least-squares |dJ/dV_b| from (V_b [meV], J [meV]) points, in eV/V.
pub fn alpha_from_sweep(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InvalidInput("need at least two sweep points".into()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateSweep);
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok((sxy / sxx).abs())
}
