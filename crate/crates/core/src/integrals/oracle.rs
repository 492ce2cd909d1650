use crate::basis::{eval_orbital, Orbital};
use crate::model::MaterialParams;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use std::f64::consts::PI;

/// Monte-Carlo estimate of a Coulomb element with per-component standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: C64,
    pub std_err_re: f64,
    pub std_err_im: f64,
}

impl McEstimate {
    /// Combined standard error sqrt(σ_re² + σ_im²).
    pub fn std_error(&self) -> f64 {
        self.std_err_re.hypot(self.std_err_im)
    }

    /// Whether `exact` lies within `k` standard errors in both components.
    pub fn agrees_with(&self, exact: C64, k: f64) -> bool {
        let floor = 1e-12 * exact.norm().max(1.0);
        (self.value.re - exact.re).abs() <= k * self.std_err_re + floor
            && (self.value.im - exact.im).abs() <= k * self.std_err_im + floor
    }
}

/// Importance-sampled estimate of (ij|kl) straight from orbital point values.
///
/// r₁ is drawn from the Gaussian envelope of φᵢ*φₖ and the separation
/// s = r₁ − r₂ from a radial half-normal with uniform angle, whose 1/|s|
/// density cancels the Coulomb singularity.
pub fn coulomb_oracle_mc<R: Rng + ?Sized>(
    oi: &Orbital,
    oj: &Orbital,
    ok: &Orbital,
    ol: &Orbital,
    mat: &MaterialParams,
    n_samples: usize,
    rng: &mut R,
) -> McEstimate {
    assert!(n_samples >= 2);
    let l0 = oi.l0;
    let c1 = 0.5 * (oi.center + ok.center);
    let c2 = 0.5 * (oj.center + ol.center);
    let d = c1 - c2;
    let sig_s = (d * d + 2.0 * l0 * l0).sqrt();
    let r1_dist = Normal::new(0.0, l0 / 2f64.sqrt()).unwrap();
    let s_dist = Normal::new(0.0, sig_s).unwrap();
    let coulomb = mat.scales().coulomb;

    let (mut sr, mut si, mut sr2, mut si2) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..n_samples {
        let dx1 = r1_dist.sample(rng);
        let dy1 = r1_dist.sample(rng);
        let (x1, y1) = (c1 + dx1, dy1);
        let p1 = (-(dx1 * dx1 + dy1 * dy1) / (l0 * l0)).exp() / (PI * l0 * l0);
        let r: f64 = s_dist.sample(rng).abs();
        let th = rng.random::<f64>() * 2.0 * PI;
        let (x2, y2) = (x1 - r * th.cos(), y1 - r * th.sin());
        let rho1 = eval_orbital(oi, x1, y1).conj() * eval_orbital(ok, x1, y1);
        let rho2 = eval_orbital(oj, x2, y2).conj() * eval_orbital(ol, x2, y2);
        // 2π|s| / f(|s|) with f the half-normal density; the |s| cancels 1/r12
        let inv_f = sig_s * (PI / 2.0).sqrt() * (r * r / (2.0 * sig_s * sig_s)).exp();
        let w = rho1 * rho2 * (coulomb * 2.0 * PI * inv_f / p1);
        sr += w.re;
        si += w.im;
        sr2 += w.re * w.re;
        si2 += w.im * w.im;
    }
    let n = n_samples as f64;
    let (mr, mi) = (sr / n, si / n);
    let var_r = ((sr2 / n - mr * mr) * n / (n - 1.0)).max(0.0);
    let var_i = ((si2 / n - mi * mi) * n / (n - 1.0)).max(0.0);
    McEstimate { value: C64::new(mr, mi), std_err_re: (var_r / n).sqrt(), std_err_im: (var_i / n).sqrt() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{length_scales, Shell};
    use crate::integrals::coulomb_element;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn on_site_repulsion_within_three_sigma() {
        let mat = MaterialParams::gaas();
        let ls = length_scales(0.0, 8.0, &mat);
        let s = Orbital::new(0.0, Shell::S, &ls);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let est = coulomb_oracle_mc(&s, &s, &s, &s, &mat, 200_000, &mut rng);
        let exact = (PI / 2.0).sqrt() * mat.scales().coulomb / ls.l0;
        assert!(est.agrees_with(C64::new(exact, 0.0), 3.0), "{:?} vs {exact}", est);
    }

    #[test]
    fn angular_selection_rule_gives_zero() {
        let mat = MaterialParams::gaas();
        let ls = length_scales(0.0, 8.0, &mat);
        let s = Orbital::new(0.0, Shell::S, &ls);
        let p = Orbital::new(0.0, Shell::PPlus, &ls);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let est = coulomb_oracle_mc(&s, &s, &s, &p, &mat, 100_000, &mut rng);
        assert!(est.agrees_with(C64::new(0.0, 0.0), 3.0), "{:?}", est);
        assert!(coulomb_element(&s, &s, &s, &p, &mat).unwrap().norm() < 1e-9);
    }

    #[test]
    fn error_shrinks_with_sample_count() {
        let mat = MaterialParams::gaas();
        let ls = length_scales(3.0, 8.0, &mat);
        let a = Orbital::new(-15.0, Shell::S, &ls);
        let b = Orbital::new(15.0, Shell::PMinus, &ls);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let e1 = coulomb_oracle_mc(&a, &b, &b, &a, &mat, 40_000, &mut rng);
        let e2 = coulomb_oracle_mc(&a, &b, &b, &a, &mat, 80_000, &mut rng);
        let ratio = e1.std_error() / e2.std_error();
        assert!((ratio - 2f64.sqrt()).abs() < 0.25, "{ratio}");
    }
}
