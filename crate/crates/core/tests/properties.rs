use dqdot::analysis::{adiabatic_lower_bound, heitler_london_j, phase_noise};
use dqdot::basis::{dot_orbitals, length_scales, overlap};
use dqdot::integrals::one_body_matrix;
use dqdot::mo_solver::{run_mo, BasisLevel, FittingWells, MoConfig};
use dqdot::model::{effective_barrier, evaluate_potential, magnetic_length};
use dqdot::{ConfinementPotential, FieldConfig, MaterialParams};
use proptest::prelude::*;

const HBAR_MEV_PS: f64 = 0.658_211_956_9;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn potential() -> impl Strategy<Value = ConfinementPotential> {
    (-80.0..-10.0f64, 0.0..30.0f64, 0.0..40.0f64, 10.0..50.0f64, 10.0..50.0f64, 5.0..30.0f64, 5.0..30.0f64)
        .prop_map(|(v0, a, vb, lx, ly, lbx, lby)| ConfinementPotential { v0, a, vb, lx, ly, lbx, lby })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn potential_has_both_mirror_symmetries(p in potential(), x in -60.0..60.0f64, y in -60.0..60.0f64) {
        let v = evaluate_potential(&p, x, y);
        prop_assert!((v - evaluate_potential(&p, -x, y)).abs() <= 1e-12 * v.abs().max(1.0));
        prop_assert!((v - evaluate_potential(&p, x, -y)).abs() <= 1e-12 * v.abs().max(1.0));
    }

    #[test]
    fn barrier_grows_with_vb(vb in 10.0..30.0f64, dv in 0.5..5.0f64) {
        let lo = ConfinementPotential { vb, ..Default::default() };
        let hi = ConfinementPotential { vb: vb + dv, ..Default::default() };
        prop_assert!(effective_barrier(&hi).unwrap() > effective_barrier(&lo).unwrap());
    }

    #[test]
    fn oscillator_length_matches_the_magnetic_length_form(b in 0.01..12.0f64, w0 in 1.0..15.0f64) {
        let mat = MaterialParams::gaas();
        let ls = length_scales(b, w0, &mat);
        let lb = magnetic_length(b);
        let ratio = w0 / ls.hbar_omega_c;
        let expected = lb / (0.25 + ratio * ratio).powf(0.25);
        // the tabulated constants carry ten significant digits
        prop_assert!(rel(ls.l0, expected) < 1e-9, "{} {}", ls.l0, expected);
        prop_assert_eq!(ls.lb, lb);
    }

    #[test]
    fn overlaps_are_hermitian_and_bounded(b in 0.0..8.0f64, x0 in 5.0..25.0f64, w0 in 3.0..12.0f64) {
        let ls = length_scales(b, w0, &MaterialParams::gaas());
        let orbs = dot_orbitals(x0, true, &ls);
        for i in &orbs {
            prop_assert!((overlap(i, i).re - 1.0).abs() < 1e-10);
            for j in &orbs {
                prop_assert!((overlap(i, j) - overlap(j, i).conj()).norm() < 1e-12);
                prop_assert!(overlap(i, j).norm() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn one_body_matrices_are_hermitian(b in 0.0..8.0f64, x0 in 8.0..20.0f64, w0 in 3.0..12.0f64, vb in 15.0..30.0f64) {
        let mat = MaterialParams::gaas();
        let pot = ConfinementPotential { vb, ..Default::default() };
        let ls = length_scales(b, w0, &mat);
        let m = one_body_matrix(&dot_orbitals(x0, true, &ls), &pot, &mat).unwrap();
        let scale = m.h.norm();
        prop_assert!((&m.h - m.h.adjoint()).norm() <= 1e-10 * scale);
        prop_assert!((&m.s - m.s.adjoint()).norm() <= 1e-12);
        let eig = nalgebra::SymmetricEigen::new(m.s.clone()).eigenvalues;
        prop_assert!(eig.iter().all(|&e| e > 0.0), "{eig}");
    }

    #[test]
    fn adiabatic_bound_times_gap_is_hbar(gap in 1e-3..50.0f64) {
        prop_assert!(rel(adiabatic_lower_bound(gap).unwrap() * gap, HBAR_MEV_PS) < 1e-12);
    }

    #[test]
    fn noise_is_linear_in_r_t_duration_and_quadratic_in_alpha(
        r in 1.0..1e3f64, t in 0.01..10.0f64, alpha in 1e-3..0.1f64, d in 1e-12..1e-6f64, k in 0.1..10.0f64,
    ) {
        let base = phase_noise(r, t, alpha, d).unwrap();
        prop_assert!(base.phase_var >= 0.0 && base.phase_var_rate >= 0.0);
        prop_assert!(rel(base.phase_var, base.phase_var_rate * d) < 1e-14);
        prop_assert!(rel(phase_noise(k * r, t, alpha, d).unwrap().phase_var, k * base.phase_var) < 1e-12);
        prop_assert!(rel(phase_noise(r, k * t, alpha, d).unwrap().phase_var, k * base.phase_var) < 1e-12);
        prop_assert!(rel(phase_noise(r, t, alpha, k * d).unwrap().phase_var, k * base.phase_var) < 1e-12);
        prop_assert!(rel(phase_noise(r, t, k * alpha, d).unwrap().phase_var, k * k * base.phase_var) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn parity_blocking_leaves_the_spectrum_unchanged(b in 0.0..8.0f64, vb in 18.0..30.0f64) {
        let pot = ConfinementPotential { vb, ..Default::default() };
        let wells = FittingWells { hbar_omega0: 9.0, x0: 13.0 };
        let on = MoConfig::new(pot, wells, BasisLevel::HundMulliken, b);
        let off = MoConfig { use_parity: false, ..on };
        let (e1, e2) = (run_mo(&on).unwrap().energies(), run_mo(&off).unwrap().energies());
        prop_assert_eq!(e1.len(), e2.len());
        for (a, c) in e1.iter().zip(&e2) {
            prop_assert!(rel(*a, *c) < 1e-8, "{a} {c}");
        }
    }

    #[test]
    fn eigenvectors_are_overlap_normalised(b in 0.0..8.0f64, vb in 18.0..30.0f64) {
        let pot = ConfinementPotential { vb, ..Default::default() };
        let cfg = MoConfig::new(pot, FittingWells { hbar_omega0: 9.0, x0: 13.0 }, BasisLevel::HundMulliken, b);
        let r = run_mo(&cfg).unwrap();
        for l in &r.levels {
            let s = &r.blocks[l.block].s;
            let n = l.vector.dotc(&(s * &l.vector));
            prop_assert!((n.re - 1.0).abs() < 1e-10 && n.im.abs() < 1e-10, "{n}");
        }
    }

    #[test]
    fn heitler_london_j_ignores_left_right_labels(b in 0.0..6.0f64, x0 in 10.0..18.0f64) {
        // mirroring the structure through x → −x swaps the two dots
        let mat = MaterialParams::gaas();
        let pot = ConfinementPotential::default();
        let field = FieldConfig::new(b);
        let a = heitler_london_j(&pot, &mat, &field, FittingWells { hbar_omega0: 9.0, x0 }).unwrap();
        let mirrored = heitler_london_j(&pot, &mat, &field, FittingWells { hbar_omega0: 9.0, x0: -x0 }).unwrap();
        prop_assert!((a.j_total - mirrored.j_total).abs() <= 1e-10 * a.j_total.abs().max(1e-6), "{} {}", a.j_total, mirrored.j_total);
        prop_assert!(a.s_lr.norm() < 1.0);
    }
}
