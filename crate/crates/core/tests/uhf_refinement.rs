use dqdot::model::calibrate_well_depth;
use dqdot::uhf::{double_dot_mesh, scf, SpinConfig, UhfOptions};
use dqdot::{ConfinementPotential, FieldConfig, MaterialParams};

#[test]
fn doubling_the_mesh_moves_the_energy_by_under_two_percent() {
    let mat = MaterialParams::gaas();
    let pot = calibrate_well_depth(&ConfinementPotential { vb: 20.0, ..Default::default() }, 3.38).unwrap();
    let field = FieldConfig::new(2.0);
    let energy = |nx, ny| {
        let mesh = double_dot_mesh(&pot, &mat, nx, ny).unwrap();
        scf(&pot, &mat, &field, SpinConfig::Opposite, &mesh, &UhfOptions::default()).unwrap().check().unwrap().total_energy
    };
    let coarse = energy(40, 20);
    let fine = energy(80, 40);
    let change = ((fine - coarse) / fine).abs();
    assert!(change < 0.02, "{coarse} -> {fine} meV ({:.2}%)", 100.0 * change);
}
