use coilfield::{make_preset, CoilSystem, Preset};
use coilfield_oracles::{central_derivative, normalized_flatness, on_axis_bz, Loop};

const VANISH: f64 = 1e-6;
const RADII: [f64; 3] = [0.1, 0.5, 1.0];

fn loops(sys: &CoilSystem) -> Vec<Loop> {
    sys.coils
        .iter()
        .map(|c| (c.radius, c.z_position, c.ampere_turns()))
        .collect()
}

fn order_reached(sys: &CoilSystem, base_radius: f64) -> usize {
    let l = loops(sys);
    let z0 = sys.axial_centroid();
    let b0 = on_axis_bz(&l, z0);
    let d1 = central_derivative(|z| on_axis_bz(&l, z), z0, base_radius / 1000.0, 1, 1);
    assert!(d1.abs() <= 1e-6 * b0 / base_radius, "first derivative {d1:e}");
    let mut reached = 0;
    for order in [2, 4, 6] {
        if normalized_flatness(&l, z0, base_radius, order) > VANISH {
            break;
        }
        reached = order;
    }
    reached
}

#[test]
fn every_preset_reaches_its_design_order() {
    for preset in Preset::ALL {
        let required = if preset == Preset::Helmholtz { 2 } else { 4 };
        for r in RADII {
            let sys = make_preset(preset.name(), r, 100, 1.0).unwrap();
            let reached = order_reached(&sys, r);
            assert!(
                reached >= required,
                "{} at R = {r}: flat to order {reached}",
                preset.name()
            );
        }
    }
}

#[test]
fn helmholtz_fourth_derivative_does_not_vanish() {
    let sys = make_preset("helmholtz", 0.5, 100, 1.0).unwrap();
    assert!(normalized_flatness(&loops(&sys), 0.0, 0.5, 4) > 0.1);
}

#[test]
fn detuned_helmholtz_fails_the_gate() {
    let mut sys = make_preset("helmholtz", 0.5, 100, 1.0).unwrap();
    sys.coils[1].z_position *= 1.01;
    sys.coils[0].z_position *= 1.01;
    assert_eq!(order_reached(&sys, 0.5), 0);
}

#[test]
fn turns_rounding_keeps_ratios() {
    let sys = make_preset("maxwell", 0.5, 100, 1.0).unwrap();
    let turns: Vec<u32> = sys.coils.iter().map(|c| c.turns).collect();
    assert_eq!(turns, vec![98, 128, 98]);
    let sys = make_preset("lee-whiting", 0.5, 1, 1.0).unwrap();
    let turns: Vec<u32> = sys.coils.iter().map(|c| c.turns).collect();
    assert_eq!(turns, vec![9, 4, 4, 9]);
}
