use coilfield::homogeneity::{
    analyze, experimentation_volume, homogeneity_map, homogeneity_map_with, homogeneous_mask, largest_inscribed_square,
    largest_square_cells, Convention, HomogeneityError, InscribedSquare, Mask, VolumeShape,
};
use coilfield::{default_region, make_preset, simulate_grid, FieldGrid, FieldSample, SimulationRegion};
use coilfield_oracles::brute_force_square;
use proptest::prelude::*;

fn region(ny: usize, nz: usize) -> SimulationRegion {
    SimulationRegion {
        y_min: -1.0,
        y_max: 1.0,
        z_min: -1.0,
        z_max: 1.0,
        ny,
        nz,
    }
}

fn dp_matches(mask: &Mask) -> bool {
    let dp = largest_square_cells(mask).map(|s| (s.iy0, s.iz0, s.side));
    dp == brute_force_square(mask.ny, mask.nz, &mask.cells)
}

#[test]
fn dp_equals_brute_force_on_every_small_mask() {
    for ny in 1..=16 {
        for nz in 1..=16 / ny {
            let n = ny * nz;
            for bits in 0u32..(1 << n) {
                let cells = (0..n).map(|i| bits >> i & 1 == 1).collect();
                let mask = Mask::new(ny, nz, cells);
                assert!(dp_matches(&mask), "{ny}x{nz} mask {bits:#b}");
            }
        }
    }
}

#[test]
fn one_deviant_sample_reads_ninety_eight() {
    let b0 = 1.5e-3;
    let mut mags = [b0; 9];
    mags[2] = 1.02 * b0;
    mags[6] = 0.98 * b0;
    let grid = FieldGrid::new(region(3, 3), mags.iter().map(|&m| FieldSample::new(0.0, m)).collect());
    let map = homogeneity_map(&grid).unwrap();
    assert!((map.h_values[2] - 98.0).abs() < 1e-12);
    assert!((map.h_values[6] - 98.0).abs() < 1e-12);
    assert_eq!(map.h_values[4], 100.0);
    let signed = homogeneity_map_with(&grid, Convention::Signed).unwrap();
    assert!((signed.h_values[2] - 98.0).abs() < 1e-12);
    assert!((signed.h_values[6] - 102.0).abs() < 1e-12);
}

#[test]
fn null_center_field_is_rejected() {
    let grid = FieldGrid::new(region(3, 3), vec![FieldSample::new(0.0, 0.0); 9]);
    assert!(matches!(
        homogeneity_map(&grid),
        Err(HomogeneityError::ZeroReference(_))
    ));
}

#[test]
fn helmholtz_region_is_mirror_symmetric() {
    let sys = make_preset("helmholtz", 0.5, 100, 1.0).unwrap();
    let r = default_region(&sys);
    let grid = simulate_grid(&sys, &r, &|_| {}).unwrap();
    for threshold in [90.0, 97.0, 99.0, 99.9] {
        let (_, mask, report) = analyze(&grid, threshold, Convention::Absolute).unwrap();
        for iy in 0..r.ny {
            for iz in 0..r.nz {
                assert_eq!(mask.get(iy, iz), mask.get(r.ny - 1 - iy, iz));
                assert_eq!(mask.get(iy, iz), mask.get(iy, r.nz - 1 - iz));
            }
        }
        let square = report.square.unwrap();
        let (a, b) = square.y_extent();
        assert!(a <= 0.0 && b >= 0.0, "square straddles the axis at {threshold}%");
        assert_eq!(report.volume.unwrap().shape, VolumeShape::Cylinder);
    }
}

fn arb_grid() -> impl Strategy<Value = FieldGrid> {
    (2usize..12, 2usize..12).prop_flat_map(|(ny, nz)| {
        prop::collection::vec(0.5e-3f64..1.5e-3, ny * nz).prop_map(move |mags| {
            FieldGrid::new(region(ny, nz), mags.iter().map(|&m| FieldSample::new(0.0, m)).collect())
        })
    })
}

fn arb_mask() -> impl Strategy<Value = Mask> {
    (1usize..=12, 1usize..=12, 0.3f64..0.95).prop_flat_map(|(ny, nz, density)| {
        prop::collection::vec(prop::bool::weighted(density), ny * nz).prop_map(move |c| Mask::new(ny, nz, c))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn dp_equals_brute_force_on_random_masks(mask in arb_mask()) {
        prop_assert!(dp_matches(&mask));
    }

    #[test]
    fn raising_the_threshold_shrinks_the_mask(grid in arb_grid(), t1 in 1.0f64..100.0, t2 in 1.0f64..100.0) {
        let (lo, hi) = (t1.min(t2), t1.max(t2));
        let map = homogeneity_map(&grid).unwrap();
        let strict = homogeneous_mask(&map, hi).unwrap();
        let loose = homogeneous_mask(&map, lo).unwrap();
        prop_assert!(strict.is_subset_of(&loose));
        let side = |m: &Mask| largest_square_cells(m).map_or(0, |s| s.side);
        prop_assert!(side(&strict) <= side(&loose));
    }

    #[test]
    fn h_never_exceeds_100_in_absolute_convention(grid in arb_grid()) {
        let map = homogeneity_map(&grid).unwrap();
        prop_assert!(map.h_values.iter().all(|&h| h <= 100.0));
    }

    #[test]
    fn rle_round_trips(mask in arb_mask()) {
        prop_assert_eq!(mask.run_lengths().decode(), Some(mask));
    }

    #[test]
    fn square_cells_are_all_in_the_mask(mask in arb_mask()) {
        let r = region(mask.ny, mask.nz);
        if let Some(sq) = largest_inscribed_square(&mask, &r) {
            for iy in sq.iy0..sq.iy0 + sq.side_cells {
                for iz in sq.iz0..sq.iz0 + sq.side_cells {
                    prop_assert!(mask.get(iy, iz));
                }
            }
        } else {
            prop_assert_eq!(mask.count(), 0);
        }
    }

    #[test]
    fn volume_is_self_consistent(y0 in -1.0f64..1.0, z0 in -1.0f64..1.0, side in 1e-3f64..1.0) {
        let sq = InscribedSquare { iy0: 0, iz0: 0, side_cells: 1, y0, z0, side_m: side };
        let v = experimentation_volume(&sq).unwrap();
        prop_assert!((v.volume - v.recomputed_volume()).abs() <= 1e-12 * v.volume.max(1e-300));
        prop_assert!(v.volume > 0.0);
        prop_assert!((v.height - side).abs() <= 1e-12);
        prop_assert!((v.centroid_z - (z0 + side / 2.0)).abs() <= 1e-12);
        match v.shape {
            VolumeShape::Cylinder => prop_assert!(y0 <= 0.0 && y0 + side >= 0.0 && v.inner_radius == 0.0),
            VolumeShape::Annulus => prop_assert!(v.inner_radius > 0.0 && v.inner_radius < v.outer_radius),
        }
    }
}
