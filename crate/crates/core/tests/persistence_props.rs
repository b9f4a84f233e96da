use coilfield::homogeneity::{analyze, homogeneity_map, Convention};
use coilfield::persistence::{
    format_field_table, import_measurements, load_project, load_results, save_project, save_results, CoilEntry,
    HomogeneitySettings, ProjectDocument, RegionEntry, ResultsDocument, FORMAT_VERSION,
};
use coilfield::{electrical::electrical_report, simulate_grid};
use proptest::prelude::*;

fn arb_project() -> impl Strategy<Value = ProjectDocument> {
    let coil =
        (1e-3f64..2.0, 1u32..5000, -50.0f64..50.0, -1.0f64..1.0).prop_map(|(radius_m, turns, current_a, z_m)| {
            CoilEntry {
                radius_m,
                turns,
                current_a,
                z_m,
            }
        });
    let region = (
        -1.0f64..0.0,
        1e-3f64..1.0,
        -1.0f64..0.0,
        1e-3f64..1.0,
        2usize..40,
        2usize..40,
    )
        .prop_map(|(y_min_m, wy, z_min_m, wz, ny, nz)| RegionEntry {
            y_min_m,
            y_max_m: y_min_m + wy,
            z_min_m,
            z_max_m: z_min_m + wz,
            ny,
            nz,
        });
    (
        "[a-zA-Z0-9 \\-_éµ\"\\\\]{0,24}",
        prop::collection::vec(coil, 1..6),
        region,
        1e-3f64..=100.0,
        any::<bool>(),
    )
        .prop_map(
            |(label, coils, region, threshold_percent, signed_convention)| ProjectDocument {
                format_version: FORMAT_VERSION,
                label,
                coils,
                region,
                homogeneity: HomogeneitySettings {
                    threshold_percent,
                    signed_convention,
                },
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn projects_round_trip(doc in arb_project()) {
        let bytes = save_project(&doc);
        let back = load_project(&bytes).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(save_project(&back), bytes);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn results_round_trip(doc in arb_project(), threshold in 50.0f64..100.0) {
        let system = doc.system();
        let region = doc.region();
        let Ok(grid) = simulate_grid(&system, &region, &|_| {}) else {
            return Ok(());
        };
        let homogeneity = analyze(&grid, threshold, Convention::Absolute).ok().map(|(_, _, r)| r);
        let first = ResultsDocument { project: doc, grid, electrical: electrical_report(&system).ok(), homogeneity };
        let bytes = save_results(&first);
        let loaded = load_results(&bytes).unwrap();
        prop_assert_eq!(&loaded.project, &first.project);
        prop_assert_eq!(&loaded.electrical, &first.electrical);
        prop_assert_eq!(&loaded.homogeneity, &first.homogeneity);
        let again = load_results(&save_results(&loaded)).unwrap();
        prop_assert!(again.grid.bit_eq(&loaded.grid));
        prop_assert_eq!(save_results(&again), bytes);
    }

    #[test]
    fn measurement_import_gives_bit_identical_maps(doc in arb_project()) {
        let system = doc.system();
        let region = doc.region();
        let Ok(grid) = simulate_grid(&system, &region, &|_| {}) else {
            return Ok(());
        };
        let exported = format_field_table(&grid);
        let imported = import_measurements(exported.as_bytes(), &region).unwrap();
        let reexported = format_field_table(&imported);
        prop_assert_eq!(&reexported, &exported);
        let twice = import_measurements(reexported.as_bytes(), &region).unwrap();
        match (homogeneity_map(&imported), homogeneity_map(&twice)) {
            (Ok(a), Ok(b)) => prop_assert!(a.bit_eq(&b)),
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            _ => prop_assert!(false, "maps disagree on validity"),
        }
    }
}
