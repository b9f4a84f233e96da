use serde::{Deserialize, Serialize};

use super::{check_version, parse_json, PersistError, ProjectDocument, FORMAT_VERSION};
use crate::coil::SimulationRegion;
use crate::electrical::ElectricalReport;
use crate::field::{FieldGrid, FieldSample};
use crate::homogeneity::HomogeneityReport;

pub const FIELD_TABLE_HEADER: &str = "y_m,z_m,B_rho_T,B_z_T,B_mag_T";

/// Saved simulation output (`.coilres`).
#[derive(Debug, Clone, PartialEq)]
pub struct ResultsDocument {
    pub project: ProjectDocument,
    pub grid: FieldGrid,
    /// Absent when a coil current is beyond the wire table.
    pub electrical: Option<ElectricalReport>,
    pub homogeneity: Option<HomogeneityReport>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResultsWire {
    format_version: u32,
    project: ProjectDocument,
    electrical: Option<ElectricalReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    homogeneity: Option<HomogeneityReport>,
    field_table: String,
}

fn sci(v: f64) -> String {
    format!("{v:.8e}")
}

/// The grid as a field table, rows ordered by `iy` then `iz`.
pub fn format_field_table(grid: &FieldGrid) -> String {
    let r = &grid.region;
    let mut out = String::with_capacity(80 * (r.len() + 1));
    out.push_str(FIELD_TABLE_HEADER);
    out.push('\n');
    for iy in 0..r.ny {
        let y = sci(r.y_at(iy));
        for iz in 0..r.nz {
            let s = grid.get(iy, iz);
            out.push_str(&format!(
                "{y},{},{},{},{}\n",
                sci(r.z_at(iz)),
                sci(s.b_rho),
                sci(s.b_z),
                sci(s.b_mag)
            ));
        }
    }
    out
}

/// Parse a field table laid out over `region`.
///
/// Coordinates must agree with the region lattice to within 1e-3 of a cell.
pub fn parse_field_table(text: &str, region: &SimulationRegion) -> Result<FieldGrid, PersistError> {
    let violations = region.validate();
    if !violations.is_empty() {
        return Err(PersistError::Validation(
            violations
                .into_iter()
                .map(|v| super::DocViolation {
                    path: v.path.to_string(),
                    message: v.message,
                })
                .collect(),
        ));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| PersistError::Table {
            line: 1,
            message: e.to_string(),
        })?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != FIELD_TABLE_HEADER {
        return Err(PersistError::Table {
            line: 1,
            message: format!("expected header '{FIELD_TABLE_HEADER}', found '{header}'"),
        });
    }

    let expected = region.len();
    let mut samples = Vec::with_capacity(expected);
    for record in reader.records() {
        let record = record.map_err(|e| PersistError::Table {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 5 {
            return Err(PersistError::Table {
                line,
                message: format!("expected 5 columns, found {}", record.len()),
            });
        }
        let mut values = [0.0; 5];
        for (slot, cell) in values.iter_mut().zip(record.iter()) {
            *slot = cell.trim().parse::<f64>().map_err(|_| PersistError::Table {
                line,
                message: format!("non-numeric cell '{cell}'"),
            })?;
        }
        let index = samples.len();
        if index < expected {
            let (iy, iz) = (index / region.nz, index % region.nz);
            check_coordinate(values[0], region.y_at(iy), region.dy(), line, "y_m")?;
            check_coordinate(values[1], region.z_at(iz), region.dz(), line, "z_m")?;
        }
        samples.push(FieldSample {
            b_rho: values[2],
            b_z: values[3],
            b_mag: values[4],
        });
    }
    if samples.len() != expected {
        return Err(PersistError::RowCount {
            expected,
            found: samples.len(),
        });
    }
    Ok(FieldGrid::new(*region, samples))
}

fn check_coordinate(found: f64, expected: f64, step: f64, line: u64, column: &str) -> Result<(), PersistError> {
    let tolerance = (1e-3 * step).max(1e-8 * expected.abs());
    if (found - expected).abs() > tolerance {
        return Err(PersistError::Table {
            line,
            message: format!("{column} = {found} does not match the lattice value {expected}"),
        });
    }
    Ok(())
}

pub fn save_results(results: &ResultsDocument) -> Vec<u8> {
    let wire = ResultsWire {
        format_version: FORMAT_VERSION,
        project: results.project.clone(),
        electrical: results.electrical.clone(),
        homogeneity: results.homogeneity.clone(),
        field_table: format_field_table(&results.grid),
    };
    let mut out = serde_json::to_vec_pretty(&wire).expect("results documents always serialize");
    out.push(b'\n');
    out
}

pub fn load_results(bytes: &[u8]) -> Result<ResultsDocument, PersistError> {
    check_version(bytes)?;
    let wire: ResultsWire = parse_json(bytes)?;
    let violations = wire.project.validate();
    if !violations.is_empty() {
        return Err(PersistError::Validation(
            violations
                .into_iter()
                .map(|mut v| {
                    v.path = format!("project.{}", v.path);
                    v
                })
                .collect(),
        ));
    }
    let grid = parse_field_table(&wire.field_table, &wire.project.region())?;
    Ok(ResultsDocument {
        project: wire.project,
        grid,
        electrical: wire.electrical,
        homogeneity: wire.homogeneity,
    })
}

/// Externally measured field samples, in field-table layout, as a grid the
/// homogeneity analysis accepts like a simulated one.
pub fn import_measurements(bytes: &[u8], region: &SimulationRegion) -> Result<FieldGrid, PersistError> {
    let text = std::str::from_utf8(bytes).map_err(|e| PersistError::Table {
        line: 0,
        message: format!("measurement file is not UTF-8: {e}"),
    })?;
    parse_field_table(text, region)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coil::{default_region, make_preset};
    use crate::electrical::electrical_report;
    use crate::field::simulate_grid;
    use crate::homogeneity::homogeneity_map;
    use crate::persistence::HomogeneitySettings;

    fn tiny_region() -> SimulationRegion {
        SimulationRegion {
            y_min: -0.1,
            y_max: 0.1,
            z_min: 0.0,
            z_max: 0.2,
            ny: 2,
            nz: 2,
        }
    }

    fn tiny_results() -> ResultsDocument {
        let sys = make_preset("helmholtz", 0.5, 100, 1.0).unwrap();
        let region = tiny_region();
        let grid = simulate_grid(&sys, &region, &|_| {}).unwrap();
        ResultsDocument {
            project: ProjectDocument::new(&sys, &region, HomogeneitySettings::default()),
            grid,
            electrical: electrical_report(&sys).ok(),
            homogeneity: None,
        }
    }

    #[test]
    fn table_rows_are_iy_major() {
        let text = format_field_table(&tiny_results().grid);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], FIELD_TABLE_HEADER);
        assert!(lines[1].starts_with("-1.00000000e-1,0.00000000e0,"));
        assert!(lines[2].starts_with("-1.00000000e-1,2.00000000e-1,"));
        assert!(lines[3].starts_with("1.00000000e-1,0.00000000e0,"));
    }

    #[test]
    fn truncated_table_is_a_row_count_error() {
        let results = tiny_results();
        let text = format_field_table(&results.grid);
        let cut: String = text.lines().take(4).map(|l| format!("{l}\n")).collect();
        assert_eq!(
            parse_field_table(&cut, &tiny_region()),
            Err(PersistError::RowCount { expected: 4, found: 3 })
        );
        let extra = format!("{text}{}\n", text.lines().nth(4).unwrap());
        assert!(matches!(
            parse_field_table(&extra, &tiny_region()),
            Err(PersistError::RowCount { expected: 4, found: 5 })
        ));
    }

    #[test]
    fn non_numeric_cell_is_reported_with_line() {
        let text = format_field_table(&tiny_results().grid).replacen(",0.00000000e0,", ",zero,", 1);
        assert!(matches!(
            parse_field_table(&text, &tiny_region()),
            Err(PersistError::Table { line: 2, .. })
        ));
    }

    #[test]
    fn missing_magnitude_column_is_a_parse_error() {
        let text: String = format_field_table(&tiny_results().grid)
            .lines()
            .map(|l| {
                let cells: Vec<&str> = l.split(',').take(4).collect();
                cells.join(",") + "\n"
            })
            .collect();
        assert!(matches!(
            import_measurements(text.as_bytes(), &tiny_region()),
            Err(PersistError::Table { line: 1, .. })
        ));
    }

    #[test]
    fn misplaced_coordinates_are_rejected() {
        let text = format_field_table(&tiny_results().grid).replacen("-1.00000000e-1", "-9.00000000e-2", 1);
        assert!(matches!(
            parse_field_table(&text, &tiny_region()),
            Err(PersistError::Table { line: 2, .. })
        ));
    }

    #[test]
    fn results_round_trip() {
        let results = tiny_results();
        let bytes = save_results(&results);
        let loaded = load_results(&bytes).unwrap();
        assert_eq!(loaded.project, results.project);
        assert_eq!(loaded.electrical, results.electrical);
        for (a, b) in loaded.grid.samples.iter().zip(&results.grid.samples) {
            assert!((a.b_mag - b.b_mag).abs() <= 5e-9 * b.b_mag);
        }
        assert_eq!(save_results(&loaded), bytes);
    }

    #[test]
    fn uniform_measurements_are_fully_homogeneous() {
        let region = tiny_region();
        let mut text = String::from(FIELD_TABLE_HEADER);
        text.push('\n');
        for iy in 0..2 {
            for iz in 0..2 {
                text.push_str(&format!(
                    "{:e},{:e},0,1.5e-3,1.5e-3\n",
                    region.y_at(iy),
                    region.z_at(iz)
                ));
            }
        }
        let grid = import_measurements(text.as_bytes(), &region).unwrap();
        let map = homogeneity_map(&grid).unwrap();
        assert!(map.h_values.iter().all(|&h| h == 100.0));
    }

    #[test]
    fn non_finite_samples_survive_the_table() {
        let sys = make_preset("helmholtz", 0.5, 100, 1.0).unwrap();
        let region = SimulationRegion {
            y_min: -0.5,
            y_max: 0.5,
            z_min: -0.25,
            z_max: 0.25,
            ny: 3,
            nz: 3,
        };
        let grid = simulate_grid(&sys, &region, &|_| {}).unwrap();
        assert!(!grid.get(0, 0).is_finite());
        let back = parse_field_table(&format_field_table(&grid), &region).unwrap();
        assert!(!back.get(0, 0).is_finite());
        assert!(back.get(1, 1).is_finite());
    }

    #[test]
    fn default_helmholtz_results_have_all_rows() {
        let sys = make_preset("helmholtz", 0.5, 100, 1.0).unwrap();
        let region = default_region(&sys);
        let grid = simulate_grid(&sys, &region, &|_| {}).unwrap();
        assert_eq!(format_field_table(&grid).lines().count(), 101 * 101 + 1);
    }
}
