use serde::{Deserialize, Serialize};

use super::{check_version, parse_json, DocViolation, PersistError, FORMAT_VERSION};
use crate::coil::{validate_system, Coil, CoilField, CoilSystem, FieldPath, RegionField, SimulationRegion};
use crate::homogeneity::Convention;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoilEntry {
    pub radius_m: f64,
    pub turns: u32,
    pub current_a: f64,
    pub z_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionEntry {
    pub y_min_m: f64,
    pub y_max_m: f64,
    pub z_min_m: f64,
    pub z_max_m: f64,
    pub ny: usize,
    pub nz: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomogeneitySettings {
    pub threshold_percent: f64,
    pub signed_convention: bool,
}

impl Default for HomogeneitySettings {
    fn default() -> Self {
        Self {
            threshold_percent: 97.0,
            signed_convention: false,
        }
    }
}

impl HomogeneitySettings {
    pub fn convention(&self) -> Convention {
        if self.signed_convention {
            Convention::Signed
        } else {
            Convention::Absolute
        }
    }
}

/// Saved simulation inputs (`.coilproj`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectDocument {
    pub format_version: u32,
    pub label: String,
    pub coils: Vec<CoilEntry>,
    pub region: RegionEntry,
    pub homogeneity: HomogeneitySettings,
}

impl ProjectDocument {
    pub fn new(system: &CoilSystem, region: &SimulationRegion, homogeneity: HomogeneitySettings) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            label: system.label.clone(),
            coils: system
                .coils
                .iter()
                .map(|c| CoilEntry {
                    radius_m: c.radius,
                    turns: c.turns,
                    current_a: c.current,
                    z_m: c.z_position,
                })
                .collect(),
            region: RegionEntry {
                y_min_m: region.y_min,
                y_max_m: region.y_max,
                z_min_m: region.z_min,
                z_max_m: region.z_max,
                ny: region.ny,
                nz: region.nz,
            },
            homogeneity,
        }
    }

    pub fn system(&self) -> CoilSystem {
        CoilSystem::new(
            self.label.clone(),
            self.coils
                .iter()
                .map(|c| Coil::new(c.radius_m, c.turns, c.current_a, c.z_m))
                .collect(),
        )
    }

    pub fn region(&self) -> SimulationRegion {
        let r = &self.region;
        SimulationRegion {
            y_min: r.y_min_m,
            y_max: r.y_max_m,
            z_min: r.z_min_m,
            z_max: r.z_max_m,
            ny: r.ny,
            nz: r.nz,
        }
    }

    /// Every invariant violation, addressed by document path.
    pub fn validate(&self) -> Vec<DocViolation> {
        let mut out: Vec<DocViolation> = validate_system(&self.system())
            .into_iter()
            .chain(self.region().validate())
            .map(|v| DocViolation {
                path: document_path(v.path),
                message: v.message,
            })
            .collect();
        let t = self.homogeneity.threshold_percent;
        if !(t > 0.0 && t <= 100.0) {
            out.push(DocViolation {
                path: "homogeneity.threshold_percent".into(),
                message: format!("threshold must lie in (0, 100], got {t}"),
            });
        }
        if self.format_version != FORMAT_VERSION {
            out.push(DocViolation {
                path: "format_version".into(),
                message: format!("expected {FORMAT_VERSION}"),
            });
        }
        out
    }
}

fn document_path(path: FieldPath) -> String {
    match path {
        FieldPath::Coils => "coils".into(),
        FieldPath::Coil { index, field } => {
            let name = match field {
                CoilField::Radius => "radius_m",
                CoilField::Turns => "turns",
                CoilField::Current => "current_a",
                CoilField::ZPosition => "z_m",
            };
            format!("coils[{index}].{name}")
        }
        FieldPath::Region(field) => {
            let name = match field {
                RegionField::YRange => "y_min_m",
                RegionField::ZRange => "z_min_m",
                RegionField::Ny => "ny",
                RegionField::Nz => "nz",
            };
            format!("region.{name}")
        }
    }
}

pub fn save_project(doc: &ProjectDocument) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(doc).expect("project documents always serialize");
    out.push(b'\n');
    out
}

pub fn load_project(bytes: &[u8]) -> Result<ProjectDocument, PersistError> {
    check_version(bytes)?;
    let doc: ProjectDocument = parse_json(bytes)?;
    let violations = doc.validate();
    if !violations.is_empty() {
        return Err(PersistError::Validation(violations));
    }
    Ok(doc)
}
