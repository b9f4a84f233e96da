//! Project and results documents, the field table, measurement import and
//! SVG heatmaps.
//!
//! Projects (`.coilproj`) and results (`.coilres`) are JSON. Results embed the
//! sampled field as a comma-separated table under `field_table`:
//!
//! ```text
//! y_m,z_m,B_rho_T,B_z_T,B_mag_T
//! -5.50000000e-1,-5.50000000e-1,...
//! ```
//!
//! rows ordered by `iy` then `iz`, every value in scientific notation with
//! nine significant digits.

mod colormap;
mod heatmap;
mod project;
mod results;

use std::fmt;

use thiserror::Error;

pub use colormap::{colormap, Colormap, COLORMAPS};
pub use heatmap::{render_heatmap, render_homogeneity, ColorLimits, HeatmapOptions};
pub use project::{load_project, save_project, CoilEntry, HomogeneitySettings, ProjectDocument, RegionEntry};
pub use results::{
    format_field_table, import_measurements, load_results, parse_field_table, save_results, ResultsDocument,
    FIELD_TABLE_HEADER,
};

pub const FORMAT_VERSION: u32 = 1;
pub const PROJECT_EXTENSION: &str = "coilproj";
pub const RESULTS_EXTENSION: &str = "coilres";

/// One invalid value in a document, addressed by its JSON path.
#[derive(Debug, Clone, PartialEq)]
pub struct DocViolation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for DocViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PersistError {
    #[error("parse error at {path} (line {line}, column {column}): {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported format_version {0} (this build reads version {FORMAT_VERSION})")]
    UnsupportedVersion(u64),
    #[error("invalid document: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Validation(Vec<DocViolation>),
    #[error("field table line {line}: {message}")]
    Table { line: u64, message: String },
    #[error("field table has {found} data rows but the region declares {expected}")]
    RowCount { expected: usize, found: usize },
    #[error("invalid color limits [{min}, {max}]: need finite bmin < bmax")]
    InvalidLimits { min: f64, max: f64 },
    #[error("unknown colormap '{0}'")]
    UnknownColormap(String),
}

impl PersistError {
    /// JSON path of the first offending value, when one is known.
    pub fn field_path(&self) -> Option<String> {
        match self {
            PersistError::Parse { path, .. } if !path.is_empty() && path != "." => Some(path.clone()),
            PersistError::Validation(v) => v.first().map(|v| v.path.clone()),
            PersistError::UnsupportedVersion(_) => Some("format_version".into()),
            _ => None,
        }
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(bytes: &[u8]) -> Result<T, PersistError> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        PersistError::Parse {
            path,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    de.end().map_err(|e| PersistError::Parse {
        path: String::new(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ok(value)
}

/// Reject documents from other format versions before schema parsing so the
/// caller sees a version error rather than a field mismatch.
fn check_version(bytes: &[u8]) -> Result<(), PersistError> {
    #[derive(serde::Deserialize)]
    struct Probe {
        format_version: Option<serde_json::Value>,
    }
    if let Ok(Probe {
        format_version: Some(v),
    }) = serde_json::from_slice::<Probe>(bytes)
    {
        match v.as_u64() {
            Some(n) if n == FORMAT_VERSION as u64 => {}
            Some(n) => return Err(PersistError::UnsupportedVersion(n)),
            None => {}
        }
    }
    Ok(())
}
