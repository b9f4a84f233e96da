use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::Mutex;

use coilfield::electrical::electrical_report;
use coilfield::field::FieldError;
use coilfield::homogeneity::{analyze, Convention, HomogeneityError, VolumeShape};
use coilfield::persistence::{
    load_project, load_results, render_heatmap, render_homogeneity, save_project, save_results, ColorLimits,
    HeatmapOptions, HomogeneitySettings, PersistError, ProjectDocument, ResultsDocument, FIELD_TABLE_HEADER,
};
use coilfield::{default_region, make_preset, simulate_grid, FieldGrid, Preset, ProgressEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Io,
    Numeric,
}

impl ErrorKind {
    pub fn code(self) -> u8 {
        match self {
            ErrorKind::Validation => 1,
            ErrorKind::Io => 2,
            ErrorKind::Numeric => 3,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    fn validation(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Validation,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<PersistError> for CliError {
    fn from(e: PersistError) -> Self {
        Self::validation(e.to_string())
    }
}

impl From<HomogeneityError> for CliError {
    fn from(e: HomogeneityError) -> Self {
        let kind = match e {
            HomogeneityError::Threshold(_) => ErrorKind::Validation,
            _ => ErrorKind::Numeric,
        };
        Self {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        let kind = match e {
            FieldError::InvalidSystem(_) | FieldError::InvalidRegion(_) => ErrorKind::Validation,
            _ => ErrorKind::Numeric,
        };
        Self {
            kind,
            message: e.to_string(),
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError {
        kind: ErrorKind::Io,
        message: format!("cannot read {}: {e}", path.display()),
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError {
        kind: ErrorKind::Io,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn read_results(path: &Path) -> Result<ResultsDocument, CliError> {
    load_results(&read(path)?).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

pub fn presets_list() -> Result<(), CliError> {
    for p in Preset::ALL {
        println!("{}", p.name());
    }
    Ok(())
}

pub fn preset(name: &str, radius: f64, turns: u32, current: f64, out: &Path) -> Result<(), CliError> {
    let system = make_preset(name, radius, turns, current).map_err(|e| CliError::validation(e.to_string()))?;
    let doc = ProjectDocument::new(&system, &default_region(&system), HomogeneitySettings::default());
    let violations = doc.validate();
    if let Some(v) = violations.first() {
        return Err(CliError::validation(v.to_string()));
    }
    write(out, &save_project(&doc))?;
    println!("wrote {} ({} coils)", out.display(), system.coils.len());
    Ok(())
}

pub fn simulate(project: &Path, out: &Path, progress: bool) -> Result<(), CliError> {
    let doc = load_project(&read(project)?).map_err(|e| CliError::validation(format!("{}: {e}", project.display())))?;
    let system = doc.system();
    let region = doc.region();
    // rows finish out of order across workers; only report forward progress
    let printed = Mutex::new(0usize);
    let report = |event: ProgressEvent| {
        if !progress {
            return;
        }
        let mut last = printed.lock().unwrap_or_else(|p| p.into_inner());
        if event.done > *last {
            *last = event.done;
            let eta = event.remaining().unwrap_or(0.0);
            println!("row {}/{} eta {eta:.1}s", event.done, event.total);
        }
    };
    let grid = simulate_grid(&system, &region, &report)?;
    let non_finite = grid.samples.iter().filter(|s| !s.is_finite()).count();
    if non_finite > 0 {
        log::warn!("{non_finite} samples lie on a coil wire and are stored as NaN");
    }
    let electrical = match electrical_report(&system) {
        Ok(r) => Some(r),
        Err(e) => {
            log::warn!("electrical report omitted: {e}");
            None
        }
    };
    let results = ResultsDocument {
        project: doc,
        grid,
        electrical,
        homogeneity: None,
    };
    write(out, &save_results(&results))?;
    println!("wrote {} ({} x {} samples)", out.display(), region.ny, region.nz);
    Ok(())
}

pub fn homogeneity(
    results: &Path,
    threshold: f64,
    signed: bool,
    out: &Path,
    svg: Option<&Path>,
) -> Result<(), CliError> {
    if !(threshold > 0.0 && threshold <= 100.0) {
        return Err(HomogeneityError::Threshold(threshold).into());
    }
    let mut doc = read_results(results)?;
    let convention = if signed {
        Convention::Signed
    } else {
        Convention::Absolute
    };
    let (map, mask, report) = analyze(&doc.grid, threshold, convention)?;

    println!("reference |B| = {:.6e} T", report.b_center_t);
    println!(
        "homogeneous samples: {} of {}",
        report.homogeneous_cells,
        mask.cells.len()
    );
    match (&report.square, &report.volume) {
        (Some(sq), Some(v)) => {
            println!(
                "inscribed square: side {:.6e} m ({} cells), y [{:.6e}, {:.6e}] m, z [{:.6e}, {:.6e}] m",
                sq.side_m,
                sq.side_cells,
                sq.y_extent().0,
                sq.y_extent().1,
                sq.z_extent().0,
                sq.z_extent().1
            );
            let shape = match v.shape {
                VolumeShape::Cylinder => "cylinder",
                VolumeShape::Annulus => "annulus",
            };
            println!(
                "volume: {shape}, height {:.6e} m, outer radius {:.6e} m, inner radius {:.6e} m, volume {:.6e} m^3, centroid z {:.6e} m",
                v.height, v.outer_radius, v.inner_radius, v.volume, v.centroid_z
            );
        }
        _ => println!("{}", report.empty_reason.as_deref().unwrap_or("no inscribed square")),
    }

    if let Some(svg) = svg {
        let picture = render_homogeneity(&map, &mask, threshold, report.square.as_ref(), "viridis")?;
        write(svg, picture.as_bytes())?;
    }
    doc.project.homogeneity = HomogeneitySettings {
        threshold_percent: threshold,
        signed_convention: signed,
    };
    doc.homogeneity = Some(report);
    write(out, &save_results(&doc))?;
    Ok(())
}

pub fn render(
    results: &Path,
    svg: &Path,
    limits: Option<(f64, f64)>,
    colormap: &str,
    show_coils: bool,
) -> Result<(), CliError> {
    let doc = read_results(results)?;
    let options = HeatmapOptions {
        limits: limits.map_or(ColorLimits::Auto, |(min, max)| ColorLimits::Fixed { min, max }),
        colormap: colormap.to_string(),
        show_coils,
    };
    let picture = render_heatmap(&doc.grid, Some(&doc.project.system()), &options)?;
    write(svg, picture.as_bytes())?;
    Ok(())
}

fn inside(grid: &FieldGrid, y: f64, z: f64) -> bool {
    let r = &grid.region;
    let (hy, hz) = (0.5 * r.dy(), 0.5 * r.dz());
    y >= r.y_min - hy && y <= r.y_max + hy && z >= r.z_min - hz && z <= r.z_max + hz
}

pub fn probe(results: &Path, y: f64, z: f64) -> Result<(), CliError> {
    let doc = read_results(results)?;
    if !(y.is_finite() && z.is_finite() && inside(&doc.grid, y, z)) {
        return Err(CliError::validation(format!(
            "point ({y}, {z}) lies outside the simulated region"
        )));
    }
    let (py, pz, s) = doc.grid.nearest(y, z);
    println!("y = {py:.6e} m, z = {pz:.6e} m");
    println!("|B| = {:.6e} T ({:.4} mT)", s.b_mag, s.b_mag * 1e3);
    println!("B_rho = {:.6e} T, B_z = {:.6e} T", s.b_rho, s.b_z);
    Ok(())
}

pub fn axis_profile(results: &Path, out: &Path) -> Result<(), CliError> {
    let doc = read_results(results)?;
    let region = doc.grid.region;
    if !(region.y_min <= 0.0 && region.y_max >= 0.0) {
        return Err(CliError::validation(
            "the simulated region does not contain the axis y = 0",
        ));
    }
    let iy = region.nearest_iy(0.0);
    let y = region.y_at(iy);
    if y != 0.0 {
        log::warn!("no lattice row on the axis; using the nearest row at y = {y:e} m");
    }
    let mut table = String::from(FIELD_TABLE_HEADER);
    table.push('\n');
    for (iz, sample) in doc.grid.row(iy).iter().enumerate() {
        table.push_str(&format!(
            "{y:.8e},{:.8e},{:.8e},{:.8e},{:.8e}\n",
            region.z_at(iz),
            sample.b_rho,
            sample.b_z,
            sample.b_mag
        ));
    }
    write(out, table.as_bytes())?;
    println!("wrote {} ({} samples at y = {y:e} m)", out.display(), region.nz);
    Ok(())
}
