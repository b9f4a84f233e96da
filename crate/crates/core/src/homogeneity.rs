//! Homogeneity map, work-region mask, largest inscribed square and the
//! experimentation volume obtained by revolving that square about the axis.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coil::SimulationRegion;
use crate::field::FieldGrid;

/// Smallest usable reference magnitude, tesla.
pub const MIN_REFERENCE_FIELD: f64 = 1e-15;

/// Relative spacing mismatch below which lattice cells count as square.
pub const SQUARE_CELL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HomogeneityError {
    #[error("reference field at the region center is {0:e} T; homogeneity is undefined for a null center field")]
    ZeroReference(f64),
    #[error("homogeneity threshold must lie in (0, 100], got {0}")]
    Threshold(f64),
    #[error("the inscribed square is empty")]
    EmptySquare,
}

/// How the deviation from the reference enters `h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `h = (1 − |B − B₀| / B₀)·100`; never exceeds 100.
    #[default]
    Absolute,
    /// `h = (1 − (B − B₀) / B₀)·100`; points weaker than the reference exceed 100.
    Signed,
}

/// Homogeneity in percent for every lattice sample.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneityMap {
    pub region: SimulationRegion,
    /// Row-major `ny × nz`; non-finite samples carry `-inf`.
    pub h_values: Vec<f64>,
    /// |B| at the sample nearest the region center, tesla.
    pub b_center: f64,
    pub convention: Convention,
}

impl HomogeneityMap {
    pub fn get(&self, iy: usize, iz: usize) -> f64 {
        self.h_values[iy * self.region.nz + iz]
    }

    pub fn bit_eq(&self, other: &HomogeneityMap) -> bool {
        self.region == other.region
            && self.b_center.to_bits() == other.b_center.to_bits()
            && self.convention == other.convention
            && self.h_values.len() == other.h_values.len()
            && self
                .h_values
                .iter()
                .zip(&other.h_values)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

pub fn homogeneity_map(grid: &FieldGrid) -> Result<HomogeneityMap, HomogeneityError> {
    homogeneity_map_with(grid, Convention::Absolute)
}

pub fn homogeneity_map_with(grid: &FieldGrid, convention: Convention) -> Result<HomogeneityMap, HomogeneityError> {
    let b0 = grid.center().b_mag;
    if !(b0.is_finite() && b0 > MIN_REFERENCE_FIELD) {
        return Err(HomogeneityError::ZeroReference(b0));
    }
    let h_values = grid
        .samples
        .iter()
        .map(|s| {
            if !s.is_finite() {
                return f64::NEG_INFINITY;
            }
            let deviation = match convention {
                Convention::Absolute => (s.b_mag - b0).abs(),
                Convention::Signed => s.b_mag - b0,
            };
            (1.0 - deviation / b0) * 100.0
        })
        .collect();
    Ok(HomogeneityMap {
        region: grid.region,
        h_values,
        b_center: b0,
        convention,
    })
}

/// Boolean lattice over a region, row-major like the field grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    pub ny: usize,
    pub nz: usize,
    pub cells: Vec<bool>,
}

impl Mask {
    pub fn new(ny: usize, nz: usize, cells: Vec<bool>) -> Self {
        assert_eq!(cells.len(), ny * nz, "mask size must equal ny * nz");
        Self { ny, nz, cells }
    }

    pub fn get(&self, iy: usize, iz: usize) -> bool {
        self.cells[iy * self.nz + iz]
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn is_subset_of(&self, other: &Mask) -> bool {
        self.ny == other.ny && self.nz == other.nz && self.cells.iter().zip(&other.cells).all(|(&a, &b)| !a || b)
    }

    /// Run lengths per row, alternating false/true and always starting with
    /// a (possibly zero) false run.
    pub fn run_lengths(&self) -> MaskRle {
        let rows = self
            .cells
            .chunks(self.nz.max(1))
            .map(|row| {
                let mut runs = Vec::new();
                let mut current = false;
                let mut len = 0;
                for &cell in row {
                    if cell == current {
                        len += 1;
                    } else {
                        runs.push(len);
                        current = cell;
                        len = 1;
                    }
                }
                runs.push(len);
                runs
            })
            .collect();
        MaskRle {
            ny: self.ny,
            nz: self.nz,
            rows,
        }
    }
}

/// Row-wise run-length encoding of a [`Mask`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskRle {
    pub ny: usize,
    pub nz: usize,
    pub rows: Vec<Vec<usize>>,
}

impl MaskRle {
    pub fn decode(&self) -> Option<Mask> {
        if self.rows.len() != self.ny {
            return None;
        }
        let mut cells = Vec::with_capacity(self.ny * self.nz);
        for row in &self.rows {
            let start = cells.len();
            for (i, &len) in row.iter().enumerate() {
                cells.extend(std::iter::repeat_n(i % 2 == 1, len));
            }
            if cells.len() - start != self.nz {
                return None;
            }
        }
        Some(Mask::new(self.ny, self.nz, cells))
    }
}

/// Cells whose homogeneity reaches `threshold` percent.
pub fn homogeneous_mask(map: &HomogeneityMap, threshold: f64) -> Result<Mask, HomogeneityError> {
    if !(threshold > 0.0 && threshold <= 100.0) {
        return Err(HomogeneityError::Threshold(threshold));
    }
    let cells = map.h_values.iter().map(|&h| h.is_finite() && h >= threshold).collect();
    Ok(Mask::new(map.region.ny, map.region.nz, cells))
}

/// Corner and side of the largest all-true square, in lattice cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellSquare {
    pub iy0: usize,
    pub iz0: usize,
    pub side: usize,
}

/// Maximal-square dynamic programme over a row-major boolean lattice.
///
/// Ties resolve to the smallest `iy0`, then the smallest `iz0`.
pub fn largest_square_cells(mask: &Mask) -> Option<CellSquare> {
    let (ny, nz) = (mask.ny, mask.nz);
    // dp value = side of the largest square whose upper corner (largest
    // indices) sits at this cell
    let mut prev = vec![0usize; nz];
    let mut cur = vec![0usize; nz];
    let mut best: Option<CellSquare> = None;

    for iy in 0..ny {
        for iz in 0..nz {
            cur[iz] = if mask.get(iy, iz) {
                if iy == 0 || iz == 0 {
                    1
                } else {
                    1 + prev[iz].min(cur[iz - 1]).min(prev[iz - 1])
                }
            } else {
                0
            };
            let side = cur[iz];
            if side == 0 {
                continue;
            }
            let candidate = CellSquare {
                iy0: iy + 1 - side,
                iz0: iz + 1 - side,
                side,
            };
            best = match best {
                None => Some(candidate),
                Some(b) if side > b.side => Some(candidate),
                Some(b) if side == b.side && (candidate.iy0, candidate.iz0) < (b.iy0, b.iz0) => Some(candidate),
                keep => keep,
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    best
}

/// Largest square of homogeneous cells with its physical placement. Each
/// lattice sample owns the cell of width `dy × dz` centred on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InscribedSquare {
    pub iy0: usize,
    pub iz0: usize,
    pub side_cells: usize,
    /// Lower y edge, meters.
    pub y0: f64,
    /// Lower z edge, meters.
    pub z0: f64,
    pub side_m: f64,
}

impl InscribedSquare {
    pub fn y_extent(&self) -> (f64, f64) {
        (self.y0, self.y0 + self.side_m)
    }

    pub fn z_extent(&self) -> (f64, f64) {
        (self.z0, self.z0 + self.side_m)
    }
}

pub fn largest_inscribed_square(mask: &Mask, region: &SimulationRegion) -> Option<InscribedSquare> {
    let cells = largest_square_cells(mask)?;
    let (dy, dz) = (region.dy(), region.dz());
    if (dy - dz).abs() > SQUARE_CELL_TOLERANCE * dy {
        log::warn!(
            "lattice cells are not square (dy = {dy:e} m, dz = {dz:e} m); \
             searching on the index lattice and reporting the side in cells of the finer axis"
        );
    }
    let cell = dy.min(dz);
    Some(InscribedSquare {
        iy0: cells.iy0,
        iz0: cells.iz0,
        side_cells: cells.side,
        y0: region.y_at(cells.iy0) - 0.5 * dy,
        z0: region.z_at(cells.iz0) - 0.5 * dz,
        side_m: cells.side as f64 * cell,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeShape {
    Cylinder,
    Annulus,
}

/// Solid of revolution swept by the inscribed square around y = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolumeReport {
    pub shape: VolumeShape,
    pub height: f64,
    pub outer_radius: f64,
    pub inner_radius: f64,
    pub volume: f64,
    pub centroid_z: f64,
}

impl VolumeReport {
    /// Volume recomputed from the reported radii and height.
    pub fn recomputed_volume(&self) -> f64 {
        PI * (self.outer_radius * self.outer_radius - self.inner_radius * self.inner_radius) * self.height
    }
}

pub fn experimentation_volume(square: &InscribedSquare) -> Result<VolumeReport, HomogeneityError> {
    if square.side_cells == 0 || square.side_m.is_nan() || square.side_m <= 0.0 {
        return Err(HomogeneityError::EmptySquare);
    }
    let (a, b) = square.y_extent();
    let (z1, z2) = square.z_extent();
    let height = z2 - z1;
    let (shape, inner, outer) = if a <= 0.0 && 0.0 <= b {
        (VolumeShape::Cylinder, 0.0, a.abs().max(b))
    } else {
        (VolumeShape::Annulus, a.abs().min(b.abs()), a.abs().max(b.abs()))
    };
    let volume = PI * (outer * outer - inner * inner) * height;
    Ok(VolumeReport {
        shape,
        height,
        outer_radius: outer,
        inner_radius: inner,
        volume,
        centroid_z: 0.5 * (z1 + z2),
    })
}

/// Threshold analysis of one grid: map reference, mask, square and volume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomogeneityReport {
    pub threshold_percent: f64,
    pub convention: Convention,
    pub b_center_t: f64,
    pub homogeneous_cells: usize,
    pub mask: MaskRle,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub square: Option<InscribedSquare>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<VolumeReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub empty_reason: Option<String>,
}

/// Map, mask, square and volume in one pass.
pub fn analyze(
    grid: &FieldGrid,
    threshold: f64,
    convention: Convention,
) -> Result<(HomogeneityMap, Mask, HomogeneityReport), HomogeneityError> {
    if !(threshold > 0.0 && threshold <= 100.0) {
        return Err(HomogeneityError::Threshold(threshold));
    }
    let map = homogeneity_map_with(grid, convention)?;
    let mask = homogeneous_mask(&map, threshold)?;
    let square = largest_inscribed_square(&mask, &grid.region);
    let volume = square.as_ref().map(experimentation_volume).transpose()?;
    let empty_reason = square
        .is_none()
        .then(|| format!("no sample reaches {threshold}% homogeneity"));
    let report = HomogeneityReport {
        threshold_percent: threshold,
        convention,
        b_center_t: map.b_center,
        homogeneous_cells: mask.count(),
        mask: mask.run_lengths(),
        square,
        volume,
        empty_reason,
    };
    Ok((map, mask, report))
}
