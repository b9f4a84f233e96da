//! Off-axis flux density of filamentary loops, superposition over a coil
//! system, and lattice fills with progress reporting.
//!
//! For a loop of radius r at axial position Z carrying N·I ampere-turns, with
//! Δ = z − Z, q = (r + ρ)² + Δ² and p = (r − ρ)² + Δ²:
//!
//! ```text
//! B_ρ = μ₀NI·Δ / (2πρ√q) · [ (r² + ρ² + Δ²)/p · E(k) − K(k) ]
//! B_z = μ₀NI   / (2π√q)  · [ (r² − ρ² − Δ²)/p · E(k) + K(k) ]
//! k² = 4rρ / q,  k'² = p / q
//! ```

use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::coil::{validate_system, Coil, CoilSystem, SimulationRegion, Violation};
use crate::elliptic::complete_elliptic_pair_complementary;

/// Vacuum permeability, T·m/A.
pub const MU_0: f64 = 4.0 * PI * 1e-7;

/// Below this radial distance the on-axis closed form is used.
pub const ON_AXIS_RHO: f64 = 1e-12;

/// Evaluation points closer than this to a filament are rejected.
pub const WIRE_PROXIMITY: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("evaluation point (rho = {rho}, z = {z}) lies on the wire of coil {coil}")]
    WireProximity { coil: usize, rho: f64, z: f64 },
    #[error("invalid coil system: {}", join_violations(.0))]
    InvalidSystem(Vec<Violation>),
    #[error("invalid simulation region: {}", join_violations(.0))]
    InvalidRegion(Vec<Violation>),
    #[error("remaining time is undefined before the first row completes")]
    UndefinedProgress,
}

pub(crate) fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

/// Flux density at one point of the y–z plane. In planar samples `b_rho`
/// holds the signed y component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub b_rho: f64,
    pub b_z: f64,
    pub b_mag: f64,
}

impl FieldSample {
    /// Marker for lattice points that coincide with a filament.
    pub const NON_FINITE: FieldSample = FieldSample {
        b_rho: f64::NAN,
        b_z: f64::NAN,
        b_mag: f64::NAN,
    };

    pub fn new(b_rho: f64, b_z: f64) -> Self {
        Self {
            b_rho,
            b_z,
            b_mag: b_rho.hypot(b_z),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.b_rho.is_finite() && self.b_z.is_finite() && self.b_mag.is_finite()
    }

    /// Bitwise equality, treating identical NaN payloads as equal.
    pub fn bit_eq(&self, other: &FieldSample) -> bool {
        self.b_rho.to_bits() == other.b_rho.to_bits()
            && self.b_z.to_bits() == other.b_z.to_bits()
            && self.b_mag.to_bits() == other.b_mag.to_bits()
    }
}

/// Row-major samples: index `iy * nz + iz`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub region: SimulationRegion,
    pub samples: Vec<FieldSample>,
}

impl FieldGrid {
    pub fn new(region: SimulationRegion, samples: Vec<FieldSample>) -> Self {
        assert_eq!(samples.len(), region.len(), "sample count must equal ny * nz");
        Self { region, samples }
    }

    pub fn get(&self, iy: usize, iz: usize) -> &FieldSample {
        &self.samples[iy * self.region.nz + iz]
    }

    pub fn row(&self, iy: usize) -> &[FieldSample] {
        let nz = self.region.nz;
        &self.samples[iy * nz..(iy + 1) * nz]
    }

    pub fn center(&self) -> &FieldSample {
        let (iy, iz) = self.region.center_index();
        self.get(iy, iz)
    }

    /// Sample at the lattice point nearest to (y, z), with that point's
    /// coordinates.
    pub fn nearest(&self, y: f64, z: f64) -> (f64, f64, &FieldSample) {
        let iy = self.region.nearest_iy(y);
        let iz = self.region.nearest_iz(z);
        (self.region.y_at(iy), self.region.z_at(iz), self.get(iy, iz))
    }

    pub fn bit_eq(&self, other: &FieldGrid) -> bool {
        self.region == other.region
            && self.samples.len() == other.samples.len()
            && self.samples.iter().zip(&other.samples).all(|(a, b)| a.bit_eq(b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProgressEvent {
    /// Rows completed so far, including this one.
    pub done: usize,
    pub total: usize,
    /// Seconds since the fill started.
    pub elapsed: f64,
}

impl ProgressEvent {
    pub fn remaining(&self) -> Option<f64> {
        estimate_remaining(self.elapsed, self.done, self.total).ok()
    }
}

/// Linear extrapolation of the time left: `elapsed · (total − done) / done`.
pub fn estimate_remaining(elapsed: f64, done: usize, total: usize) -> Result<f64, FieldError> {
    if done == 0 {
        return Err(FieldError::UndefinedProgress);
    }
    Ok(elapsed * total.saturating_sub(done) as f64 / done as f64)
}

/// Field of a single coil at cylindrical coordinates (ρ, z).
pub fn field_single_coil(coil: &Coil, rho: f64, z: f64) -> Result<FieldSample, FieldError> {
    let r = coil.radius;
    let dz = z - coil.z_position;
    let dz2 = dz * dz;
    let wire_dist2 = (r - rho) * (r - rho) + dz2;
    if wire_dist2.is_nan() || wire_dist2 <= WIRE_PROXIMITY * WIRE_PROXIMITY {
        return Err(FieldError::WireProximity { coil: 0, rho, z });
    }
    let nia = coil.ampere_turns();

    if rho < ON_AXIS_RHO {
        let s = r * r + dz2;
        let b_z = MU_0 * nia * r * r / (2.0 * s * s.sqrt());
        return Ok(FieldSample::new(0.0, b_z));
    }

    let q = (r + rho) * (r + rho) + dz2;
    let sqrt_q = q.sqrt();
    let k_prime = (wire_dist2 / q).sqrt();
    let ell =
        complete_elliptic_pair_complementary(k_prime).map_err(|_| FieldError::WireProximity { coil: 0, rho, z })?;

    let pre = MU_0 * nia / (2.0 * PI * sqrt_q);
    let b_rho = pre * dz / rho * ((r * r + rho * rho + dz2) / wire_dist2 * ell.e_second - ell.k_first);
    let b_z = pre * ((r * r - rho * rho - dz2) / wire_dist2 * ell.e_second + ell.k_first);
    Ok(FieldSample::new(b_rho, b_z))
}

/// Superposed field of every coil at planar point (y, z). The radial
/// component is returned as the signed y component.
pub fn field_at_point(system: &CoilSystem, y: f64, z: f64) -> Result<FieldSample, FieldError> {
    let rho = y.abs();
    let mut b_rho = 0.0;
    let mut b_z = 0.0;
    for (index, coil) in system.coils.iter().enumerate() {
        let s = field_single_coil(coil, rho, z).map_err(|e| match e {
            FieldError::WireProximity { rho, z, .. } => FieldError::WireProximity { coil: index, rho, z },
            other => other,
        })?;
        b_rho += s.b_rho;
        b_z += s.b_z;
    }
    let sign = if y > 0.0 {
        1.0
    } else if y < 0.0 {
        -1.0
    } else {
        0.0
    };
    Ok(FieldSample::new(sign * b_rho, b_z))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GridOptions {
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

/// Fill the region's lattice, reporting progress once per completed row.
pub fn simulate_grid(
    system: &CoilSystem,
    region: &SimulationRegion,
    progress: &(dyn Fn(ProgressEvent) + Sync),
) -> Result<FieldGrid, FieldError> {
    simulate_grid_with(system, region, GridOptions::default(), progress)
}

pub fn simulate_grid_with(
    system: &CoilSystem,
    region: &SimulationRegion,
    options: GridOptions,
    progress: &(dyn Fn(ProgressEvent) + Sync),
) -> Result<FieldGrid, FieldError> {
    let violations = validate_system(system);
    if !violations.is_empty() {
        return Err(FieldError::InvalidSystem(violations));
    }
    let violations = region.validate();
    if !violations.is_empty() {
        return Err(FieldError::InvalidRegion(violations));
    }

    let fill = || fill_rows(system, region, progress);
    let samples = match options.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("failed to build worker pool")
            .install(fill),
        None => fill(),
    };
    Ok(FieldGrid::new(*region, samples))
}

fn fill_rows(
    system: &CoilSystem,
    region: &SimulationRegion,
    progress: &(dyn Fn(ProgressEvent) + Sync),
) -> Vec<FieldSample> {
    let start = Instant::now();
    let done = AtomicUsize::new(0);
    let rows: Vec<Vec<FieldSample>> = (0..region.ny)
        .into_par_iter()
        .map(|iy| {
            let y = region.y_at(iy);
            let row = (0..region.nz)
                .map(|iz| field_at_point(system, y, region.z_at(iz)).unwrap_or(FieldSample::NON_FINITE))
                .collect();
            let finished = done.fetch_add(1, Ordering::SeqCst) + 1;
            progress(ProgressEvent {
                done: finished,
                total: region.ny,
                elapsed: start.elapsed().as_secs_f64(),
            });
            row
        })
        .collect();
    rows.into_iter().flatten().collect()
}
