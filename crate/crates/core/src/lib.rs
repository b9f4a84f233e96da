//! Field simulation and homogeneity analysis for coaxial circular coil
//! systems.
//!
//! The pipeline is: build a [`CoilSystem`] (by hand or from a [`Preset`]),
//! sample its flux density over a [`SimulationRegion`] with
//! [`simulate_grid`], then threshold the result with
//! [`homogeneity::analyze`] to get the work region, the largest inscribed
//! square and the experimentation volume.

pub mod coil;
pub mod electrical;
pub mod elliptic;
pub mod field;
pub mod homogeneity;
pub mod persistence;

pub use coil::{default_region, make_preset, validate_system, Coil, CoilSystem, Preset, SimulationRegion};
pub use field::{
    estimate_remaining, field_at_point, field_single_coil, simulate_grid, simulate_grid_with, FieldGrid, FieldSample,
    GridOptions, ProgressEvent, MU_0,
};
