//! AWG wire selection and per-coil electrical build parameters.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coil::CoilSystem;

/// Copper resistivity at 20 °C, Ω·m.
pub const COPPER_RESISTIVITY: f64 = 1.68e-8;

pub const MAX_GAUGE: u32 = 40;

/// Chassis-wiring ampacity in amperes, indexed by gauge 0..=40.
///
/// Values follow the widely reproduced "maximum amps for chassis wiring"
/// column of the PowerStream AWG table (single conductor in free air).
pub const AMPACITY_TABLE: [f64; 41] = [
    245.0, 211.0, 181.0, 158.0, 135.0, 118.0, 101.0, 89.0, 73.0, 64.0, // 0-9
    55.0, 47.0, 41.0, 35.0, 32.0, 28.0, 22.0, 19.0, 16.0, 14.0, // 10-19
    11.0, 9.0, 7.0, 4.7, 3.5, 2.7, 2.2, 1.7, 1.4, 1.2, // 20-29
    0.86, 0.7, 0.53, 0.43, 0.33, 0.27, 0.21, 0.17, 0.13, 0.11, // 30-39
    0.09, // 40
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ElectricalError {
    #[error("AWG gauge {0} outside the supported range 0..=40")]
    GaugeRange(i64),
    #[error("current {0} A must be positive and finite")]
    BadCurrent(f64),
    #[error("current {0} A exceeds the ampacity of AWG 0 ({max} A)", max = AMPACITY_TABLE[0])]
    OverCapacity(f64),
    #[error("coil {index}: {source}")]
    Coil {
        index: usize,
        #[source]
        source: Box<ElectricalError>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireSpec {
    pub awg: u32,
    /// Bare conductor diameter, meters.
    pub diameter: f64,
    pub resistance_per_meter: f64,
    pub ampacity: f64,
}

/// `d = 0.127 mm × 92^((36 − n)/39)`.
pub fn awg_diameter(gauge: i64) -> Result<f64, ElectricalError> {
    if !(0..=MAX_GAUGE as i64).contains(&gauge) {
        return Err(ElectricalError::GaugeRange(gauge));
    }
    Ok(0.000127 * 92f64.powf((36 - gauge) as f64 / 39.0))
}

pub fn wire_spec(gauge: u32) -> Result<WireSpec, ElectricalError> {
    let diameter = awg_diameter(gauge as i64)?;
    let area = PI * diameter * diameter / 4.0;
    Ok(WireSpec {
        awg: gauge,
        diameter,
        resistance_per_meter: COPPER_RESISTIVITY / area,
        ampacity: AMPACITY_TABLE[gauge as usize],
    })
}

/// Thinnest gauge whose ampacity covers `|current|`.
pub fn select_gauge(current: f64) -> Result<WireSpec, ElectricalError> {
    let amps = current.abs();
    if !(amps.is_finite() && amps > 0.0) {
        return Err(ElectricalError::BadCurrent(current));
    }
    let gauge = (0..=MAX_GAUGE)
        .rev()
        .find(|&g| AMPACITY_TABLE[g as usize] >= amps)
        .ok_or(ElectricalError::OverCapacity(current))?;
    wire_spec(gauge)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoilElectrical {
    pub wire: WireSpec,
    pub wire_length: f64,
    pub resistance: f64,
    pub voltage: f64,
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElectricalReport {
    pub coils: Vec<CoilElectrical>,
    pub total_wire_length: f64,
    pub total_resistance: f64,
    pub total_power: f64,
}

pub fn electrical_report(system: &CoilSystem) -> Result<ElectricalReport, ElectricalError> {
    let coils = system
        .coils
        .iter()
        .enumerate()
        .map(|(index, coil)| {
            let wire = select_gauge(coil.current).map_err(|e| ElectricalError::Coil {
                index,
                source: Box::new(e),
            })?;
            let wire_length = coil.turns as f64 * 2.0 * PI * coil.radius;
            let resistance = wire_length * wire.resistance_per_meter;
            Ok(CoilElectrical {
                wire,
                wire_length,
                resistance,
                voltage: coil.current * resistance,
                power: coil.current * coil.current * resistance,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ElectricalReport {
        total_wire_length: coils.iter().map(|c| c.wire_length).sum(),
        total_resistance: coils.iter().map(|c| c.resistance).sum(),
        total_power: coils.iter().map(|c| c.power).sum(),
        coils,
    })
}
