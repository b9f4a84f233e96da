//! Coils, coaxial coil systems, simulation windows and the preset catalog.

use std::fmt;

use thiserror::Error;

/// One circular loop bundle of `turns` ideal filaments lumped at a single
/// radius and axial position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coil {
    /// Loop radius, meters.
    pub radius: f64,
    pub turns: u32,
    /// Signed current per turn, amperes.
    pub current: f64,
    /// Axial position of the loop plane, meters.
    pub z_position: f64,
}

impl Coil {
    pub fn new(radius: f64, turns: u32, current: f64, z_position: f64) -> Self {
        Self {
            radius,
            turns,
            current,
            z_position,
        }
    }

    pub fn ampere_turns(&self) -> f64 {
        self.turns as f64 * self.current
    }
}

/// Ordered collection of coils sharing the z axis.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoilSystem {
    pub label: String,
    pub coils: Vec<Coil>,
}

impl CoilSystem {
    pub fn new(label: impl Into<String>, coils: Vec<Coil>) -> Self {
        Self {
            label: label.into(),
            coils,
        }
    }

    pub fn max_radius(&self) -> f64 {
        self.coils.iter().map(|c| c.radius).fold(0.0, f64::max)
    }

    /// Mean axial position of the coils.
    pub fn axial_centroid(&self) -> f64 {
        if self.coils.is_empty() {
            return 0.0;
        }
        self.coils.iter().map(|c| c.z_position).sum::<f64>() / self.coils.len() as f64
    }

    /// Copy of the system with every current multiplied by `factor`.
    pub fn scaled_current(&self, factor: f64) -> Self {
        let coils = self
            .coils
            .iter()
            .map(|c| Coil {
                current: c.current * factor,
                ..*c
            })
            .collect();
        Self::new(self.label.clone(), coils)
    }
}

/// Rectangular y–z window sampled on an `ny × nz` lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationRegion {
    pub y_min: f64,
    pub y_max: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub ny: usize,
    pub nz: usize,
}

impl SimulationRegion {
    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    pub fn dz(&self) -> f64 {
        (self.z_max - self.z_min) / (self.nz - 1) as f64
    }

    /// Lattice coordinate `y_min + iy·dy`, evaluated as a weighted mean of the
    /// endpoints so that symmetric windows give exactly mirrored coordinates.
    pub fn y_at(&self, iy: usize) -> f64 {
        lerp_index(self.y_min, self.y_max, iy, self.ny)
    }

    pub fn z_at(&self, iz: usize) -> f64 {
        lerp_index(self.z_min, self.z_max, iz, self.nz)
    }

    pub fn len(&self) -> usize {
        self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Lattice index nearest to `y`, clamped to the window. Ties go to the
    /// lower index.
    pub fn nearest_iy(&self, y: f64) -> usize {
        nearest_index(y, self.y_min, self.dy(), self.ny)
    }

    pub fn nearest_iz(&self, z: f64) -> usize {
        nearest_index(z, self.z_min, self.dz(), self.nz)
    }

    /// Sample indices nearest the window's midpoint.
    pub fn center_index(&self) -> (usize, usize) {
        ((self.ny - 1) / 2, (self.nz - 1) / 2)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let finite = |v: f64| v.is_finite();
        if !(finite(self.y_min) && finite(self.y_max) && self.y_min < self.y_max) {
            out.push(Violation::new(
                FieldPath::Region(RegionField::YRange),
                format!("y_min ({}) must be finite and below y_max ({})", self.y_min, self.y_max),
            ));
        }
        if !(finite(self.z_min) && finite(self.z_max) && self.z_min < self.z_max) {
            out.push(Violation::new(
                FieldPath::Region(RegionField::ZRange),
                format!("z_min ({}) must be finite and below z_max ({})", self.z_min, self.z_max),
            ));
        }
        if self.ny < 2 {
            out.push(Violation::new(
                FieldPath::Region(RegionField::Ny),
                format!("ny = {} but at least 2 points are required", self.ny),
            ));
        }
        if self.nz < 2 {
            out.push(Violation::new(
                FieldPath::Region(RegionField::Nz),
                format!("nz = {} but at least 2 points are required", self.nz),
            ));
        }
        out
    }
}

fn lerp_index(min: f64, max: f64, i: usize, n: usize) -> f64 {
    let last = (n - 1) as f64;
    (min * (last - i as f64) + max * i as f64) / last
}

fn nearest_index(v: f64, min: f64, step: f64, n: usize) -> usize {
    let t = (v - min) / step;
    if t.is_nan() || t <= 0.0 {
        return 0;
    }
    // round half down so that exact ties pick the lower sample
    let i = (t - 0.5).ceil() as usize;
    i.min(n - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoilField {
    Radius,
    Turns,
    Current,
    ZPosition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionField {
    YRange,
    ZRange,
    Ny,
    Nz,
}

/// Location of an invalid input value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldPath {
    Coils,
    Coil { index: usize, field: CoilField },
    Region(RegionField),
}

impl fmt::Display for FieldPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldPath::Coils => write!(f, "coils"),
            FieldPath::Coil { index, field } => {
                let name = match field {
                    CoilField::Radius => "radius",
                    CoilField::Turns => "turns",
                    CoilField::Current => "current",
                    CoilField::ZPosition => "z_position",
                };
                write!(f, "coils[{index}].{name}")
            }
            FieldPath::Region(field) => {
                let name = match field {
                    RegionField::YRange => "y_min",
                    RegionField::ZRange => "z_min",
                    RegionField::Ny => "ny",
                    RegionField::Nz => "nz",
                };
                write!(f, "region.{name}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub path: FieldPath,
    pub message: String,
}

impl Violation {
    fn new(path: FieldPath, message: String) -> Self {
        Self { path, message }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Every violated coil or system invariant. An empty list means the system
/// is valid.
pub fn validate_system(system: &CoilSystem) -> Vec<Violation> {
    let mut out = Vec::new();
    if system.coils.is_empty() {
        out.push(Violation::new(
            FieldPath::Coils,
            "a coil system needs at least one coil".to_string(),
        ));
    }
    for (index, coil) in system.coils.iter().enumerate() {
        let at = |field| FieldPath::Coil { index, field };
        if !(coil.radius.is_finite() && coil.radius > 0.0) {
            out.push(Violation::new(
                at(CoilField::Radius),
                format!("radius must be a positive length, got {}", coil.radius),
            ));
        }
        if coil.turns < 1 {
            out.push(Violation::new(
                at(CoilField::Turns),
                "a coil needs at least one turn".to_string(),
            ));
        }
        if !(coil.current.is_finite() && coil.current != 0.0) {
            out.push(Violation::new(
                at(CoilField::Current),
                format!("current must be finite and nonzero, got {}", coil.current),
            ));
        }
        if !coil.z_position.is_finite() {
            out.push(Violation::new(
                at(CoilField::ZPosition),
                format!("axial position must be finite, got {}", coil.z_position),
            ));
        }
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PresetError {
    #[error("unknown preset '{0}' (expected one of: helmholtz, maxwell, tetracoil, wang, lee-whiting)")]
    UnknownPreset(String),
    #[error("base radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("turns must be at least 1")]
    BadTurns,
}

/// Catalog of known uniform-field coil systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Helmholtz,
    Maxwell,
    Tetracoil,
    Wang,
    LeeWhiting,
}

/// One symmetric coil pair (or a single coil at z = 0) in units of the base
/// radius, with its share of the ampere-turns.
struct PresetCoil {
    radius: f64,
    z: f64,
    turns_unit: u32,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Helmholtz,
        Preset::Maxwell,
        Preset::Tetracoil,
        Preset::Wang,
        Preset::LeeWhiting,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Helmholtz => "helmholtz",
            Preset::Maxwell => "maxwell",
            Preset::Tetracoil => "tetracoil",
            Preset::Wang => "wang",
            Preset::LeeWhiting => "lee-whiting",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, PresetError> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == name)
            .ok_or_else(|| PresetError::UnknownPreset(name.to_string()))
    }

    pub fn description(self) -> &'static str {
        match self {
            Preset::Helmholtz => "two equal coils spaced one radius apart",
            Preset::Maxwell => "central coil plus two coils of radius sqrt(4/7) R at ±sqrt(3/7) R, ampere-turns 64:49",
            Preset::Tetracoil => "four coils on a sphere of radius R, ampere-turns 15 (outer) : 22 (inner)",
            Preset::Wang => {
                "equal ampere-turn four-coil system: main pair R at ±0.354 R, compensation pair 0.6 R at ±1.103 R"
            }
            Preset::LeeWhiting => {
                "four equal-radius coils at ±0.2448 R and ±0.9449 R, ampere-turns 4 (inner) : 9 (outer)"
            }
        }
    }

    /// Integer ampere-turn weights whose ratio fixes the relative excitation.
    /// The `turns` argument of [`make_preset`] is rounded to a multiple of the
    /// largest weight.
    fn layout(self) -> Vec<PresetCoil> {
        let c = |radius, z, turns_unit| PresetCoil { radius, z, turns_unit };
        match self {
            Preset::Helmholtz => vec![c(1.0, 0.5, 1)],
            Preset::Maxwell => vec![c(1.0, 0.0, 64), c((4.0_f64 / 7.0).sqrt(), (3.0_f64 / 7.0).sqrt(), 49)],
            // D2 = D4 = 0 with the 15:22 integer ratio fixed; positions on the unit sphere
            Preset::Tetracoil => vec![
                c(0.643_857_482_816_99, 0.765_145_438_345_266_2, 15),
                c(0.958_436_506_868_339_3, 0.285_305_910_036_956_64, 22),
            ],
            Preset::Wang => vec![c(1.0, 0.354_049_398_302_920_1, 1), c(0.6, 1.102_890_951_077_476_4, 1)],
            Preset::LeeWhiting => vec![c(1.0, 0.244_830_919_794_665_47, 4), c(1.0, 0.944_854_810_380_599, 9)],
        }
    }
}

/// Build the named preset scaled to `base_radius`.
///
/// Coils are listed in ascending axial position. `turns` sets the turn
/// count of the coil with the largest ampere-turn weight; for weighted presets
/// it is rounded to the nearest positive multiple of that weight so the ratio
/// stays exact with integer turns.
pub fn make_preset(name: &str, base_radius: f64, turns: u32, current: f64) -> Result<CoilSystem, PresetError> {
    let preset = Preset::from_name(name)?;
    if !(base_radius.is_finite() && base_radius > 0.0) {
        return Err(PresetError::BadRadius(base_radius));
    }
    if turns == 0 {
        return Err(PresetError::BadTurns);
    }
    let layout = preset.layout();
    let unit = layout.iter().map(|c| c.turns_unit).max().unwrap_or(1);
    let multiple = ((turns as f64 / unit as f64).round() as u32).max(1);
    let scale_turns = |w: u32| {
        if unit == 1 {
            turns
        } else {
            w * multiple
        }
    };

    let mut coils = Vec::new();
    for pc in &layout {
        let radius = pc.radius * base_radius;
        let n = scale_turns(pc.turns_unit);
        if pc.z == 0.0 {
            coils.push(Coil::new(radius, n, current, 0.0));
        } else {
            let z = pc.z * base_radius;
            coils.push(Coil::new(radius, n, current, -z));
            coils.push(Coil::new(radius, n, current, z));
        }
    }
    coils.sort_by(|a, b| a.z_position.total_cmp(&b.z_position));
    Ok(CoilSystem::new(preset.name(), coils))
}

/// Half-width of the default window in units of the largest coil radius.
pub const DEFAULT_REGION_MARGIN: f64 = 1.1;
pub const DEFAULT_REGION_POINTS: usize = 101;

/// Square window centered on the axial centroid, 1.1 × the largest radius on
/// each side, sampled at 101 × 101 points.
pub fn default_region(system: &CoilSystem) -> SimulationRegion {
    let half = DEFAULT_REGION_MARGIN * system.max_radius();
    let zc = system.axial_centroid();
    SimulationRegion {
        y_min: -half,
        y_max: half,
        z_min: zc - half,
        z_max: zc + half,
        ny: DEFAULT_REGION_POINTS,
        nz: DEFAULT_REGION_POINTS,
    }
}
