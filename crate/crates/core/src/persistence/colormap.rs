use super::PersistError;

/// Evenly spaced RGB anchors; colors between anchors are linear blends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Colormap {
    pub name: &'static str,
    pub stops: &'static [[u8; 3]],
}

// matplotlib viridis sampled at i/8
const VIRIDIS: [[u8; 3]; 9] = [
    [68, 1, 84],
    [71, 45, 123],
    [59, 82, 139],
    [44, 114, 142],
    [33, 145, 140],
    [40, 174, 128],
    [94, 201, 98],
    [173, 220, 48],
    [253, 231, 37],
];

const GRAYSCALE: [[u8; 3]; 2] = [[0, 0, 0], [255, 255, 255]];

// matplotlib coolwarm sampled at i/4
const BLUE_RED: [[u8; 3]; 5] = [
    [59, 76, 192],
    [141, 176, 254],
    [221, 220, 220],
    [244, 152, 122],
    [180, 4, 38],
];

pub const COLORMAPS: [Colormap; 3] = [
    Colormap {
        name: "viridis",
        stops: &VIRIDIS,
    },
    Colormap {
        name: "grayscale",
        stops: &GRAYSCALE,
    },
    Colormap {
        name: "blue-red",
        stops: &BLUE_RED,
    },
];

pub fn colormap(name: &str) -> Result<&'static Colormap, PersistError> {
    COLORMAPS
        .iter()
        .find(|c| c.name == name)
        .ok_or_else(|| PersistError::UnknownColormap(name.to_string()))
}

impl Colormap {
    /// Color at scale position `t`, clamped to [0, 1].
    pub fn color_at(&self, t: f64) -> [u8; 3] {
        let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
        let segments = self.stops.len() - 1;
        let pos = t * segments as f64;
        let i = (pos.floor() as usize).min(segments - 1);
        let frac = pos - i as f64;
        let (a, b) = (self.stops[i], self.stops[i + 1]);
        let mut out = [0u8; 3];
        for ch in 0..3 {
            let v = a[ch] as f64 + (b[ch] as f64 - a[ch] as f64) * frac;
            out[ch] = v.round().clamp(0.0, 255.0) as u8;
        }
        out
    }

    pub fn hex_at(&self, t: f64) -> String {
        let [r, g, b] = self.color_at(t);
        format!("#{r:02x}{g:02x}{b:02x}")
    }
}
