//! Deterministic SVG heatmaps of |B| and of homogeneity.
//!
//! z runs left to right, y bottom to top. Each lattice sample is drawn as the
//! rectangle of width dz × dy centred on it.

use std::fmt::Write;

use super::colormap::{colormap, Colormap};
use super::PersistError;
use crate::coil::{CoilSystem, SimulationRegion};
use crate::field::FieldGrid;
use crate::homogeneity::{HomogeneityMap, InscribedSquare, Mask};

const PLOT_WIDTH: f64 = 480.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 60.0;
const BAR_GAP: f64 = 20.0;
const BAR_WIDTH: f64 = 20.0;
const BAR_LABELS: f64 = 90.0;
const BAR_STEPS: usize = 64;
const NON_FINITE_FILL: &str = "#ffffff";
const OUTSIDE_MASK_FILL: &str = "#d9d9d9";

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ColorLimits {
    /// Data minimum and maximum over finite cells.
    #[default]
    Auto,
    Fixed {
        min: f64,
        max: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapOptions {
    /// Field limits in millitesla.
    pub limits: ColorLimits,
    pub colormap: String,
    pub show_coils: bool,
}

impl Default for HeatmapOptions {
    fn default() -> Self {
        Self {
            limits: ColorLimits::Auto,
            colormap: "viridis".into(),
            show_coils: false,
        }
    }
}

fn resolve_limits(limits: ColorLimits, values: &[f64]) -> Result<(f64, f64), PersistError> {
    match limits {
        ColorLimits::Fixed { min, max } => {
            if min.is_finite() && max.is_finite() && min < max {
                Ok((min, max))
            } else {
                Err(PersistError::InvalidLimits { min, max })
            }
        }
        ColorLimits::Auto => {
            let finite = values.iter().copied().filter(|v| v.is_finite());
            let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            if !lo.is_finite() {
                return Ok((0.0, 1.0));
            }
            if lo < hi {
                return Ok((lo, hi));
            }
            let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 1e-6 };
            Ok((lo - pad, hi + pad))
        }
    }
}

struct Frame {
    region: SimulationRegion,
    y_lo: f64,
    y_hi: f64,
    z_lo: f64,
    z_hi: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn new(region: &SimulationRegion) -> Self {
        let (dy, dz) = (region.dy(), region.dz());
        let (y_lo, y_hi) = (region.y_min - 0.5 * dy, region.y_max + 0.5 * dy);
        let (z_lo, z_hi) = (region.z_min - 0.5 * dz, region.z_max + 0.5 * dz);
        let height = (PLOT_WIDTH * (y_hi - y_lo) / (z_hi - z_lo)).clamp(120.0, 960.0);
        Self {
            region: *region,
            y_lo,
            y_hi,
            z_lo,
            z_hi,
            width: PLOT_WIDTH,
            height,
        }
    }

    fn x(&self, z: f64) -> f64 {
        MARGIN_LEFT + (z - self.z_lo) / (self.z_hi - self.z_lo) * self.width
    }

    fn y(&self, y: f64) -> f64 {
        MARGIN_TOP + (self.y_hi - y) / (self.y_hi - self.y_lo) * self.height
    }

    fn contains(&self, y: f64, z: f64) -> bool {
        (self.y_lo..=self.y_hi).contains(&y) && (self.z_lo..=self.z_hi).contains(&z)
    }

    fn total_width(&self) -> f64 {
        MARGIN_LEFT + self.width + BAR_GAP + BAR_WIDTH + BAR_LABELS
    }

    fn total_height(&self) -> f64 {
        MARGIN_TOP + self.height + MARGIN_BOTTOM
    }
}

fn header(out: &mut String, frame: &Frame, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="12">"#,
        w = frame.total_width(),
        h = frame.total_height()
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(
        out,
        r##"<rect x="0" y="0" width="{:.0}" height="{:.0}" fill="#ffffff"/>"##,
        frame.total_width(),
        frame.total_height()
    );
}

fn cells<F: Fn(usize, usize) -> String>(out: &mut String, frame: &Frame, fill: F) {
    let r = &frame.region;
    let (dy, dz) = (r.dy(), r.dz());
    out.push_str("<g id=\"cells\" shape-rendering=\"crispEdges\">\n");
    for iy in 0..r.ny {
        let yc = r.y_at(iy);
        let top = frame.y(yc + 0.5 * dy);
        let bottom = frame.y(yc - 0.5 * dy);
        for iz in 0..r.nz {
            let zc = r.z_at(iz);
            let left = frame.x(zc - 0.5 * dz);
            let right = frame.x(zc + 0.5 * dz);
            let _ = writeln!(
                out,
                r#"<rect x="{left:.3}" y="{top:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
                right - left,
                bottom - top,
                fill(iy, iz)
            );
        }
    }
    out.push_str("</g>\n");
}

fn axes(out: &mut String, frame: &Frame) {
    let r = &frame.region;
    let (x0, x1) = (frame.x(frame.z_lo), frame.x(frame.z_hi));
    let (y0, y1) = (frame.y(frame.y_lo), frame.y(frame.y_hi));
    let _ = writeln!(
        out,
        r##"<rect x="{x0:.3}" y="{y1:.3}" width="{:.3}" height="{:.3}" fill="none" stroke="#000000"/>"##,
        x1 - x0,
        y0 - y1
    );
    let zmid = 0.5 * (r.z_min + r.z_max);
    for z in [r.z_min, zmid, r.z_max] {
        let x = frame.x(z);
        let _ = writeln!(
            out,
            r##"<line x1="{x:.3}" y1="{y0:.3}" x2="{x:.3}" y2="{:.3}" stroke="#000000"/>"##,
            y0 + 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{x:.3}" y="{:.3}" text-anchor="middle">{}</text>"#,
            y0 + 18.0,
            tick(z)
        );
    }
    let ymid = 0.5 * (r.y_min + r.y_max);
    for y in [r.y_min, ymid, r.y_max] {
        let yy = frame.y(y);
        let _ = writeln!(
            out,
            r##"<line x1="{:.3}" y1="{yy:.3}" x2="{x0:.3}" y2="{yy:.3}" stroke="#000000"/>"##,
            x0 - 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="end">{}</text>"#,
            x0 - 8.0,
            yy + 4.0,
            tick(y)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">z (m)</text>"#,
        0.5 * (x0 + x1),
        y0 + 40.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle" transform="rotate(-90 {:.3} {:.3})">y (m)</text>"#,
        x0 - 60.0,
        0.5 * (y0 + y1),
        x0 - 60.0,
        0.5 * (y0 + y1)
    );
}

fn color_bar(out: &mut String, frame: &Frame, cmap: &Colormap, lo: f64, hi: f64, label: &str) {
    let x = MARGIN_LEFT + frame.width + BAR_GAP;
    let top = MARGIN_TOP;
    let step = frame.height / BAR_STEPS as f64;
    out.push_str("<g id=\"colorbar\" shape-rendering=\"crispEdges\">\n");
    for i in 0..BAR_STEPS {
        // top slice shows the upper limit
        let t = (BAR_STEPS - 1 - i) as f64 / (BAR_STEPS - 1) as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{x:.3}" y="{:.3}" width="{BAR_WIDTH:.3}" height="{:.3}" fill="{}"/>"#,
            top + i as f64 * step,
            step,
            cmap.hex_at(t)
        );
    }
    let _ = writeln!(
        out,
        r##"<rect x="{x:.3}" y="{top:.3}" width="{BAR_WIDTH:.3}" height="{:.3}" fill="none" stroke="#000000"/>"##,
        frame.height
    );
    for (frac, v) in [(0.0, hi), (0.5, 0.5 * (lo + hi)), (1.0, lo)] {
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}">{}</text>"#,
            x + BAR_WIDTH + 5.0,
            top + frac * frame.height + 4.0,
            bar_value(v)
        );
    }
    out.push_str("</g>\n");
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{}</text>"#,
        x + 0.5 * BAR_WIDTH,
        top - 10.0,
        escape(label)
    );
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn bar_value(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-3) {
        format!("{v:.3e}")
    } else {
        format!("{v:.4}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn scale(v: f64, lo: f64, hi: f64) -> f64 {
    (v.clamp(lo, hi) - lo) / (hi - lo)
}

/// |B| heatmap in millitesla with a color bar, optionally marking the coil
/// cross-sections at (±r, Z).
pub fn render_heatmap(
    grid: &FieldGrid,
    system: Option<&CoilSystem>,
    options: &HeatmapOptions,
) -> Result<String, PersistError> {
    let cmap = colormap(&options.colormap)?;
    let values: Vec<f64> = grid.samples.iter().map(|s| s.b_mag * 1e3).collect();
    let (lo, hi) = resolve_limits(options.limits, &values)?;
    let frame = Frame::new(&grid.region);
    let nz = grid.region.nz;

    let mut out = String::new();
    let title = system.map_or("magnetic flux density".to_string(), |s| {
        format!("{} magnetic flux density", s.label)
    });
    header(&mut out, &frame, &title);
    cells(&mut out, &frame, |iy, iz| {
        let v = values[iy * nz + iz];
        if v.is_finite() {
            cmap.hex_at(scale(v, lo, hi))
        } else {
            NON_FINITE_FILL.to_string()
        }
    });
    if options.show_coils {
        if let Some(system) = system {
            out.push_str("<g id=\"coils\">\n");
            for coil in &system.coils {
                for y in [coil.radius, -coil.radius] {
                    if frame.contains(y, coil.z_position) {
                        let _ = writeln!(
                            out,
                            r##"<circle cx="{:.3}" cy="{:.3}" r="4" fill="#000000" stroke="#ffffff"/>"##,
                            frame.x(coil.z_position),
                            frame.y(y)
                        );
                    }
                }
            }
            out.push_str("</g>\n");
        }
    }
    axes(&mut out, &frame);
    color_bar(&mut out, &frame, cmap, lo, hi, "|B| (mT)");
    out.push_str("</svg>\n");
    Ok(out)
}

/// Homogeneous region: cells inside `mask` colored by h over
/// [threshold, 100], the rest grey, with the inscribed square outlined.
pub fn render_homogeneity(
    map: &HomogeneityMap,
    mask: &Mask,
    threshold: f64,
    square: Option<&InscribedSquare>,
    colormap_name: &str,
) -> Result<String, PersistError> {
    let cmap = colormap(colormap_name)?;
    let (lo, hi) = resolve_limits(
        ColorLimits::Fixed {
            min: threshold,
            max: 100.0,
        },
        &[],
    )
    .or_else(|_| resolve_limits(ColorLimits::Auto, &[threshold]))?;
    let frame = Frame::new(&map.region);

    let mut out = String::new();
    header(&mut out, &frame, &format!("homogeneous region at {threshold}%"));
    cells(&mut out, &frame, |iy, iz| {
        if mask.get(iy, iz) {
            cmap.hex_at(scale(map.get(iy, iz), lo, hi))
        } else {
            OUTSIDE_MASK_FILL.to_string()
        }
    });
    if let Some(sq) = square {
        let (y0, y1) = sq.y_extent();
        let (z0, z1) = sq.z_extent();
        let _ = writeln!(
            out,
            r##"<rect id="inscribed-square" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="none" stroke="#ff0000" stroke-width="2"/>"##,
            frame.x(z0),
            frame.y(y1),
            frame.x(z1) - frame.x(z0),
            frame.y(y0) - frame.y(y1)
        );
    }
    axes(&mut out, &frame);
    color_bar(&mut out, &frame, cmap, lo, hi, "h (%)");
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSample;

    fn grid_mt(values_mt: &[f64]) -> FieldGrid {
        let region = SimulationRegion {
            y_min: 0.0,
            y_max: 1.0,
            z_min: 0.0,
            z_max: 1.0,
            ny: 2,
            nz: 2,
        };
        FieldGrid::new(
            region,
            values_mt.iter().map(|&v| FieldSample::new(0.0, v * 1e-3)).collect(),
        )
    }

    fn cell_fills(svg: &str) -> Vec<String> {
        let start = svg.find("<g id=\"cells\"").unwrap();
        let end = start + svg[start..].find("</g>").unwrap();
        svg[start..end]
            .lines()
            .filter_map(|l| l.split("fill=\"").nth(1))
            .map(|s| s[..7].to_string())
            .collect()
    }

    #[test]
    fn cell_colors_follow_scale_positions() {
        let grid = grid_mt(&[0.0, 1.0, 2.0, 3.0]);
        let opts = HeatmapOptions {
            limits: ColorLimits::Fixed { min: 0.0, max: 3.0 },
            ..Default::default()
        };
        let svg = render_heatmap(&grid, None, &opts).unwrap();
        let cmap = colormap("viridis").unwrap();
        let expected: Vec<String> = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]
            .iter()
            .map(|&t| cmap.hex_at(t))
            .collect();
        assert_eq!(cell_fills(&svg), expected);
    }

    #[test]
    fn limits_clamp_values() {
        let grid = grid_mt(&[0.5, 1.0, 2.0, 30.0]);
        let opts = HeatmapOptions {
            limits: ColorLimits::Fixed { min: 1.0, max: 3.0 },
            colormap: "grayscale".into(),
            show_coils: false,
        };
        let fills = cell_fills(&render_heatmap(&grid, None, &opts).unwrap());
        assert_eq!(fills[0], "#000000");
        assert_eq!(fills[3], "#ffffff");
    }

    #[test]
    fn invalid_limits_and_colormap() {
        let grid = grid_mt(&[0.0, 1.0, 2.0, 3.0]);
        let equal = HeatmapOptions {
            limits: ColorLimits::Fixed { min: 1.0, max: 1.0 },
            ..Default::default()
        };
        assert!(matches!(
            render_heatmap(&grid, None, &equal),
            Err(PersistError::InvalidLimits { .. })
        ));
        let unknown = HeatmapOptions {
            colormap: "jet".into(),
            ..Default::default()
        };
        assert!(matches!(
            render_heatmap(&grid, None, &unknown),
            Err(PersistError::UnknownColormap(_))
        ));
    }

    #[test]
    fn output_is_deterministic() {
        let grid = grid_mt(&[0.3, 1.0, 2.0, 3.0]);
        let opts = HeatmapOptions::default();
        assert_eq!(
            render_heatmap(&grid, None, &opts).unwrap(),
            render_heatmap(&grid, None, &opts).unwrap()
        );
    }

    #[test]
    fn uniform_grid_auto_limits() {
        let grid = grid_mt(&[2.0; 4]);
        let svg = render_heatmap(&grid, None, &HeatmapOptions::default()).unwrap();
        let fills = cell_fills(&svg);
        assert!(fills.iter().all(|f| f == &fills[0]));
    }

    #[test]
    fn coil_markers_inside_window() {
        let sys = CoilSystem::new(
            "pair",
            vec![
                crate::coil::Coil::new(1.0, 1, 1.0, 0.5),
                crate::coil::Coil::new(5.0, 1, 1.0, 0.5),
            ],
        );
        let grid = grid_mt(&[1.0; 4]);
        let opts = HeatmapOptions {
            show_coils: true,
            ..Default::default()
        };
        let svg = render_heatmap(&grid, Some(&sys), &opts).unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
        let hidden = render_heatmap(&grid, Some(&sys), &HeatmapOptions::default()).unwrap();
        assert_eq!(hidden.matches("<circle").count(), 0);
    }
}
