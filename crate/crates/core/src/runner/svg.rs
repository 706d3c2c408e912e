use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Checkpoint;
use crate::curvegeom::{reconstruct_figure_eight, ClosedPolyline, Point2};
use crate::error::{Error, Result};
use crate::renorm::{migration_point, normalize, RenormMode, BOWTIE_CORNERS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvgOptions {
    pub width: f64,
    pub height: f64,
    /// Blank border on every side, in SVG units.
    pub margin: f64,
    pub stroke_width: f64,
    pub marker_radius: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        Self {
            width: 600.0,
            height: 600.0,
            margin: 40.0,
            stroke_width: 2.0,
            marker_radius: 6.0,
        }
    }
}

/// Maps curve coordinates (centred on the origin) into the viewport, y up.
struct View {
    sx: f64,
    sy: f64,
    cx: f64,
    cy: f64,
}

impl View {
    fn new(hx: f64, hy: f64, opts: &SvgOptions, uniform: bool) -> Self {
        let mut sx = (opts.width / 2.0 - opts.margin) / hx;
        let mut sy = (opts.height / 2.0 - opts.margin) / hy;
        if uniform {
            sx = sx.min(sy);
            sy = sx;
        }
        Self { sx, sy, cx: opts.width / 2.0, cy: opts.height / 2.0 }
    }

    fn map(&self, p: Point2) -> (f64, f64) {
        (self.cx + self.sx * p.x, self.cy - self.sy * p.y)
    }

    fn points(&self, pts: &[Point2]) -> String {
        let mut s = String::new();
        for &p in pts {
            let (x, y) = self.map(p);
            let _ = write!(s, "{x:.3},{y:.3} ");
        }
        s.pop();
        s
    }
}

/// Renders a figure-eight after renormalizing it. Box mode fills the
/// viewport inside the margins exactly, overlays the bowtie, and marks the
/// top of the right lobe (black) and the bottom (white).
pub fn render_svg(curve: &ClosedPolyline, mode: RenormMode, opts: &SvgOptions) -> Result<String> {
    let c = normalize(curve, mode)?;
    let boxed = matches!(mode, RenormMode::Box);
    let (hx, hy) = if boxed { (1.0, 1.0) } else { c.half_extents() };
    let view = View::new(hx, hy, opts, !boxed);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = opts.width,
        h = opts.height
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if boxed {
        let _ = writeln!(
            s,
            r##"<polygon id="bowtie" points="{}" fill="none" stroke="#c03030" stroke-width="{}" stroke-dasharray="6 4"/>"##,
            view.points(&BOWTIE_CORNERS),
            opts.stroke_width / 2.0
        );
    }
    let _ = writeln!(
        s,
        r#"<polygon id="curve" points="{}" fill="none" stroke="black" stroke-width="{}"/>"#,
        view.points(c.vertices()),
        opts.stroke_width
    );
    if boxed {
        let top = migration_point(&c)?;
        let bottom = top.mirror_x();
        for (id, p, fill) in [("theta0", top, "black"), ("thetapi", bottom, "white")] {
            let (x, y) = view.map(p);
            let _ = writeln!(
                s,
                r#"<circle id="{id}" cx="{x:.3}" cy="{y:.3}" r="{}" fill="{fill}" stroke="black" stroke-width="1"/>"#,
                opts.marker_radius
            );
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Writes the checkpoint's reconstructed figure-eight as an SVG.
pub fn snapshot_svg(checkpoint: &Checkpoint, mode: RenormMode, path: &Path) -> Result<()> {
    let fig = reconstruct_figure_eight(&checkpoint.arc()?);
    let svg = render_svg(&fig, mode, &SvgOptions::default())?;
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}
