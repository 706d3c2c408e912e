//! Rescalings of the evolving curve and the bowtie comparisons made on them.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::curvegeom::{hausdorff_distance, signed_area, ClosedPolyline, Point2};
use crate::error::{Error, Result};

/// How to rescale a curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum RenormMode {
    /// Independent x and y scalings onto the box `[-1, 1]^2`.
    Box,
    /// Uniform scaling to unit half-width.
    Width,
    /// Uniform scaling by `1 / sqrt(t_hat - t)`.
    Parabolic { t: f64, t_hat: f64 },
    /// Uniform scaling to half-height `pi / 2`, the Grim Reaper's width.
    Reaper,
}

/// Corners of the limiting quadrilateral in traversal order.
pub const BOWTIE_CORNERS: [Point2; 4] = [
    Point2 { x: -1.0, y: -1.0 },
    Point2 { x: 1.0, y: 1.0 },
    Point2 { x: 1.0, y: -1.0 },
    Point2 { x: -1.0, y: 1.0 },
];

pub fn bowtie() -> ClosedPolyline {
    ClosedPolyline::new(BOWTIE_CORNERS.to_vec()).expect("bowtie corners are distinct")
}

pub fn normalize(curve: &ClosedPolyline, mode: RenormMode) -> Result<ClosedPolyline> {
    let (x, y) = curve.half_extents();
    let (sx, sy) = match mode {
        RenormMode::Box => {
            positive(x, "half-width")?;
            positive(y, "half-height")?;
            (1.0 / x, 1.0 / y)
        }
        RenormMode::Width => {
            positive(x, "half-width")?;
            (1.0 / x, 1.0 / x)
        }
        RenormMode::Parabolic { t, t_hat } => {
            let s = 1.0 / remaining(t, t_hat)?.sqrt();
            (s, s)
        }
        RenormMode::Reaper => {
            positive(y, "half-height")?;
            (FRAC_PI_2 / y, FRAC_PI_2 / y)
        }
    };
    Ok(curve.map(|p| Point2::new(p.x * sx, p.y * sy)))
}

fn positive(v: f64, what: &'static str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::ZeroExtent(what))
    }
}

fn remaining(t: f64, t_hat: f64) -> Result<f64> {
    if t < t_hat {
        Ok(t_hat - t)
    } else {
        Err(Error::PastVanishingTime { t, t_hat })
    }
}

/// Hausdorff distance from a box-normalized curve to the bowtie.
pub fn bowtie_distance(boxed: &ClosedPolyline) -> f64 {
    hausdorff_distance(boxed, &bowtie())
}

/// Vertex with positive x and the largest y (ties go to the larger x).
pub fn migration_point(boxed: &ClosedPolyline) -> Result<Point2> {
    boxed
        .vertices()
        .iter()
        .copied()
        .filter(|p| p.x > 0.0)
        .max_by(|a, b| a.y.total_cmp(&b.y).then(a.x.total_cmp(&b.x)))
        .ok_or_else(|| Error::Precondition("no vertex with positive x".into()))
}

/// Total area of the two lobes of a figure-eight whose double point sits at
/// index 0 and at the middle index (the layout of the unfolded quarter arc).
pub fn region_area(figure_eight: &ClosedPolyline) -> f64 {
    let v = figure_eight.vertices();
    let mid = v.len() / 2;
    signed_area(&v[..mid]).abs() + signed_area(&v[mid..]).abs()
}

/// Logarithmic time `tau = -ln(t_hat - t)`.
pub fn time_map(t: f64, t_hat: f64) -> Result<f64> {
    Ok(-remaining(t, t_hat)?.ln())
}

/// Inverse of [`time_map`].
pub fn time_from_tau(tau: f64, t_hat: f64) -> f64 {
    t_hat - (-tau).exp()
}


#[cfg(test)]
mod lemniscate_tests {
    use super::*;
    use crate::curvegeom::reconstruct_figure_eight;
    use crate::seeds::lemniscate_arc;

    fn figure(a: f64, n: usize) -> ClosedPolyline {
        reconstruct_figure_eight(&lemniscate_arc(a, n).unwrap())
    }

    fn segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let w = (((p.x - a.x) * dx + (p.y - a.y) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
        (p.x - a.x - w * dx).hypot(p.y - a.y - w * dy)
    }

    /// Samples each segment at 20 interior points and scans every segment
    /// of the other curve.
    fn brute_directed(a: &ClosedPolyline, b: &ClosedPolyline) -> f64 {
        let segs: Vec<_> = b.segments().collect();
        a.segments()
            .flat_map(|(p, q)| (0..20).map(move |j| p.lerp(q, j as f64 / 20.0)))
            .map(|s| segs.iter().map(|&(u, v)| segment_distance(s, u, v)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    }

    #[test]
    fn width_mode_removes_the_scale() {
        let one = normalize(&figure(1.0, 300), RenormMode::Width).unwrap();
        let two = normalize(&figure(2.0, 300), RenormMode::Width).unwrap();
        for (p, q) in one.vertices().iter().zip(two.vertices()) {
            assert!(p.distance(*q) < 1e-12);
        }
    }

    #[test]
    fn lemniscate_bowtie_distance_matches_brute_force() {
        let boxed = normalize(&figure(1.0, 200), RenormMode::Box).unwrap();
        let d = bowtie_distance(&boxed);
        let bt = bowtie();
        let brute = brute_directed(&boxed, &bt).max(brute_directed(&bt, &boxed));
        assert!((d - brute).abs() < 2e-3, "{d} vs {brute}");
        assert!(d > 0.1 && d < 1.0);
    }

    #[test]
    fn lemniscate_box_area_exceeds_the_bowtie() {
        let boxed = normalize(&figure(1.0, 400), RenormMode::Box).unwrap();
        assert!(region_area(&boxed) >= 2.0);
    }

    #[test]
    fn bowtie_distance_has_the_box_symmetries() {
        let boxed = normalize(&figure(1.0, 200), RenormMode::Box).unwrap();
        let d = bowtie_distance(&boxed);
        for f in [Point2::mirror_x, Point2::mirror_y, |p: Point2| p.mirror_x().mirror_y()] {
            assert!((bowtie_distance(&boxed.map(f)) - d).abs() < 1e-12);
        }
    }
}
