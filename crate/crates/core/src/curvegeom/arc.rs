use serde::{Deserialize, Serialize};

use super::curvature::{menger_at, tangent_at, turning_angle};
use super::Point2;
use crate::error::{Error, Result};

/// Minimum vertex count of a quarter arc.
pub const MIN_ARC_VERTICES: usize = 8;

/// Relative tolerance for the endpoint constraints (scaled by the half-width).
pub const ENDPOINT_TOL: f64 = 1e-9;

/// Turning angles up to this (radians, wrong sign) still count as convex.
pub const CONVEXITY_TOL: f64 = 1e-12;

/// The top half of the right lobe: an x-monotone convex polyline from the
/// double point at the origin to the rightmost point on the x-axis.
///
/// The traversal is clockwise around the lobe. Boundary stencils use ghost
/// points: `-v[1]` before the origin (the strand's continuation under the
/// half-turn symmetry) and the mirror of `v[n-2]` after the rightmost vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point2>", into = "Vec<Point2>")]
pub struct QuarterArc {
    vertices: Vec<Point2>,
}

impl TryFrom<Vec<Point2>> for QuarterArc {
    type Error = Error;
    fn try_from(v: Vec<Point2>) -> Result<Self> {
        QuarterArc::new(v)
    }
}

impl From<QuarterArc> for Vec<Point2> {
    fn from(a: QuarterArc) -> Self {
        a.vertices
    }
}

impl QuarterArc {
    /// Validates every arc invariant.
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        validate_arc(&vertices)?;
        Ok(Self { vertices })
    }

    /// Skips validation; callers guarantee the invariants.
    pub(crate) fn from_trusted(vertices: Vec<Point2>) -> Self {
        debug_assert!(vertices.len() >= 3);
        Self { vertices }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Point2> {
        self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Half-width `X`: the x-coordinate of the rightmost vertex.
    pub fn half_width(&self) -> f64 {
        self.vertices[self.vertices.len() - 1].x
    }

    /// The arc with ghost points attached at both ends.
    pub fn ghosted(&self) -> Vec<Point2> {
        ghosted(&self.vertices)
    }

    pub fn segment_lengths(&self) -> Vec<f64> {
        self.vertices.windows(2).map(|w| w[0].distance(w[1])).collect()
    }

    pub fn min_segment(&self) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| w[0].distance(w[1]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn length(&self) -> f64 {
        self.vertices.windows(2).map(|w| w[0].distance(w[1])).sum()
    }

    /// Positive-on-convex curvature at every vertex, using the ghost points.
    pub fn lobe_curvatures(&self) -> Result<Vec<f64>> {
        let g = self.ghosted();
        (0..self.vertices.len())
            .map(|i| menger_at(g[i], g[i + 1], g[i + 2], i).map(|k| -k))
            .collect()
    }

    /// Largest lobe curvature; same values as [`Self::lobe_curvatures`]
    /// without the allocation.
    pub fn max_lobe_curvature(&self) -> Result<f64> {
        let v = &self.vertices;
        let n = v.len();
        let mut best = 0.0f64;
        for i in 1..n - 1 {
            best = best.max(-menger_at(v[i - 1], v[i], v[i + 1], i)?);
        }
        let tip = -menger_at(v[n - 2], v[n - 1], v[n - 2].mirror_x(), n - 1)?;
        Ok(best.max(tip))
    }

    /// Tangent angle (with the x-axis) at every vertex, from second-order
    /// central differences. Runs from `alpha` at the origin down to `-pi/2`.
    pub fn tangent_angles(&self) -> Vec<f64> {
        let g = self.ghosted();
        (0..self.vertices.len())
            .map(|i| {
                let t = tangent_at(g[i], g[i + 1], g[i + 2]);
                t.y.atan2(t.x)
            })
            .collect()
    }

    /// Applies the diagonal scaling `(x, y) -> (sx x, sy y)`.
    pub fn scaled(&self, sx: f64, sy: f64) -> QuarterArc {
        QuarterArc::from_trusted(
            self.vertices
                .iter()
                .map(|p| Point2::new(p.x * sx, p.y * sy))
                .collect(),
        )
    }
}

pub(crate) fn ghosted(v: &[Point2]) -> Vec<Point2> {
    let n = v.len();
    let mut g = Vec::with_capacity(n + 2);
    g.push(-v[1]);
    g.extend_from_slice(v);
    g.push(v[n - 2].mirror_x());
    g
}

/// Checks the quarter-arc invariants and reports the first failure.
pub fn validate_arc(v: &[Point2]) -> Result<()> {
    let n = v.len();
    if n < MIN_ARC_VERTICES {
        return Err(Error::Underresolved {
            got: n,
            need: MIN_ARC_VERTICES,
        });
    }
    if let Some(i) = v.iter().position(|p| !p.is_finite()) {
        return Err(Error::InvalidArc(format!("non-finite vertex {i}")));
    }
    let x_max = v[n - 1].x;
    if !(x_max > 0.0) {
        return Err(Error::InvalidArc("rightmost vertex not at positive x".into()));
    }
    let tol = ENDPOINT_TOL * x_max;
    if v[0].norm() > tol {
        return Err(Error::InvalidArc(format!(
            "first vertex {:?} not at the origin",
            v[0]
        )));
    }
    if v[n - 1].y.abs() > tol {
        return Err(Error::InvalidArc(format!(
            "last vertex {:?} not on the x-axis",
            v[n - 1]
        )));
    }
    if let Some(i) = (1..n).find(|&i| !(v[i].x > v[i - 1].x)) {
        return Err(Error::InvalidArc(format!("x not strictly increasing at vertex {i}")));
    }
    if let Some(i) = (1..n - 1).find(|&i| !(v[i].y > 0.0 && v[i].x > 0.0)) {
        return Err(Error::InvalidArc(format!("interior vertex {i} leaves the open quadrant")));
    }
    // the angle is only needed when the cross product has the wrong sign
    let concave = |i: usize| {
        (v[i] - v[i - 1]).cross(v[i + 1] - v[i]) > 0.0
            && turning_angle(v[i - 1], v[i], v[i + 1]) > CONVEXITY_TOL
    };
    if let Some(i) = (1..n - 1).find(|&i| concave(i)) {
        return Err(Error::InvalidArc(format!("convexity lost at vertex {i}")));
    }
    Ok(())
}

/// A closed polygon, stored without repeating the first vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedPolyline {
    vertices: Vec<Point2>,
}

impl ClosedPolyline {
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidPolyline(format!("{n} vertices, need at least 3")));
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidPolyline(format!("non-finite vertex {i}")));
        }
        if let Some(i) = (0..n).find(|&i| vertices[i] == vertices[(i + 1) % n]) {
            return Err(Error::InvalidPolyline(format!("repeated consecutive vertex at {i}")));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Point2> {
        self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Segments `(v[i], v[i+1])`, wrapping around.
    pub fn segments(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn min_segment(&self) -> f64 {
        self.segments()
            .map(|(a, b)| a.distance(b))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn perimeter(&self) -> f64 {
        self.segments().map(|(a, b)| a.distance(b)).sum()
    }

    /// Signed shoelace area (counterclockwise positive).
    pub fn signed_area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn centroid_of_vertices(&self) -> Point2 {
        let n = self.vertices.len() as f64;
        self.vertices
            .iter()
            .fold(Point2::ORIGIN, |acc, &p| acc + p)
            * (1.0 / n)
    }

    /// Half-extents of the axis-aligned bounding box about the origin.
    pub fn half_extents(&self) -> (f64, f64) {
        self.vertices.iter().fold((0.0_f64, 0.0_f64), |(x, y), p| {
            (x.max(p.x.abs()), y.max(p.y.abs()))
        })
    }

    pub fn map(&self, f: impl Fn(Point2) -> Point2) -> ClosedPolyline {
        ClosedPolyline {
            vertices: self.vertices.iter().map(|&p| f(p)).collect(),
        }
    }
}

/// Signed shoelace area of the polygon through `points` (closed implicitly).
pub fn signed_area(points: &[Point2]) -> f64 {
    let n = points.len();
    let twice: f64 = (0..n)
        .map(|i| points[i].cross(points[(i + 1) % n]))
        .sum();
    0.5 * twice
}

/// Area enclosed by `points` closed back to the first point (absolute value).
/// For a quarter arc this is the region between the arc and the x-axis.
pub fn quarter_area(points: &[Point2]) -> f64 {
    signed_area(points).abs()
}

/// Scalar measures of a figure-eight read off its quarter arc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcMeasures {
    /// Area of both lobes.
    pub area: f64,
    /// Half-width `X`.
    pub half_width: f64,
    /// Half-height `Y`.
    pub half_height: f64,
    /// Tangent angle at the double point.
    pub alpha: f64,
    /// Curvature at the horizontal-tangent point (theta = 0).
    pub kappa_top: f64,
    /// Curvature at the rightmost point (theta = pi/2).
    pub kappa_right: f64,
}

/// Area, bounding box, double-point angle and the two marker curvatures.
pub fn arc_measures(arc: &QuarterArc) -> Result<ArcMeasures> {
    let v = arc.vertices();
    let n = v.len();
    if n < MIN_ARC_VERTICES {
        return Err(Error::Underresolved {
            got: n,
            need: MIN_ARC_VERTICES,
        });
    }
    let kappa = arc.lobe_curvatures()?;
    let phi = arc.tangent_angles();
    let d = v[1] - v[0];
    let alpha = d.y.atan2(d.x);
    let half_height = v.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);

    // theta = -phi increases along the arc; interpolate kappa at theta = 0
    let kappa_top = match (0..n - 1).find(|&i| phi[i] >= 0.0 && phi[i + 1] < 0.0) {
        Some(i) => {
            let s = phi[i] / (phi[i] - phi[i + 1]);
            kappa[i] + s * (kappa[i + 1] - kappa[i])
        }
        None => {
            let i = v
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.y.total_cmp(&b.1.y))
                .map(|(i, _)| i)
                .unwrap_or(0);
            kappa[i]
        }
    };

    Ok(ArcMeasures {
        area: 4.0 * quarter_area(v),
        half_width: v[n - 1].x,
        half_height,
        alpha,
        kappa_top,
        kappa_right: kappa[n - 1],
    })
}
