use crate::curvegeom::{curvature_vector, ClosedPolyline, Point2, QuarterArc};
use crate::error::Result;

/// Normal velocity `kappa N` at every vertex of the quarter arc.
///
/// The origin uses the ghost `-v[1]`, which makes its stencil collinear, so
/// the double point stays pinned. The rightmost vertex uses the x-axis mirror
/// of `v[n-2]` and slides along the axis.
pub fn csf_velocity(arc: &QuarterArc) -> Result<Vec<Point2>> {
    velocity_of(arc.vertices())
}

pub(crate) fn velocity_of(v: &[Point2]) -> Result<Vec<Point2>> {
    let n = v.len();
    let mut out = Vec::with_capacity(n);
    out.push(Point2::ORIGIN);
    for i in 1..n - 1 {
        out.push(curvature_vector(v[i - 1], v[i], v[i + 1], i)?);
    }
    let tip = curvature_vector(v[n - 2], v[n - 1], v[n - 2].mirror_x(), n - 1)?;
    out.push(Point2::new(tip.x, 0.0));
    Ok(out)
}

/// Normal velocity with cyclic stencils.
pub fn csf_velocity_closed(poly: &ClosedPolyline) -> Result<Vec<Point2>> {
    cyclic_velocity(poly.vertices())
}

pub(crate) fn cyclic_velocity(v: &[Point2]) -> Result<Vec<Point2>> {
    let n = v.len();
    (0..n)
        .map(|i| curvature_vector(v[(i + n - 1) % n], v[i], v[(i + 1) % n], i))
        .collect()
}
