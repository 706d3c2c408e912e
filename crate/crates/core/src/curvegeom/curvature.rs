//! Three-point (circumscribed circle) curvature estimates.
//!
//! Signed curvature is counterclockwise-positive. The quarter arc runs
//! clockwise along the right lobe, so its *lobe curvature* is the negated
//! Menger value and is positive on a convex lobe.

use super::Point2;
use crate::error::{Error, Result};

/// Signed Menger curvature of the circle through `p`, `q`, `r`.
pub fn menger_curvature(p: Point2, q: Point2, r: Point2) -> Result<f64> {
    menger_at(p, q, r, 0)
}

pub(crate) fn menger_at(p: Point2, q: Point2, r: Point2, index: usize) -> Result<f64> {
    let a = q - p;
    let b = r - q;
    let c = r - p;
    let denom = a.norm() * b.norm() * c.norm();
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::DegenerateTriple { index });
    }
    Ok(2.0 * a.cross(b) / denom)
}

/// Curvature vector `κN` at `q` for the circle through `p`, `q`, `r`:
/// points from `q` to the circumcenter with length `1/R`, and is exactly zero
/// for collinear triples.
pub(crate) fn curvature_vector(p: Point2, q: Point2, r: Point2, index: usize) -> Result<Point2> {
    let a = p - q;
    let b = r - q;
    let aa = a.norm_sq();
    let bb = b.norm_sq();
    if aa == 0.0 || bb == 0.0 || (r - p).norm_sq() == 0.0 {
        return Err(Error::DegenerateTriple { index });
    }
    let d = 2.0 * a.cross(b);
    let w = Point2::new(b.y * aa - a.y * bb, a.x * bb - b.x * aa);
    let ww = w.norm_sq();
    if ww == 0.0 || !ww.is_finite() {
        return Err(Error::DegenerateTriple { index });
    }
    Ok(w * (d / ww))
}

/// Unit tangent at `q` from the parabola through three points
/// (second-order on non-uniform spacing).
pub(crate) fn tangent_at(p: Point2, q: Point2, r: Point2) -> Point2 {
    let da = q - p;
    let db = r - q;
    let ha = da.norm();
    let hb = db.norm();
    let t = da * (hb / (ha * (ha + hb))) + db * (ha / (hb * (ha + hb)));
    t * (1.0 / t.norm())
}

/// Signed turning angle at `q` (counterclockwise positive).
#[inline]
pub(crate) fn turning_angle(p: Point2, q: Point2, r: Point2) -> f64 {
    let a = q - p;
    let b = r - q;
    a.cross(b).atan2(a.dot(b))
}
