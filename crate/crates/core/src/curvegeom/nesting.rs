use serde::{Deserialize, Serialize};

use super::curvature::{menger_at, tangent_at};
use super::Point2;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NestingReport {
    pub nested: bool,
    /// `max_{i<j} |c_i - c_j| - (r_i - r_j)`; non-positive when nested.
    pub worst_violation: f64,
}

/// Checks that the osculating disks at the interior vertices of `points` are
/// nested, largest first. Curvature must be strictly increasing (in
/// magnitude) along the list.
pub fn osculating_disks_nested(points: &[Point2], tol_nest: f64) -> Result<NestingReport> {
    if points.len() < 4 {
        return Err(Error::Precondition("need at least two interior vertices".into()));
    }
    let mut disks = Vec::with_capacity(points.len() - 2);
    for i in 1..points.len() - 1 {
        let (p, q, r) = (points[i - 1], points[i], points[i + 1]);
        let k = menger_at(p, q, r, i)?;
        let normal = tangent_at(p, q, r).perp() * k.signum();
        disks.push((k.abs(), q + normal * (1.0 / k.abs())));
    }
    let sign = menger_at(points[0], points[1], points[2], 1)?.signum();
    for (i, w) in disks.windows(2).enumerate() {
        if !(w[1].0 > w[0].0) || w[0].0 == 0.0 {
            return Err(Error::Precondition(format!(
                "curvature not strictly increasing at vertex {}",
                i + 2
            )));
        }
    }
    for i in 1..points.len() - 1 {
        let k = menger_at(points[i - 1], points[i], points[i + 1], i)?;
        if k.signum() != sign {
            return Err(Error::Precondition(format!("curvature changes sign at vertex {i}")));
        }
    }
    let mut worst = f64::NEG_INFINITY;
    for i in 0..disks.len() {
        let (ki, ci) = disks[i];
        for &(kj, cj) in &disks[i + 1..] {
            worst = worst.max(ci.distance(cj) - (1.0 / ki - 1.0 / kj));
        }
    }
    Ok(NestingReport {
        nested: worst <= tol_nest,
        worst_violation: worst,
    })
}
