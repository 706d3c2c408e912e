//! Curvature-adapted redistribution of polyline vertices.
//!
//! The polyline is treated as samples of a C1 cubic Hermite curve in
//! chord-length parameter, with second-order tangents at every vertex. New
//! vertices are equidistributed against the density
//! `max(1/h_max, kappa/dtheta_max)` measured on that curve.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::arc::validate_arc;
use super::curvature::{tangent_at, turning_angle};
use super::{Point2, QuarterArc};
use crate::error::{Error, Result};

/// Fine samples per segment used to measure the interpolating curve.
const FINE_PER_SEGMENT: usize = 16;
/// Target spacing relative to the hard limits, so fresh output conforms.
const TARGET_FRACTION: f64 = 0.8;
const MAX_PASSES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResamplePolicy {
    /// Longest admissible segment.
    pub h_max: f64,
    /// Largest admissible turning angle at a vertex (radians).
    pub dtheta_max: f64,
    /// Segments shorter than this fraction of the local target spacing
    /// trigger a redistribution. Zero disables coarsening.
    pub coarsen_ratio: f64,
    /// Point budget.
    pub max_points: usize,
}

impl ResamplePolicy {
    pub fn new(h_max: f64, dtheta_max: f64) -> Self {
        Self {
            h_max,
            dtheta_max,
            coarsen_ratio: 0.0,
            max_points: 1 << 20,
        }
    }

    pub fn with_coarsening(mut self, ratio: f64) -> Self {
        self.coarsen_ratio = ratio;
        self
    }

    pub fn with_max_points(mut self, n: usize) -> Self {
        self.max_points = n;
        self
    }

    fn local_target(&self, kappa: f64) -> f64 {
        if kappa > 0.0 {
            self.h_max.min(self.dtheta_max / kappa)
        } else {
            self.h_max
        }
    }
}

/// Symmetry rule supplying a ghost point beyond one end of a polyline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub(crate) enum EndRule {
    /// No ghost; one-sided stencils.
    #[default]
    Free,
    /// Ghost is the neighbor reflected through the endpoint.
    PointReflect,
    /// Ghost is the neighbor reflected across the x-axis.
    MirrorX,
}

impl EndRule {
    fn ghost(self, endpoint: Point2, neighbor: Point2) -> Option<Point2> {
        match self {
            EndRule::Free => None,
            EndRule::PointReflect => Some(endpoint * 2.0 - neighbor),
            EndRule::MirrorX => Some(neighbor.mirror_x()),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Ends {
    pub start: EndRule,
    pub end: EndRule,
}

impl Ends {
    pub(crate) const QUARTER_ARC: Ends = Ends {
        start: EndRule::PointReflect,
        end: EndRule::MirrorX,
    };

    fn ghosts(self, v: &[Point2]) -> (Option<Point2>, Option<Point2>) {
        let n = v.len();
        (
            self.start.ghost(v[0], v[1]),
            self.end.ghost(v[n - 1], v[n - 2]),
        )
    }
}

/// Redistributes the arc if any segment or vertex violates `policy`;
/// returns an identical copy otherwise. Endpoints are kept exactly.
pub fn resample_arc(arc: &QuarterArc, policy: &ResamplePolicy) -> Result<QuarterArc> {
    let v = arc.vertices();
    let ends = Ends::QUARTER_ARC;
    if conforms(v, ends, policy) {
        return Ok(arc.clone());
    }
    let mut out = redistribute(v, ends, policy)?;
    let n = out.len();
    out[0] = Point2::ORIGIN;
    out[n - 1].y = 0.0;
    validate_arc(&out)?;
    Ok(QuarterArc::from_trusted(out))
}

/// Same as [`resample_arc`] for an open polyline with free ends.
pub fn resample_polyline(points: &[Point2], policy: &ResamplePolicy) -> Result<Vec<Point2>> {
    if points.len() < 2 {
        return Err(Error::InvalidPolyline("need at least two points".into()));
    }
    if conforms(points, Ends::default(), policy) {
        return Ok(points.to_vec());
    }
    redistribute(points, Ends::default(), policy)
}

/// True when `arc` satisfies every limit of `policy`.
pub fn arc_conforms(arc: &QuarterArc, policy: &ResamplePolicy) -> bool {
    conforms(arc.vertices(), Ends::QUARTER_ARC, policy)
}

fn vertex_turnings(v: &[Point2], ends: Ends) -> Vec<f64> {
    let n = v.len();
    let (gs, ge) = ends.ghosts(v);
    (0..n)
        .map(|i| {
            let prev = if i == 0 { gs } else { Some(v[i - 1]) };
            let next = if i + 1 == n { ge } else { Some(v[i + 1]) };
            match (prev, next) {
                (Some(p), Some(r)) => turning_angle(p, v[i], r).abs(),
                _ => 0.0,
            }
        })
        .collect()
}

fn conforms(v: &[Point2], ends: Ends, policy: &ResamplePolicy) -> bool {
    let n = v.len();
    if n > policy.max_points {
        return false;
    }
    let h: Vec<f64> = v.windows(2).map(|w| w[0].distance(w[1])).collect();
    if h.iter().any(|&l| l > policy.h_max) {
        return false;
    }
    // compare sines instead of angles; a non-positive dot product means a
    // turn of at least pi/2, which always violates the cap
    let sin_cap = policy.dtheta_max.min(FRAC_PI_2).sin();
    let (gs, ge) = ends.ghosts(v);
    let mut sin_turn = Vec::with_capacity(n);
    for i in 0..n {
        let prev = if i == 0 { gs } else { Some(v[i - 1]) };
        let next = if i + 1 == n { ge } else { Some(v[i + 1]) };
        let st = match (prev, next) {
            (Some(p), Some(r)) => {
                let (a, b) = (v[i] - p, r - v[i]);
                if a.dot(b) <= 0.0 {
                    return false;
                }
                // ghost segments mirror their neighbours, so the lengths are known
                let ha = if i == 0 { h[0] } else { h[i - 1] };
                let hb = if i + 1 == n { h[n - 2] } else { h[i] };
                a.cross(b).abs() / (ha * hb)
            }
            _ => 0.0,
        };
        if st > sin_cap {
            return false;
        }
        sin_turn.push(st);
    }
    if policy.coarsen_ratio > 0.0 {
        for i in 0..n - 1 {
            // local curvature ~ turning / spacing at the two ends of the segment
            let hl = if i > 0 { h[i - 1] } else { h[i] };
            let hr = if i + 2 < n { h[i + 1] } else { h[i] };
            let k = (2.0 * sin_turn[i] / (hl + h[i])).max(2.0 * sin_turn[i + 1] / (h[i] + hr));
            if h[i] < policy.coarsen_ratio * TARGET_FRACTION * policy.local_target(k) {
                return false;
            }
        }
    }
    true
}

/// C1 cubic Hermite curve through the vertices.
struct HermiteCurve<'a> {
    pts: &'a [Point2],
    tangents: Vec<Point2>,
    chords: Vec<f64>,
}

impl<'a> HermiteCurve<'a> {
    fn new(pts: &'a [Point2], ends: Ends) -> Self {
        let n = pts.len();
        let chords: Vec<f64> = pts.windows(2).map(|w| w[0].distance(w[1])).collect();
        let (gs, ge) = ends.ghosts(pts);
        let tangents = (0..n)
            .map(|i| {
                let prev = if i == 0 { gs } else { Some(pts[i - 1]) };
                let next = if i + 1 == n { ge } else { Some(pts[i + 1]) };
                match (prev, next) {
                    (Some(p), Some(r)) => tangent_at(p, pts[i], r),
                    (None, Some(_)) => one_sided(pts, 0, 1),
                    (Some(_), None) => one_sided(pts, n - 1, -1),
                    (None, None) => Point2::new(1.0, 0.0),
                }
            })
            .collect();
        Self {
            pts,
            tangents,
            chords,
        }
    }

    /// Point at global parameter `g` in `[0, n-1]`.
    fn eval(&self, g: f64) -> Point2 {
        let last = self.pts.len() - 1;
        let i = (g.floor() as usize).min(last - 1);
        let u = g - i as f64;
        let (u2, u3) = (u * u, u * u * u);
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        let h = self.chords[i];
        self.pts[i] * h00 + self.tangents[i] * (h * h10) + self.pts[i + 1] * h01 + self.tangents[i + 1] * (h * h11)
    }
}

/// Unit tangent at an end from the parabola through three points.
fn one_sided(pts: &[Point2], i: usize, dir: isize) -> Point2 {
    let step = |k: isize| pts[(i as isize + k * dir) as usize];
    if pts.len() < 3 {
        let d = (step(1) - step(0)) * dir as f64;
        return d * (1.0 / d.norm());
    }
    let (p0, p1, p2) = (step(0), step(1), step(2));
    let h0 = p0.distance(p1);
    let h1 = p1.distance(p2);
    let s0 = (p1 - p0) * (1.0 / h0);
    let s1 = (p2 - p1) * (1.0 / h1);
    let m = (s0 * (2.0 * h0 + h1) - s1 * h0) * (1.0 / (h0 + h1)) * dir as f64;
    m * (1.0 / m.norm())
}

fn redistribute(v: &[Point2], ends: Ends, policy: &ResamplePolicy) -> Result<Vec<Point2>> {
    let curve = HermiteCurve::new(v, ends);
    let nseg = v.len() - 1;
    let nfine = nseg * FINE_PER_SEGMENT;
    let params: Vec<f64> = (0..=nfine)
        .map(|j| j as f64 / FINE_PER_SEGMENT as f64)
        .collect();
    let fine: Vec<Point2> = params.iter().map(|&g| curve.eval(g)).collect();
    let mut arclen = vec![0.0; fine.len()];
    for j in 1..fine.len() {
        arclen[j] = arclen[j - 1] + fine[j - 1].distance(fine[j]);
    }
    let fine_turn = vertex_turnings(&fine, ends);
    let fine_kappa: Vec<f64> = (0..fine.len())
        .map(|j| {
            let hl = if j > 0 { arclen[j] - arclen[j - 1] } else { 0.0 };
            let hr = if j + 1 < fine.len() { arclen[j + 1] - arclen[j] } else { 0.0 };
            let span = if j == 0 {
                if ends.start == EndRule::Free {
                    return 0.0;
                }
                2.0 * hr
            } else if j + 1 == fine.len() {
                if ends.end == EndRule::Free {
                    return 0.0;
                }
                2.0 * hl
            } else {
                hl + hr
            };
            2.0 * fine_turn[j] / span
        })
        .collect();

    let mut boost = 1.0;
    for _ in 0..MAX_PASSES {
        let density = |k: f64| {
            boost
                * (1.0 / (TARGET_FRACTION * policy.h_max))
                    .max(k / (TARGET_FRACTION * policy.dtheta_max))
        };
        let mut q = vec![0.0; fine.len()];
        for j in 1..fine.len() {
            let ds = arclen[j] - arclen[j - 1];
            q[j] = q[j - 1] + 0.5 * ds * (density(fine_kappa[j - 1]) + density(fine_kappa[j]));
        }
        let total = q[q.len() - 1];
        let segments = total.ceil().max(1.0) as usize;
        if segments + 1 > policy.max_points {
            return Err(Error::BudgetExceeded {
                needed: segments + 1,
                budget: policy.max_points,
            });
        }
        let mut out = Vec::with_capacity(segments + 1);
        out.push(v[0]);
        let mut j = 0;
        for k in 1..segments {
            let target = total * k as f64 / segments as f64;
            while q[j + 1] < target {
                j += 1;
            }
            let s = (target - q[j]) / (q[j + 1] - q[j]);
            out.push(curve.eval(params[j] + s * (params[j + 1] - params[j])));
        }
        out.push(v[v.len() - 1]);

        let ok_len = out.windows(2).all(|w| w[0].distance(w[1]) <= policy.h_max);
        let ok_turn = vertex_turnings(&out, ends)
            .iter()
            .all(|&a| a <= policy.dtheta_max);
        if ok_len && ok_turn {
            return Ok(out);
        }
        boost *= 1.3;
    }
    Err(Error::BudgetExceeded {
        needed: policy.max_points + 1,
        budget: policy.max_points,
    })
}


#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::curvegeom::{arc_measures, hausdorff_distance, ClosedPolyline};
    use crate::seeds::lemniscate_arc;

    fn quarter_circle(n: usize) -> Vec<Point2> {
        (0..n)
            .map(|i| {
                let u = FRAC_PI_2 * i as f64 / (n - 1) as f64;
                Point2::new(u.cos(), u.sin())
            })
            .collect()
    }

    fn max_turning(v: &[Point2]) -> f64 {
        v.windows(3).map(|w| turning_angle(w[0], w[1], w[2]).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn conforming_arc_is_untouched() {
        let arc = lemniscate_arc(1.0, 400).unwrap();
        let policy = ResamplePolicy::new(1.0, 1.0);
        assert!(arc_conforms(&arc, &policy));
        assert_eq!(resample_arc(&arc, &policy).unwrap(), arc);
    }

    #[test]
    fn right_angle_is_rounded() {
        let corner = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0)];
        let out = resample_polyline(&corner, &ResamplePolicy::new(1.0, 0.1)).unwrap();
        assert!(out.len() > 3);
        assert_eq!(out[0], corner[0]);
        assert_eq!(out[out.len() - 1], corner[2]);
        assert!(max_turning(&out) <= 0.1, "{}", max_turning(&out));
    }

    #[test]
    fn halving_h_max_doubles_the_points() {
        let coarse = quarter_circle(16);
        let h_old = coarse[0].distance(coarse[1]);
        let fine = resample_polyline(&coarse, &ResamplePolicy::new(h_old / 2.0, 1.0)).unwrap();
        assert!(fine.len() >= 32, "{}", fine.len());
        assert!(fine.windows(2).all(|w| w[0].distance(w[1]) <= h_old / 2.0));
        let d = hausdorff_distance(
            &ClosedPolyline::new(coarse).unwrap(),
            &ClosedPolyline::new(fine).unwrap(),
        );
        assert!(d <= h_old, "{d}");
    }

    #[test]
    fn budget_is_enforced() {
        let arc = lemniscate_arc(1.0, 64).unwrap();
        let policy = ResamplePolicy::new(1e-3, 0.1).with_max_points(100);
        assert!(matches!(resample_arc(&arc, &policy), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn coarsening_removes_crowded_vertices() {
        let arc = lemniscate_arc(1.0, 800).unwrap();
        let policy = ResamplePolicy::new(0.05, 0.2).with_coarsening(0.5);
        assert!(!arc_conforms(&arc, &policy));
        let out = resample_arc(&arc, &policy).unwrap();
        assert!(out.len() < 800);
        assert!(arc_conforms(&out, &policy));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn lemniscate_area_survives_resampling(h in 0.005f64..0.05, dtheta in 0.03f64..0.3) {
            let arc = lemniscate_arc(1.0, 400).unwrap();
            let a0 = arc_measures(&arc).unwrap().area;
            let out = resample_arc(&arc, &ResamplePolicy::new(h, dtheta)).unwrap();
            let a1 = arc_measures(&out).unwrap().area;
            prop_assert!(((a1 - a0) / a0).abs() <= 1e-4, "{} vs {}", a1, a0);
            prop_assert!(arc_conforms(&out, &ResamplePolicy::new(h, dtheta)));
        }
    }
}
