use super::{ClosedPolyline, Point2, QuarterArc};

/// Unfolds the quarter arc into the full figure-eight.
///
/// The right lobe is the arc followed by its x-axis mirror (reversed, without
/// the repeated rightmost vertex). The left lobe is the right lobe reflected
/// across the y-axis, which as a set equals its half-turn image and keeps the
/// strands passing straight through the double point. The origin occurs twice,
/// once per strand.
pub fn reconstruct_figure_eight(arc: &QuarterArc) -> ClosedPolyline {
    let v = arc.vertices();
    let n = v.len();
    let mut right = Vec::with_capacity(2 * n - 2);
    right.extend_from_slice(v);
    right.extend(v[1..n - 1].iter().rev().map(|p| p.mirror_x()));
    let mut all = Vec::with_capacity(4 * n - 4);
    all.extend_from_slice(&right);
    all.extend(right.iter().map(|p| p.mirror_y()));
    ClosedPolyline::new(all).expect("a valid quarter arc unfolds to a valid closed polyline")
}

/// Index of the second occurrence of the double point in a reconstructed
/// figure-eight (the first is index 0).
pub fn second_crossing_index(arc_len: usize) -> usize {
    2 * arc_len - 2
}

fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> Option<Point2> {
    let r = b - a;
    let s = d - c;
    let denom = r.cross(s);
    if denom == 0.0 {
        return None;
    }
    let t = (c - a).cross(s) / denom;
    let u = (c - a).cross(r) / denom;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Some(a + r * t)
    } else {
        None
    }
}

/// Intersection points between non-adjacent segments.
pub fn self_intersections(poly: &ClosedPolyline) -> Vec<Point2> {
    let segs: Vec<_> = poly.segments().collect();
    let n = segs.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if let Some(p) = segments_intersect(segs[i].0, segs[i].1, segs[j].0, segs[j].1) {
                out.push(p);
            }
        }
    }
    out
}
