//! Hausdorff distance between closed polylines by dense sampling.
//!
//! Every segment of one curve is sampled at spacing `<= eps`, and each sample
//! is measured against the other curve as a union of segments. The sampled
//! value undershoots the true distance by at most `eps / 2`.

use super::point::point_segment_distance;
use super::{ClosedPolyline, Point2};

const LEAF_SIZE: usize = 8;

#[derive(Debug, Clone, Copy)]
struct Aabb {
    min: Point2,
    max: Point2,
}

impl Aabb {
    fn empty() -> Self {
        Self {
            min: Point2::new(f64::INFINITY, f64::INFINITY),
            max: Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    fn grow(&mut self, p: Point2) {
        self.min.x = self.min.x.min(p.x);
        self.min.y = self.min.y.min(p.y);
        self.max.x = self.max.x.max(p.x);
        self.max.y = self.max.y.max(p.y);
    }

    fn distance(&self, p: Point2) -> f64 {
        let dx = (self.min.x - p.x).max(0.0).max(p.x - self.max.x);
        let dy = (self.min.y - p.y).max(0.0).max(p.y - self.max.y);
        dx.hypot(dy)
    }
}

enum Node {
    Leaf { bounds: Aabb, start: usize, end: usize },
    Split { bounds: Aabb, left: Box<Node>, right: Box<Node> },
}

impl Node {
    fn bounds(&self) -> &Aabb {
        match self {
            Node::Leaf { bounds, .. } | Node::Split { bounds, .. } => bounds,
        }
    }
}

/// Bounding-volume hierarchy over the segments of a polyline, split by index
/// range (consecutive segments are spatially coherent).
pub struct SegmentIndex {
    segments: Vec<(Point2, Point2)>,
    root: Node,
}

impl SegmentIndex {
    pub fn new(segments: Vec<(Point2, Point2)>) -> Self {
        assert!(!segments.is_empty(), "segment index needs at least one segment");
        let root = Self::build(&segments, 0, segments.len());
        Self { segments, root }
    }

    pub fn from_closed(poly: &ClosedPolyline) -> Self {
        Self::new(poly.segments().collect())
    }

    fn build(segs: &[(Point2, Point2)], start: usize, end: usize) -> Node {
        let mut bounds = Aabb::empty();
        for &(a, b) in &segs[start..end] {
            bounds.grow(a);
            bounds.grow(b);
        }
        if end - start <= LEAF_SIZE {
            return Node::Leaf { bounds, start, end };
        }
        let mid = start + (end - start) / 2;
        Node::Split {
            bounds,
            left: Box::new(Self::build(segs, start, mid)),
            right: Box::new(Self::build(segs, mid, end)),
        }
    }

    /// Distance from `p` to the nearest segment.
    pub fn distance(&self, p: Point2) -> f64 {
        let mut best = f64::INFINITY;
        self.visit(&self.root, p, &mut best);
        best
    }

    fn visit(&self, node: &Node, p: Point2, best: &mut f64) {
        if node.bounds().distance(p) >= *best {
            return;
        }
        match node {
            Node::Leaf { start, end, .. } => {
                for &(a, b) in &self.segments[*start..*end] {
                    *best = best.min(point_segment_distance(p, a, b));
                }
            }
            Node::Split { left, right, .. } => {
                let (dl, dr) = (left.bounds().distance(p), right.bounds().distance(p));
                let (first, second) = if dl <= dr { (left, right) } else { (right, left) };
                self.visit(first, p, best);
                self.visit(second, p, best);
            }
        }
    }
}

/// Samples every segment at spacing `<= eps`, endpoints included.
pub fn dense_samples(segments: impl Iterator<Item = (Point2, Point2)>, eps: f64) -> Vec<Point2> {
    let mut out = Vec::new();
    for (a, b) in segments {
        let len = a.distance(b);
        let k = ((len / eps).ceil() as usize).max(1);
        for j in 0..k {
            out.push(a.lerp(b, j as f64 / k as f64));
        }
    }
    out
}

/// `max_{p in a} dist(p, b)` over samples of `a` at spacing `eps`.
pub fn directed_hausdorff(a: &ClosedPolyline, b: &ClosedPolyline, eps: f64) -> f64 {
    let index = SegmentIndex::from_closed(b);
    dense_samples(a.segments(), eps)
        .into_iter()
        .map(|p| index.distance(p))
        .fold(0.0, f64::max)
}

/// Default sampling density: a quarter of the shortest segment of either curve.
pub fn default_eps(a: &ClosedPolyline, b: &ClosedPolyline) -> f64 {
    a.min_segment().min(b.min_segment()) / 4.0
}

/// Symmetric Hausdorff distance with the default sampling density.
pub fn hausdorff_distance(a: &ClosedPolyline, b: &ClosedPolyline) -> f64 {
    hausdorff_distance_with(a, b, default_eps(a, b))
}

pub fn hausdorff_distance_with(a: &ClosedPolyline, b: &ClosedPolyline, eps: f64) -> f64 {
    directed_hausdorff(a, b, eps).max(directed_hausdorff(b, a, eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn square(dx: f64) -> ClosedPolyline {
        ClosedPolyline::new(vec![
            Point2::new(dx, 0.0),
            Point2::new(1.0 + dx, 0.0),
            Point2::new(1.0 + dx, 1.0),
            Point2::new(dx, 1.0),
        ])
        .unwrap()
    }

    fn regular(n: usize, r: f64) -> ClosedPolyline {
        ClosedPolyline::new(
            (0..n)
                .map(|i| {
                    let a = std::f64::consts::TAU * i as f64 / n as f64;
                    Point2::new(r * a.cos(), r * a.sin())
                })
                .collect(),
        )
        .unwrap()
    }

    fn bowtie() -> ClosedPolyline {
        ClosedPolyline::new(vec![
            Point2::new(-1.0, -1.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, -1.0),
            Point2::new(-1.0, 1.0),
        ])
        .unwrap()
    }

    /// Point-to-polyline distance by scanning every segment.
    fn brute_distance(p: Point2, poly: &ClosedPolyline) -> f64 {
        poly.segments()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Uniformly random points along the curve (by arclength).
    fn random_samples(poly: &ClosedPolyline, n: usize, rng: &mut ChaCha8Rng) -> Vec<Point2> {
        let segs: Vec<_> = poly.segments().collect();
        let lens: Vec<f64> = segs.iter().map(|(a, b)| a.distance(*b)).collect();
        let total: f64 = lens.iter().sum();
        (0..n)
            .map(|_| {
                let mut s = rng.gen::<f64>() * total;
                let mut i = 0;
                while s > lens[i] && i + 1 < lens.len() {
                    s -= lens[i];
                    i += 1;
                }
                segs[i].0.lerp(segs[i].1, (s / lens[i]).min(1.0))
            })
            .collect()
    }

    #[test]
    fn identical_is_zero() {
        let c = regular(64, 1.0);
        // samples on a segment are off it only by rounding
        assert!(hausdorff_distance(&c, &c) < 1e-15);
    }

    #[test]
    fn translated_square() {
        let d = 0.3;
        let eps = 0.01;
        let h = hausdorff_distance_with(&square(0.0), &square(d), eps);
        assert!((h - d).abs() <= eps, "{h}");
    }

    #[test]
    fn circle_vs_bowtie_matches_brute_force() {
        let circle = regular(256, 1.0);
        let bt = bowtie();
        let h = hausdorff_distance(&circle, &bt);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut brute = 0.0_f64;
        for p in random_samples(&circle, 10_000, &mut rng) {
            brute = brute.max(brute_distance(p, &bt));
        }
        for p in random_samples(&bt, 10_000, &mut rng) {
            brute = brute.max(brute_distance(p, &circle));
        }
        let eps = default_eps(&circle, &bt);
        assert!((h - brute).abs() <= eps, "h = {h}, brute = {brute}");
        // the crossing of the diagonals is the bowtie point farthest from the circle
        assert!((h - 1.0).abs() <= eps, "{h}");
    }

    #[test]
    fn index_matches_linear_scan() {
        let c = regular(300, 1.3);
        let index = SegmentIndex::from_closed(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let p = Point2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            assert!((index.distance(p) - brute_distance(p, &c)).abs() < 1e-14);
        }
    }
}
