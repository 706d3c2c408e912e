//! Initial curves: the Bernoulli lemniscate and arcs read from point files.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::curvegeom::{turning_angle, validate_arc, ClosedPolyline, Point2, QuarterArc};
use crate::diagnostics::theta_profile;
use crate::error::{Error, Result};

/// Samples of the unit lemniscate used to tabulate arclength.
const ARCLENGTH_TABLE: usize = 200_000;

/// Unit-scale lemniscate point at parameter `u` (`u = 0` is the rightmost
/// point, `u = pi/2` the double point).
pub fn lemniscate_point(u: f64) -> Point2 {
    let s = u.sin();
    let c = u.cos();
    let d = 1.0 + s * s;
    Point2::new(c / d, s * c / d)
}

/// Quarter arc of the lemniscate `r^2 = a^2 cos(2 phi)` with `n` vertices
/// equally spaced in arclength, from the origin to `(a, 0)`.
pub fn lemniscate_arc(a: f64, n: usize) -> Result<QuarterArc> {
    if !(a > 0.0) {
        return Err(Error::Config(format!("lemniscate scale must be positive, got {a}")));
    }
    if n < 32 {
        return Err(Error::Config(format!("lemniscate needs n >= 32, got {n}")));
    }
    // arclength from the origin, tabulated on a dense grid of u
    let us: Vec<f64> = (0..=ARCLENGTH_TABLE)
        .map(|j| FRAC_PI_2 * (1.0 - j as f64 / ARCLENGTH_TABLE as f64))
        .collect();
    let mut s = vec![0.0; us.len()];
    let mut prev = lemniscate_point(us[0]);
    for j in 1..us.len() {
        let p = lemniscate_point(us[j]);
        s[j] = s[j - 1] + prev.distance(p);
        prev = p;
    }
    let total = s[s.len() - 1];
    let mut pts = Vec::with_capacity(n);
    pts.push(Point2::ORIGIN);
    let mut j = 0;
    for k in 1..n - 1 {
        let target = total * k as f64 / (n - 1) as f64;
        while s[j + 1] < target {
            j += 1;
        }
        let w = (target - s[j]) / (s[j + 1] - s[j]);
        let u = us[j] + w * (us[j + 1] - us[j]);
        pts.push(lemniscate_point(u) * a);
    }
    pts.push(Point2::new(a, 0.0));
    QuarterArc::new(pts)
}

/// Where a seed comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeedSpec {
    Lemniscate { a: f64, n: usize },
    FromPoints { source_path: std::path::PathBuf },
    /// A round circle; a closed control run with a known vanishing time.
    Circle { radius: f64, n: usize },
}

impl SeedSpec {
    pub fn build(&self) -> Result<QuarterArc> {
        match self {
            SeedSpec::Lemniscate { a, n } => lemniscate_arc(*a, *n),
            SeedSpec::FromPoints { source_path } => ingest_arc(&read_points_csv(source_path)?),
            SeedSpec::Circle { .. } => Err(Error::Precondition(
                "a circle seed is a closed curve, not a quarter arc".into(),
            )),
        }
    }
}

/// Regular `n`-gon inscribed in the circle of radius `r` about the origin,
/// counterclockwise from `(r, 0)`.
pub fn circle_polygon(r: f64, n: usize) -> Result<ClosedPolyline> {
    if !(r > 0.0) || n < 3 {
        return Err(Error::Precondition(format!("circle needs r > 0 and n >= 3, got r = {r}, n = {n}")));
    }
    ClosedPolyline::new(
        (0..n)
            .map(|i| {
                let u = std::f64::consts::TAU * i as f64 / n as f64;
                Point2::new(r * u.cos(), r * u.sin())
            })
            .collect(),
    )
}

/// Reads `x,y` rows; a first row that does not parse as numbers is taken as a
/// header.
pub fn read_points_csv(path: &Path) -> Result<Vec<Point2>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::Config(format!("{}: {other:?}", path.display())),
        })?;
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parsed = (rec.get(0), rec.get(1), rec.len());
        let (x, y) = match parsed {
            (Some(x), Some(y), 2) => (x.parse::<f64>(), y.parse::<f64>()),
            _ => {
                return Err(Error::Config(format!(
                    "{}: line {}: expected two columns",
                    path.display(),
                    row + 1
                )))
            }
        };
        match (x, y) {
            (Ok(x), Ok(y)) => out.push(Point2::new(x, y)),
            _ if row == 0 => continue,
            _ => {
                return Err(Error::Config(format!(
                    "{}: line {}: not a number",
                    path.display(),
                    row + 1
                )))
            }
        }
    }
    Ok(out)
}

/// Turns a list of points into a quarter arc: orients it to start at the
/// origin, snaps the endpoint constraints and checks x-monotonicity and
/// convexity, reporting every violating index.
pub fn ingest_arc(points: &[Point2]) -> Result<QuarterArc> {
    let n = points.len();
    if n < 8 {
        return Err(Error::Underresolved { got: n, need: 8 });
    }
    let mut pts = points.to_vec();
    if pts[n - 1].norm() < pts[0].norm() {
        pts.reverse();
    }
    let scale = pts[n - 1].x.abs().max(f64::MIN_POSITIVE);
    let snap_tol = 1e-6 * scale;
    if pts[0].norm() > snap_tol {
        return Err(Error::Rejected {
            indices: vec![0],
            reason: format!("first point {:?} is not at the origin", pts[0]),
        });
    }
    if pts[n - 1].y.abs() > snap_tol {
        return Err(Error::Rejected {
            indices: vec![n - 1],
            reason: format!("last point {:?} is not on the x-axis", pts[n - 1]),
        });
    }
    pts[0] = Point2::ORIGIN;
    pts[n - 1].y = 0.0;

    let non_monotone: Vec<usize> = (1..n).filter(|&i| !(pts[i].x > pts[i - 1].x)).collect();
    if !non_monotone.is_empty() {
        return Err(Error::Rejected {
            indices: non_monotone,
            reason: "x is not strictly increasing".into(),
        });
    }
    let concave: Vec<usize> = (1..n - 1)
        .filter(|&i| (pts[i] - pts[i - 1]).cross(pts[i + 1] - pts[i]) > 0.0)
        .collect();
    if !concave.is_empty() {
        return Err(Error::Rejected {
            indices: concave,
            reason: "arc is not convex".into(),
        });
    }
    validate_arc(&pts)?;
    QuarterArc::new(pts)
}

/// Vertices dropped at each end of the `kappa_theta` check.
pub const MONOTONE_END_MARGIN: usize = 3;
/// Vertices in the least-squares slope of curvature against x at the origin.
const KX_FIT_POINTS: usize = 5;
/// `kappa_theta` counts as positive above this fraction of the peak curvature.
const KAPPA_THETA_TOL: f64 = 1e-8;
/// `kappa_theta_theta` at the rightmost point counts as nonzero above this
/// fraction of the curvature there.
const NONDEGENERACY_TOL: f64 = 1e-3;

/// Discrete check of the monotone figure-eight conditions on a quarter arc.
/// Real-analyticity is assumed, not checked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotoneReport {
    /// All turning angles have the lobe's sign.
    pub convex: bool,
    /// Largest turning angle (negative when convex).
    pub convex_margin: f64,
    pub kappa_theta_positive: bool,
    /// Smallest `kappa_theta` over the profile minus the end margins.
    pub kappa_theta_margin: f64,
    /// Second `theta`-derivative of curvature at the rightmost point.
    pub kappa_theta_theta_at_right: f64,
    pub kappa_theta_theta_nonzero: bool,
    /// Slope of curvature against x next to the double point.
    pub kx_at_origin: f64,
    pub kx_positive: bool,
}

impl MonotoneReport {
    pub fn passes(&self) -> bool {
        self.convex && self.kappa_theta_positive && self.kappa_theta_theta_nonzero && self.kx_positive
    }
}

pub fn validate_monotone(arc: &QuarterArc) -> Result<MonotoneReport> {
    let v = arc.vertices();
    let n = v.len();
    let convex_margin = v
        .windows(3)
        .map(|w| turning_angle(w[0], w[1], w[2]))
        .fold(f64::NEG_INFINITY, f64::max);

    let profile = theta_profile(arc)?;
    let s = profile.samples();
    let m = s.len();
    let kappa_max = s.iter().map(|x| x.kappa).fold(0.0, f64::max);
    let kappa_theta_margin = s[MONOTONE_END_MARGIN.min(m - 1)..m.saturating_sub(MONOTONE_END_MARGIN).max(1)]
        .iter()
        .map(|x| x.kappa_theta)
        .fold(f64::INFINITY, f64::min);

    // kappa is even about pi/2; the mirrored neighbour gives a centred stencil
    let (tip, prev) = (s[m - 1], s[m - 2]);
    let h = FRAC_PI_2 - prev.theta;
    let kappa_tt = 2.0 * (prev.kappa - tip.kappa) / (h * h);

    let kappa = arc.lobe_curvatures()?;
    let k = KX_FIT_POINTS.min(n);
    let mean_x = v[..k].iter().map(|p| p.x).sum::<f64>() / k as f64;
    let mean_k = kappa[..k].iter().sum::<f64>() / k as f64;
    let (sxy, sxx) = (0..k).fold((0.0, 0.0), |(sxy, sxx), i| {
        let dx = v[i].x - mean_x;
        (sxy + dx * (kappa[i] - mean_k), sxx + dx * dx)
    });
    let kx = sxy / sxx;

    Ok(MonotoneReport {
        convex: convex_margin <= 0.0,
        convex_margin,
        kappa_theta_positive: kappa_theta_margin > KAPPA_THETA_TOL * kappa_max,
        kappa_theta_margin,
        kappa_theta_theta_at_right: kappa_tt,
        kappa_theta_theta_nonzero: kappa_tt.abs() > NONDEGENERACY_TOL * tip.kappa,
        kx_at_origin: kx,
        kx_positive: kx > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_4, PI};
    use std::io::Write;

    use super::*;
    use crate::curvegeom::arc_measures;

    #[test]
    fn lemniscate_endpoints_are_exact() {
        let v = lemniscate_arc(1.0, 64).unwrap().into_vertices();
        assert_eq!(v[0], Point2::ORIGIN);
        assert_eq!(v[63], Point2::new(1.0, 0.0));
    }

    #[test]
    fn lemniscate_height_matches_grid_search() {
        let m = 1_000_000;
        let y_hat = (0..=m)
            .map(|j| lemniscate_point(FRAC_PI_2 * j as f64 / m as f64).y)
            .fold(f64::NEG_INFINITY, f64::max);
        let y = arc_measures(&lemniscate_arc(1.0, 800).unwrap()).unwrap().half_height;
        assert!((y - y_hat).abs() <= 1e-5, "{y} vs {y_hat}");
    }

    #[test]
    fn lemniscate_is_homogeneous() {
        let one = lemniscate_arc(1.0, 100).unwrap();
        let two = lemniscate_arc(2.0, 100).unwrap();
        for (p, q) in one.vertices().iter().zip(two.vertices()) {
            assert_eq!(*p * 2.0, *q);
        }
    }

    #[test]
    fn bad_lemniscate_parameters() {
        assert!(lemniscate_arc(0.0, 100).is_err());
        assert!(lemniscate_arc(1.0, 31).is_err());
    }

    #[test]
    fn ingest_is_idempotent_on_lemniscates() {
        let arc = lemniscate_arc(1.0, 300).unwrap();
        let back = ingest_arc(arc.vertices()).unwrap();
        for (p, q) in arc.vertices().iter().zip(back.vertices()) {
            assert!(p.distance(*q) <= 1e-12);
        }
    }

    #[test]
    fn ingest_fixes_orientation() {
        let arc = lemniscate_arc(1.0, 120).unwrap();
        let mut rev = arc.vertices().to_vec();
        rev.reverse();
        assert_eq!(ingest_arc(&rev).unwrap(), arc);
    }

    #[test]
    fn ingest_snaps_endpoints() {
        let mut v = lemniscate_arc(1.0, 120).unwrap().into_vertices();
        v[0] = Point2::new(1e-8, -1e-8);
        v[119].y = 3e-8;
        let arc = ingest_arc(&v).unwrap();
        assert_eq!(arc.vertices()[0], Point2::ORIGIN);
        assert_eq!(arc.vertices()[119].y, 0.0);
    }

    #[test]
    fn ingest_names_a_concave_blip() {
        let mut v = lemniscate_arc(1.0, 120).unwrap().into_vertices();
        v[50].y -= 5e-3;
        match ingest_arc(&v) {
            Err(Error::Rejected { indices, .. }) => assert!(indices.contains(&50), "{indices:?}"),
            other => panic!("{other:?}"),
        }
        let mut v = lemniscate_arc(1.0, 120).unwrap().into_vertices();
        v.swap(70, 71);
        match ingest_arc(&v) {
            Err(Error::Rejected { indices, .. }) => assert!(indices.contains(&71), "{indices:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn points_file_with_header_and_comments() {
        let arc = lemniscate_arc(1.0, 40).unwrap();
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "x,y").unwrap();
        writeln!(f, "# lemniscate quarter").unwrap();
        for p in arc.vertices() {
            writeln!(f, "{:e},{:e}", p.x, p.y).unwrap();
        }
        let spec = SeedSpec::FromPoints { source_path: f.path().to_path_buf() };
        assert_eq!(spec.build().unwrap(), arc);
    }

    #[test]
    fn lemniscate_family_is_monotone() {
        for a in [0.5, 1.0, 2.0] {
            for n in [200, 400, 800] {
                let arc = lemniscate_arc(a, n).unwrap();
                let r = validate_monotone(&arc).unwrap();
                assert!(r.passes(), "a = {a}, n = {n}: {r:?}");
                let m = arc_measures(&arc).unwrap();
                assert!((m.area - a * a).abs() <= 1e-3 * a * a);
                assert_eq!(m.half_width, a);
                assert!((m.alpha - FRAC_PI_4).abs() <= 2e-3);
            }
        }
    }

    #[test]
    fn constant_curvature_is_not_monotone() {
        // upper half of the circle of radius 1 through the origin
        let n = 200;
        let v: Vec<Point2> = (0..n)
            .map(|i| {
                let u = PI * (1.0 - i as f64 / (n - 1) as f64);
                Point2::new(1.0 + u.cos(), u.sin())
            })
            .collect();
        let mut v = v;
        v[0] = Point2::ORIGIN;
        v[n - 1] = Point2::new(2.0, 0.0);
        let r = validate_monotone(&QuarterArc::new(v).unwrap()).unwrap();
        assert!(r.convex);
        assert!(!r.kappa_theta_positive, "{r:?}");
    }

    #[test]
    fn tip_second_derivative_is_resolution_stable() {
        let coarse = validate_monotone(&lemniscate_arc(1.0, 200).unwrap()).unwrap();
        let fine = validate_monotone(&lemniscate_arc(1.0, 2000).unwrap()).unwrap();
        let (c, f) = (coarse.kappa_theta_theta_at_right, fine.kappa_theta_theta_at_right);
        assert!(((c - f) / f).abs() <= 0.05, "{c} vs {f}");
        assert!(coarse.kx_at_origin > 0.0);
    }

    #[test]
    fn circle_seed_is_not_an_arc() {
        let spec = SeedSpec::Circle { radius: 1.0, n: 64 };
        assert!(matches!(spec.build(), Err(Error::Precondition(_))));
        let poly = circle_polygon(2.0, 64).unwrap();
        assert!((poly.vertices()[16].y - 2.0).abs() < 1e-15);
    }
}
