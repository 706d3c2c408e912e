use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::d1;
use crate::curvegeom::QuarterArc;
use crate::error::{Error, Result};

/// Curvature data at one vertex, indexed by the normal angle `theta`
/// (`theta = -tangent angle`, so it runs from `-alpha` at the double point to
/// `pi/2` at the rightmost point).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaSample {
    pub theta: f64,
    pub kappa: f64,
    pub kappa_theta: f64,
}

/// Curvature as a function of `theta` on `(-alpha, pi/2]`, extended to
/// `(pi/2, pi + alpha)` by the mirror symmetry `kappa(pi - theta) = kappa(theta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaProfile {
    samples: Vec<ThetaSample>,
}

/// Closed angle window inside `(0, pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaInterval {
    pub lo: f64,
    pub hi: f64,
}

impl ThetaInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(0.0 < lo && lo < hi && hi < PI) {
            return Err(Error::Config(format!("need 0 < lo < hi < pi, got [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn quarter_to_three_quarters() -> Self {
        Self { lo: PI / 4.0, hi: 3.0 * PI / 4.0 }
    }
}

/// Per-vertex normal angle, curvature and its `theta`-derivative.
///
/// The double-point vertex is left out (its curvature vanishes). At the
/// rightmost vertex the derivative is zero by symmetry.
pub fn theta_profile(arc: &QuarterArc) -> Result<ThetaProfile> {
    let kappa = arc.lobe_curvatures()?;
    let theta: Vec<f64> = arc.tangent_angles().into_iter().map(|a| -a).collect();
    let n = theta.len();
    if let Some(i) = (1..n).find(|&i| !(theta[i] > theta[i - 1])) {
        return Err(Error::Precondition(format!(
            "normal angle not strictly increasing at vertex {i}"
        )));
    }
    let samples = (1..n)
        .map(|i| ThetaSample {
            theta: theta[i],
            kappa: kappa[i],
            kappa_theta: if i == n - 1 {
                0.0
            } else {
                d1(
                    [theta[i - 1], theta[i], theta[i + 1]],
                    [kappa[i - 1], kappa[i], kappa[i + 1]],
                )
            },
        })
        .collect();
    Ok(ThetaProfile { samples })
}

impl ThetaProfile {
    /// Builds a profile from samples with strictly increasing `theta` ending at
    /// `pi/2`.
    pub fn from_samples(samples: Vec<ThetaSample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Precondition("profile needs at least two samples".into()));
        }
        if let Some(i) = (1..samples.len()).find(|&i| !(samples[i].theta > samples[i - 1].theta)) {
            return Err(Error::Precondition(format!("theta not increasing at sample {i}")));
        }
        let last = samples[samples.len() - 1].theta;
        if (last - FRAC_PI_2).abs() > 1e-9 {
            return Err(Error::Precondition(format!("profile ends at {last}, not pi/2")));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[ThetaSample] {
        &self.samples
    }

    pub fn theta_min(&self) -> f64 {
        self.samples[0].theta
    }

    /// Curvature at the rightmost point.
    pub fn kappa_right(&self) -> f64 {
        self.samples[self.samples.len() - 1].kappa
    }

    /// Linear interpolation with the mirror extension past `pi/2`.
    /// Returns `(kappa, kappa_theta)`.
    pub fn eval(&self, theta: f64) -> Result<(f64, f64)> {
        let (th, sign) = if theta > FRAC_PI_2 { (PI - theta, -1.0) } else { (theta, 1.0) };
        let s = &self.samples;
        if th < s[0].theta {
            return Err(Error::Precondition(format!(
                "theta = {theta} outside the profile range"
            )));
        }
        let j = s.partition_point(|x| x.theta <= th).clamp(1, s.len() - 1);
        let (a, b) = (s[j - 1], s[j]);
        let w = (th - a.theta) / (b.theta - a.theta);
        let k = a.kappa + w * (b.kappa - a.kappa);
        let kt = a.kappa_theta + w * (b.kappa_theta - a.kappa_theta);
        Ok((k, sign * kt))
    }
}

/// Sup-norm distances of the rescaled curvature to the Grim Reaper profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrimReaperGap {
    /// `sup |F - sin|` with `F = kappa / kappa(pi/2)`.
    pub gap_f: f64,
    /// `sup |F_theta - cos|`.
    pub gap_f_theta: f64,
}

/// Evaluation points per unit of angle, on top of the sample angles.
const GAP_GRID_DENSITY: f64 = 2048.0;

pub fn grim_reaper_gap(profile: &ThetaProfile, j: ThetaInterval) -> Result<GrimReaperGap> {
    let kr = profile.kappa_right();
    if !(kr > 0.0) {
        return Err(Error::Precondition(format!("kappa(pi/2) = {kr} is not positive")));
    }
    let lo_min = profile.theta_min();
    if j.lo < lo_min || j.hi > PI - lo_min {
        return Err(Error::Precondition(format!(
            "window [{}, {}] exceeds the profile range",
            j.lo, j.hi
        )));
    }
    let m = ((j.hi - j.lo) * GAP_GRID_DENSITY).ceil() as usize;
    let grid = (0..=m).map(|i| j.lo + (j.hi - j.lo) * i as f64 / m as f64);
    let nodes = profile.samples.iter().flat_map(|s| [s.theta, PI - s.theta]);
    let mut gap = GrimReaperGap { gap_f: 0.0, gap_f_theta: 0.0 };
    for th in grid.chain(nodes.filter(|&t| t >= j.lo && t <= j.hi)) {
        let (k, kt) = profile.eval(th)?;
        gap.gap_f = gap.gap_f.max((k / kr - th.sin()).abs());
        gap.gap_f_theta = gap.gap_f_theta.max((kt / kr - th.cos()).abs());
    }
    Ok(gap)
}

/// Entries within this many ulps of the largest magnitude count as zero.
const ROUNDING_ULPS: f64 = 64.0;

/// Strict sign alternations; zeros (up to rounding relative to the largest
/// entry) take the sign of the preceding entry.
pub fn count_sign_changes(samples: &[f64]) -> usize {
    let scale = samples.iter().map(|x| x.abs()).fold(0.0, f64::max);
    count_sign_changes_tol(samples, ROUNDING_ULPS * f64::EPSILON * scale)
}

/// As [`count_sign_changes`], treating `|x| <= tol` as zero.
pub fn count_sign_changes_tol(samples: &[f64], tol: f64) -> usize {
    let mut last: Option<bool> = None;
    let mut changes = 0;
    for &x in samples {
        if x.abs() <= tol || x.is_nan() {
            continue;
        }
        let pos = x > 0.0;
        if last.is_some_and(|l| l != pos) {
            changes += 1;
        }
        last = Some(pos);
    }
    changes
}

/// The sinusoid through `kappa` and `kappa_theta` at one angle, and how often
/// the profile crosses it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SineComparison {
    /// Squared amplitude `kappa^2 + kappa_theta^2`.
    pub b: f64,
    /// Phase: the sinusoid is `sqrt(b) sin(phi + theta)`.
    pub phi: f64,
    pub zeros: usize,
}

/// Relative tolerance below which a difference counts as zero.
const COMPARATOR_ZERO_TOL: f64 = 1e-9;

pub fn sine_comparator(profile: &ThetaProfile, theta_star: f64) -> Result<SineComparison> {
    let (k, kt) = profile.eval(theta_star)?;
    if !(k > 0.0) {
        return Err(Error::Precondition(format!(
            "kappa({theta_star}) = {k} is not positive"
        )));
    }
    let b = k * k + kt * kt;
    let phi = k.atan2(kt) - theta_star;
    let amp = b.sqrt();
    let diff: Vec<f64> = profile
        .samples
        .iter()
        .map(|s| s.kappa - amp * (phi + s.theta).sin())
        .collect();
    Ok(SineComparison {
        b,
        phi,
        zeros: count_sign_changes_tol(&diff, COMPARATOR_ZERO_TOL * amp),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `kappa = scale * sin` on a uniform grid, with `pi/3` added as a node.
    fn sine_profile(scale: f64, n: usize) -> ThetaProfile {
        let mut th: Vec<f64> = (0..n)
            .map(|i| 0.01 + (FRAC_PI_2 - 0.01) * i as f64 / (n - 1) as f64)
            .filter(|t| (t - PI / 3.0).abs() > 1e-6)
            .collect();
        th.push(PI / 3.0);
        th.sort_by(f64::total_cmp);
        ThetaProfile::from_samples(
            th.into_iter()
                .map(|t| ThetaSample {
                    theta: t,
                    kappa: scale * t.sin(),
                    kappa_theta: scale * t.cos(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn sign_change_examples() {
        assert_eq!(count_sign_changes(&[1.0, 2.0, 3.0]), 0);
        assert_eq!(count_sign_changes(&[1.0, -1.0, 1.0]), 2);
        assert_eq!(count_sign_changes(&[1.0, 0.0, -1.0, 0.0, 0.0, -2.0]), 1);
        assert_eq!(count_sign_changes(&[0.0, 0.0, -1.0, 1.0]), 1);
        // interior zeros of sin on [0, 4 pi] land between samples
        let s: Vec<f64> = (0..100)
            .map(|i| (4.0 * PI * i as f64 / 99.0).sin())
            .collect();
        assert_eq!(count_sign_changes(&s), 3);
    }

    #[test]
    fn exact_reaper_profile_has_no_gap() {
        let p = sine_profile(3.0, 400);
        let g = grim_reaper_gap(&p, ThetaInterval::quarter_to_three_quarters()).unwrap();
        // linear interpolation error of sin at spacing ~4e-3 is ~2e-6
        assert!(g.gap_f < 3e-6, "{g:?}");
        assert!(g.gap_f_theta < 3e-6, "{g:?}");
    }

    #[test]
    fn constant_profile_gap() {
        let p = ThetaProfile::from_samples(
            (0..200)
                .map(|i| ThetaSample {
                    theta: -0.5 + (FRAC_PI_2 + 0.5) * i as f64 / 199.0,
                    kappa: 2.0,
                    kappa_theta: 0.0,
                })
                .collect(),
        )
        .unwrap();
        let g = grim_reaper_gap(&p, ThetaInterval::quarter_to_three_quarters()).unwrap();
        assert!((g.gap_f - (1.0 - 0.5f64.sqrt())).abs() < 1e-3);
        assert!((g.gap_f_theta - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn gap_rejects_windows_outside_the_range() {
        let p = sine_profile(1.0, 50);
        assert!(grim_reaper_gap(&p, ThetaInterval { lo: 0.001, hi: 1.0 }).is_err());
    }

    #[test]
    fn mirror_extension() {
        let p = sine_profile(1.0, 300);
        for th in [0.3, 0.9, 1.4] {
            let (a, at) = p.eval(th).unwrap();
            let (b, bt) = p.eval(PI - th).unwrap();
            // pi - (pi - theta) differs from theta by rounding only
            assert!((a - b).abs() < 1e-14);
            assert!((at + bt).abs() < 1e-14);
        }
    }

    #[test]
    fn comparator_matches_the_sine() {
        let c = sine_comparator(&sine_profile(1.0, 300), PI / 3.0).unwrap();
        assert!((c.b - 1.0).abs() < 1e-12);
        assert!(c.phi.abs() < 1e-12);
        assert_eq!(c.zeros, 0);

        let c = sine_comparator(&sine_profile(2.0, 300), FRAC_PI_2).unwrap();
        assert!((c.b - 4.0).abs() < 1e-12);
        assert!(c.phi.abs() < 1e-12);
    }
}

#[cfg(test)]
mod arc_tests {
    use super::*;
    use crate::curvegeom::{Point2, QuarterArc};
    use crate::seeds::lemniscate_arc;

    fn semicircle(r: f64, n: usize) -> QuarterArc {
        let mut v: Vec<Point2> = (0..n)
            .map(|i| {
                let u = PI * (1.0 - i as f64 / (n - 1) as f64);
                Point2::new(r + r * u.cos(), r * u.sin())
            })
            .collect();
        v[0] = Point2::ORIGIN;
        v[n - 1] = Point2::new(2.0 * r, 0.0);
        QuarterArc::new(v).unwrap()
    }

    /// Grim Reaper piece with `kappa(theta) = sin(theta)` on
    /// `[theta0, pi/2]`: `x = ln(sin theta / sin theta0)`, `y = pi/2 - theta`,
    /// reached from the origin by a steep first segment.
    fn reaper_arc(theta0: f64, n: usize) -> QuarterArc {
        let mut v = vec![Point2::ORIGIN];
        for i in 0..n {
            let th = theta0 + (FRAC_PI_2 - theta0) * i as f64 / (n - 1) as f64;
            v.push(Point2::new(1e-3 + (th.sin() / theta0.sin()).ln(), FRAC_PI_2 - th));
        }
        QuarterArc::new(v).unwrap()
    }

    #[test]
    fn circle_profile_is_flat() {
        let r = 2.0;
        let p = theta_profile(&semicircle(r, 400)).unwrap();
        // the first sample's derivative stencil reaches the double point
        for s in &p.samples()[1..] {
            assert!((s.kappa - 1.0 / r).abs() < 1e-4 / r);
            assert!(s.kappa_theta.abs() <= 2e-4 / r, "{s:?}");
        }
    }

    #[test]
    fn reaper_profile_recovers_the_sine() {
        let p = theta_profile(&reaper_arc(0.05, 1000)).unwrap();
        let worst = p
            .samples()
            .iter()
            .filter(|s| s.theta >= 0.2)
            .map(|s| (s.kappa - s.theta.sin()).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-3, "{worst}");
        let g = grim_reaper_gap(&p, ThetaInterval::quarter_to_three_quarters()).unwrap();
        assert!(g.gap_f <= 1e-3 && g.gap_f_theta <= 1e-2, "{g:?}");
    }

    #[test]
    fn lemniscate_tip_curvature_converges() {
        let coarse = theta_profile(&lemniscate_arc(1.0, 300).unwrap()).unwrap().kappa_right();
        let fine = theta_profile(&lemniscate_arc(1.0, 3000).unwrap()).unwrap().kappa_right();
        assert!(((coarse - fine) / fine).abs() <= 5e-3, "{coarse} vs {fine}");
        // the lemniscate r^2 = cos(2 phi) has curvature 3r, so 3 at the tip
        assert!((fine - 3.0).abs() < 1e-3);
    }

    #[test]
    fn scaled_sine_comparator() {
        let samples = (1..=300)
            .map(|i| {
                let th = FRAC_PI_2 * i as f64 / 300.0;
                ThetaSample { theta: th, kappa: 2.0 * th.sin(), kappa_theta: 2.0 * th.cos() }
            })
            .collect();
        let c = sine_comparator(&ThetaProfile::from_samples(samples).unwrap(), FRAC_PI_2).unwrap();
        assert!((c.b - 4.0).abs() < 1e-12);
        assert!(c.phi.abs() < 1e-12);
        assert_eq!(c.zeros, 0);
    }
}
