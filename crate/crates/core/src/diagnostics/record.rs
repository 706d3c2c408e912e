use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::{
    d1, d2, grim_reaper_gap, integral_identity_residual, node_profile, support_profile,
    theta_profile, ThetaInterval, SUPPORT_WINDOW_START,
};
use crate::curvegeom::{arc_measures, reconstruct_figure_eight, QuarterArc};
use crate::error::{Error, Result};
use crate::flowcore::FlowState;
use crate::renorm::{bowtie_distance, migration_point, normalize, region_area, time_map, RenormMode};
use crate::seeds::validate_monotone;

/// One row of the diagnostic trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: f64,
    #[serde(rename = "T_hat")]
    pub t_hat: f64,
    #[serde(rename = "A")]
    pub area: f64,
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "Y")]
    pub y: f64,
    pub alpha: f64,
    pub kappa_top: f64,
    pub kappa_right: f64,
    /// `X / ((T_hat - t) kappa_right)`.
    pub beta: f64,
    /// `ln X - ln(T_hat - t) / 2`.
    pub ell: f64,
    #[serde(rename = "gr_gap_F")]
    pub gr_gap_f: f64,
    #[serde(rename = "gr_gap_Ftheta")]
    pub gr_gap_ftheta: f64,
    pub support_residual: f64,
    pub integral_residual: f64,
    pub node_zero_count: u32,
    pub bowtie_dist: f64,
    pub migration_x: f64,
    pub migration_y: f64,
    /// Area of both lobes after box normalization.
    pub box_area: f64,
    pub convex: bool,
    /// Smallest `kappa_theta` away from the ends.
    pub kappa_theta_margin: f64,
    /// `min (kappa X - 2 sin theta)` over `theta in (0, pi/2]`.
    pub width_kappa_margin: f64,
    pub nodal_ok: Option<bool>,
    /// Change of `T_hat` since the previous row.
    #[serde(rename = "T_hat_drift")]
    pub t_hat_drift: f64,
    /// `beta` with `T_hat + drift`.
    pub beta_lo: f64,
    /// `beta` with `T_hat - drift`; absent when that is not after `t`.
    pub beta_hi: Option<f64>,
    pub vertices: u32,
}

/// Collects every single-slice diagnostic of `state`.
pub fn diag_record(
    state: &FlowState,
    t_hat: f64,
    j: ThetaInterval,
    t_hat_drift: f64,
) -> Result<TraceRecord> {
    let t = state.t;
    let remaining = t_hat - t;
    if !(remaining > 0.0) {
        return Err(Error::PastVanishingTime { t, t_hat });
    }
    let arc = &state.arc;
    let m = arc_measures(arc)?;
    let profile = theta_profile(arc)?;
    let gap = grim_reaper_gap(&profile, j)?;
    let support = support_profile(arc)?;
    let integral = integral_identity_residual(&profile, m.half_height, m.kappa_right)?;
    let node = node_profile(arc, t, t_hat)?;
    let mono = validate_monotone(arc)?;

    let fig = reconstruct_figure_eight(arc);
    let boxed = normalize(&fig, RenormMode::Box)?;
    let mig = migration_point(&boxed)?;

    let beta_at = |rem: f64| m.half_width / (rem * m.kappa_right);
    let width_kappa_margin = profile
        .samples()
        .iter()
        .filter(|s| s.theta > 0.0)
        .map(|s| s.kappa * m.half_width - 2.0 * s.theta.sin())
        .fold(f64::INFINITY, f64::min);

    Ok(TraceRecord {
        t,
        t_hat,
        area: m.area,
        x: m.half_width,
        y: m.half_height,
        alpha: m.alpha,
        kappa_top: m.kappa_top,
        kappa_right: m.kappa_right,
        beta: beta_at(remaining),
        ell: m.half_width.ln() - 0.5 * remaining.ln(),
        gr_gap_f: gap.gap_f,
        gr_gap_ftheta: gap.gap_f_theta,
        support_residual: support.residual,
        integral_residual: integral.residual,
        node_zero_count: node.zero_count as u32,
        bowtie_dist: bowtie_distance(&boxed),
        migration_x: mig.x,
        migration_y: mig.y,
        box_area: region_area(&boxed),
        convex: mono.convex,
        kappa_theta_margin: mono.kappa_theta_margin,
        width_kappa_margin,
        nodal_ok: node.nodal_estimate_ok,
        t_hat_drift,
        beta_lo: beta_at(remaining + t_hat_drift),
        beta_hi: (remaining > t_hat_drift).then(|| beta_at(remaining - t_hat_drift)),
        vertices: arc.len() as u32,
    })
}

/// Residuals of the rescaled curvature and node equations in logarithmic
/// time, from three snapshots. Both are scaled by `max K^3` on the window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParabolicResiduals {
    /// `K_tau = -K/2 + K^2 K_theta_theta + K^3`.
    pub curvature: f64,
    /// `nu_tau = K^2 nu_theta_theta + (K^2 + 1/2) nu`.
    pub node: f64,
}

struct Slice {
    tau: f64,
    theta: Vec<f64>,
    big_k: Vec<f64>,
    nu: Vec<f64>,
}

fn slice(arc: &QuarterArc, t: f64, t_hat: f64) -> Result<Slice> {
    let sp = support_profile(arc)?;
    let rem = t_hat - t;
    let s = rem.sqrt();
    let big_k: Vec<f64> = sp.kappa.iter().map(|k| k * s).collect();
    let nu = sp
        .p
        .iter()
        .zip(&big_k)
        .map(|(p, k)| p / s / 2.0 - k)
        .collect();
    Ok(Slice { tau: time_map(t, t_hat)?, theta: sp.theta, big_k, nu })
}

fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let j = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
    let w = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    ys[j - 1] + w * (ys[j] - ys[j - 1])
}

/// Snapshots are `(arc, t)` in increasing time, all before `t_hat`. These are
/// sensitive to the error in `t_hat` and carry no pass/fail threshold.
pub fn parabolic_residuals(
    snapshots: [(&QuarterArc, f64); 3],
    t_hat: f64,
) -> Result<ParabolicResiduals> {
    let [a, b, c] = snapshots;
    let (sa, sb, sc) = (slice(a.0, a.1, t_hat)?, slice(b.0, b.1, t_hat)?, slice(c.0, c.1, t_hat)?);
    let taus = [sa.tau, sb.tau, sc.tau];
    let mut out = ParabolicResiduals { curvature: 0.0, node: 0.0 };
    let mut scale = 0.0f64;
    let n = sb.theta.len();
    for i in 1..n - 1 {
        let th = sb.theta[i];
        if !(SUPPORT_WINDOW_START..FRAC_PI_2).contains(&th) {
            continue;
        }
        let x = [sb.theta[i - 1], th, sb.theta[i + 1]];
        let k = sb.big_k[i];
        let nu = sb.nu[i];
        let k_tau = d1(taus, [interp(&sa.theta, &sa.big_k, th), k, interp(&sc.theta, &sc.big_k, th)]);
        let nu_tau = d1(taus, [interp(&sa.theta, &sa.nu, th), nu, interp(&sc.theta, &sc.nu, th)]);
        let k_tt = d2(x, [sb.big_k[i - 1], k, sb.big_k[i + 1]]);
        let nu_tt = d2(x, [sb.nu[i - 1], nu, sb.nu[i + 1]]);
        out.curvature = out.curvature.max((k_tau - (-k / 2.0 + k * k * k_tt + k * k * k)).abs());
        out.node = out.node.max((nu_tau - (k * k * nu_tt + (k * k + 0.5) * nu)).abs());
        scale = scale.max(k * k * k);
    }
    if scale > 0.0 {
        out.curvature /= scale;
        out.node /= scale;
    }
    Ok(out)
}
