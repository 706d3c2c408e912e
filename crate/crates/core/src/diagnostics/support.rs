use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::{d1, d2, ThetaProfile};
use crate::curvegeom::QuarterArc;
use crate::error::{Error, Result};

/// Lower end of the angle window on which the support identity is checked.
/// Below it the curvature falls toward zero at the double point and the
/// identity's `1 / kappa` term is not resolved.
pub const SUPPORT_WINDOW_START: f64 = 0.0;

/// Support function `p = C . n(theta)`, `n = (sin theta, cos theta)`, sampled
/// at every vertex but the double point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportProfile {
    pub theta: Vec<f64>,
    pub p: Vec<f64>,
    pub p_theta: Vec<f64>,
    pub p_theta_theta: Vec<f64>,
    pub kappa: Vec<f64>,
    /// `max |kappa (p + p_theta_theta) - 1|` over the window
    /// `theta >= SUPPORT_WINDOW_START`.
    pub residual: f64,
}

pub fn support_profile(arc: &QuarterArc) -> Result<SupportProfile> {
    let v = arc.vertices();
    let n = v.len();
    let kappa = arc.lobe_curvatures()?;
    let theta: Vec<f64> = arc.tangent_angles().into_iter().map(|a| -a).collect();
    let p: Vec<f64> = v
        .iter()
        .zip(&theta)
        .map(|(c, &th)| c.x * th.sin() + c.y * th.cos())
        .collect();

    let mut out = SupportProfile {
        theta: theta[1..].to_vec(),
        p: p[1..].to_vec(),
        p_theta: Vec::with_capacity(n - 1),
        p_theta_theta: Vec::with_capacity(n - 1),
        kappa: kappa[1..].to_vec(),
        residual: 0.0,
    };
    for i in 1..n {
        // p is even about pi/2, so the rightmost vertex uses a mirrored neighbor
        let (x, f) = if i == n - 1 {
            ([theta[i - 1], FRAC_PI_2, PI - theta[i - 1]], [p[i - 1], p[i], p[i - 1]])
        } else {
            ([theta[i - 1], theta[i], theta[i + 1]], [p[i - 1], p[i], p[i + 1]])
        };
        out.p_theta.push(if i == n - 1 { 0.0 } else { d1(x, f) });
        out.p_theta_theta.push(d2(x, f));
    }
    out.residual = (0..n - 1)
        .filter(|&k| out.theta[k] >= SUPPORT_WINDOW_START)
        .map(|k| (out.kappa[k] * (out.p[k] + out.p_theta_theta[k]) - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(out)
}

/// Quadrature check of `Y kappa(pi/2) = integral of sin / F` over `[0, pi/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralIdentity {
    pub integral: f64,
    /// Quadrature cutoff; `[0, eps_q]` is covered by a rectangle.
    pub eps_q: f64,
    /// `|Y kappa_right - integral| / (Y kappa_right)`.
    pub residual: f64,
}

const MAX_EPS_Q: f64 = 0.05;

/// Trapezoid rule on the profile samples over `[eps_q, pi/2]`. The cutoff is
/// the sample spacing at `theta = 0` (at most 0.05), so the rectangle on
/// `[0, eps_q]` costs only a second-order error.
pub fn integral_identity_residual(
    profile: &ThetaProfile,
    y: f64,
    kappa_right: f64,
) -> Result<IntegralIdentity> {
    let s = profile.samples();
    let j = s.partition_point(|x| x.theta <= 0.0);
    if j == 0 || j == s.len() {
        return Err(Error::Precondition("profile does not straddle theta = 0".into()));
    }
    let eps_q = (s[j].theta - s[j - 1].theta).min(MAX_EPS_Q);
    let kr = profile.kappa_right();
    let g = |th: f64, k: f64| th.sin() * kr / k;

    let (k0, _) = profile.eval(eps_q)?;
    let mut prev = (eps_q, g(eps_q, k0));
    let mut integral = prev.1 * eps_q;
    for x in s.iter().filter(|x| x.theta > eps_q) {
        let cur = (x.theta, g(x.theta, x.kappa));
        integral += 0.5 * (cur.0 - prev.0) * (cur.1 + prev.1);
        prev = cur;
    }
    let lhs = y * kappa_right;
    Ok(IntegralIdentity {
        integral,
        eps_q,
        residual: (lhs - integral).abs() / lhs,
    })
}
