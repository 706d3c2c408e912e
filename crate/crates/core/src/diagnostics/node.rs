use serde::{Deserialize, Serialize};

use super::count_sign_changes;
use crate::curvegeom::QuarterArc;
use crate::error::{Error, Result};

/// Node function `nu = P/2 - K` of the parabolically rescaled curve, where
/// `P = p / sqrt(T - t)` and `K = kappa sqrt(T - t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeProfile {
    pub theta: Vec<f64>,
    pub nu: Vec<f64>,
    pub zero_count: usize,
    /// Whether `P < K` on the rescaled arc within unit length of the double
    /// point; `None` when the rescaled quarter arc is shorter than that.
    pub nodal_estimate_ok: Option<bool>,
}

/// `nu` at one point from the support value, the curvature and the remaining
/// time `T - t`.
pub fn node_value(support: f64, kappa: f64, remaining: f64) -> f64 {
    let s = remaining.sqrt();
    support / s / 2.0 - kappa * s
}

/// Evaluates the node function at every vertex but the double point.
pub fn node_profile(arc: &QuarterArc, t: f64, t_hat: f64) -> Result<NodeProfile> {
    if !(t < t_hat) {
        return Err(Error::PastVanishingTime { t, t_hat });
    }
    let v = arc.vertices();
    let n = v.len();
    let s = 1.0 / (t_hat - t).sqrt();
    let kappa = arc.lobe_curvatures()?;
    let theta: Vec<f64> = arc.tangent_angles().into_iter().map(|a| -a).collect();

    let mut out = NodeProfile {
        theta: theta[1..].to_vec(),
        nu: Vec::with_capacity(n - 1),
        zero_count: 0,
        nodal_estimate_ok: None,
    };
    let mut arclength = 0.0;
    let mut ok = true;
    for i in 1..n {
        let c = v[i];
        let p = c.x * theta[i].sin() + c.y * theta[i].cos();
        let (big_p, big_k) = (s * p, kappa[i] / s);
        out.nu.push(node_value(p, kappa[i], t_hat - t));
        arclength += s * v[i - 1].distance(c);
        if arclength <= 1.0 {
            ok &= big_p < big_k;
        } else if out.nodal_estimate_ok.is_none() {
            out.nodal_estimate_ok = Some(ok);
        }
    }
    out.zero_count = count_sign_changes(&out.nu);
    Ok(out)
}
