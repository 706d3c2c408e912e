//! Single-time-slice diagnostics: curvature as a function of the normal
//! angle, Grim Reaper gaps, support-function identities, the node function and
//! the aggregated trace row.

mod node;
mod profile;
mod record;
mod support;

pub use node::{node_profile, node_value, NodeProfile};
pub use profile::{
    count_sign_changes, count_sign_changes_tol, grim_reaper_gap, sine_comparator, theta_profile,
    GrimReaperGap, SineComparison, ThetaInterval, ThetaProfile, ThetaSample,
};
pub use record::{diag_record, parabolic_residuals, ParabolicResiduals, TraceRecord};
pub use support::{
    integral_identity_residual, support_profile, IntegralIdentity, SupportProfile,
    SUPPORT_WINDOW_START,
};

/// First derivative at the middle of three non-uniform nodes.
pub(crate) fn d1(x: [f64; 3], f: [f64; 3]) -> f64 {
    let h1 = x[1] - x[0];
    let h2 = x[2] - x[1];
    (-h2 / (h1 * (h1 + h2))) * f[0] + ((h2 - h1) / (h1 * h2)) * f[1] + (h1 / (h2 * (h1 + h2))) * f[2]
}

/// Second derivative at the middle of three non-uniform nodes.
pub(crate) fn d2(x: [f64; 3], f: [f64; 3]) -> f64 {
    let h1 = x[1] - x[0];
    let h2 = x[2] - x[1];
    2.0 * (f[0] / (h1 * (h1 + h2)) - f[1] / (h1 * h2) + f[2] / (h2 * (h1 + h2)))
}
