//! Front-tracking integration of the curve shortening flow on the quarter
//! arc, with symmetry boundary rules, adaptive steps and resampling.

mod evolve;
mod step;
mod velocity;

use serde::{Deserialize, Serialize};

use crate::curvegeom::{QuarterArc, ResamplePolicy};

pub use evolve::{evolve, EvolveOutcome, FlowObserver, StopReason};
pub use step::{
    adaptive_dt, csf_step, csf_step_closed, estimate_vanishing_time, evolve_closed,
    vanishing_time_from,
    AREA_RATE_TURNS,
};
pub use velocity::{csf_velocity, csf_velocity_closed};

/// Step-size, resampling and stopping controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    /// Fraction of the explicit parabolic limit `h_min^2 / 2`.
    pub safety: f64,
    /// Largest turning angle per vertex before refinement (radians).
    pub dtheta_max: f64,
    /// Longest segment at the initial scale; scaled with the half-width.
    pub h_max: f64,
    /// Stop once `max(kappa) * h_min` exceeds this.
    pub kappa_h_stop: f64,
    /// Stop once the half-width falls below this.
    pub x_floor: f64,
    /// Stop once this many steps have been taken in total.
    pub max_steps: u64,
    /// Redistribute when a segment is shorter than this fraction of its
    /// local target spacing.
    pub coarsen_ratio: f64,
    /// Resampling point budget; exceeding it ends the run.
    pub max_points: usize,
}

impl StepControl {
    /// Controls matched to an arc of `n` vertices with total length `length`.
    pub fn for_resolution(length: f64, n: usize) -> Self {
        Self {
            safety: 0.4,
            dtheta_max: 0.1,
            h_max: 1.5 * length / (n - 1) as f64,
            kappa_h_stop: 0.3,
            x_floor: 0.0,
            max_steps: u64::MAX,
            coarsen_ratio: 0.5,
            max_points: 8 * n,
        }
    }

    /// Resampling policy at the current half-width `x` (the initial half-width
    /// being `x_initial`).
    pub fn policy_at(&self, x: f64, x_initial: f64) -> ResamplePolicy {
        ResamplePolicy::new(self.h_max * x / x_initial, self.dtheta_max)
            .with_coarsening(self.coarsen_ratio)
            .with_max_points(self.max_points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FlowEventKind {
    Resample { from: usize, to: usize },
}

/// Logged redistribution (the only tangential motion of vertices).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowEvent {
    pub step: u64,
    pub t: f64,
    pub kind: FlowEventKind,
}

/// The evolving curve and its bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub arc: QuarterArc,
    pub t: f64,
    pub step_index: u64,
    pub h_min: f64,
    /// Half-width at the start of the run; sets the scale of `h_max`.
    pub x_initial: f64,
    pub events: Vec<FlowEvent>,
}

impl FlowState {
    pub fn new(arc: QuarterArc) -> Self {
        Self::at_time(arc, 0.0)
    }

    pub fn at_time(arc: QuarterArc, t: f64) -> Self {
        let h_min = arc.min_segment();
        let x_initial = arc.half_width();
        Self {
            arc,
            t,
            step_index: 0,
            h_min,
            x_initial,
            events: Vec::new(),
        }
    }
}
