use std::fmt;

use serde::{Deserialize, Serialize};

use super::step::{adaptive_dt, advance};
use super::{FlowState, StepControl};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxSteps,
    XFloor,
    /// The discretization can no longer follow the curve: the curvature
    /// outruns the spacing, the point budget is spent, or the step no longer
    /// advances the clock.
    Resolution,
    /// A step broke an arc invariant.
    ResolutionCollapse,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::MaxSteps => "max_steps",
            StopReason::XFloor => "x_floor",
            StopReason::Resolution => "resolution",
            StopReason::ResolutionCollapse => "resolution_collapse",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Read-only callbacks during [`evolve`].
pub trait FlowObserver {
    /// Observe every this many steps (step 0 included).
    fn interval(&self) -> u64;
    fn observe(&mut self, state: &FlowState) -> Result<()>;
    /// Called once with the final state.
    fn finish(&mut self, _state: &FlowState, _stop: StopReason) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct EvolveOutcome {
    pub state: FlowState,
    pub stop: StopReason,
    /// Message of the step error that ended the run, if any.
    pub detail: Option<String>,
}

/// Steps the flow with [`adaptive_dt`] until a stop condition holds.
pub fn evolve(
    mut state: FlowState,
    ctl: &StepControl,
    mut observer: Option<&mut dyn FlowObserver>,
) -> Result<EvolveOutcome> {
    let interval = observer.as_ref().map(|o| o.interval().max(1));
    let mut detail = None;
    let stop = loop {
        if let (Some(o), Some(k)) = (observer.as_deref_mut(), interval) {
            if state.step_index.is_multiple_of(k) {
                o.observe(&state)?;
            }
        }
        if state.step_index >= ctl.max_steps {
            break StopReason::MaxSteps;
        }
        if state.arc.half_width() < ctl.x_floor {
            break StopReason::XFloor;
        }
        let kappa_max = state.arc.max_lobe_curvature().unwrap_or(f64::INFINITY);
        if kappa_max * state.h_min > ctl.kappa_h_stop {
            break StopReason::Resolution;
        }
        let dt = adaptive_dt(&state, ctl);
        if state.t + dt == state.t {
            break StopReason::Resolution;
        }
        match advance(&mut state, dt, ctl) {
            Ok(()) => {}
            Err(e @ (Error::BudgetExceeded { .. } | Error::DegenerateTriple { .. })) => {
                detail = Some(e.to_string());
                break StopReason::Resolution;
            }
            Err(e @ (Error::ResolutionCollapse { .. } | Error::InvalidArc(_))) => {
                detail = Some(e.to_string());
                break StopReason::ResolutionCollapse;
            }
            Err(e) => return Err(e),
        }
    };
    if let Some(o) = observer {
        o.finish(&state, stop)?;
    }
    Ok(EvolveOutcome { state, stop, detail })
}
