//! Benchmark fixtures shared by the criterion targets.

use bowtie_core::curvegeom::reconstruct_figure_eight;
use bowtie_core::flowcore::{FlowState, StepControl};
use bowtie_core::seeds::lemniscate_arc;
use bowtie_core::ClosedPolyline;

/// Lemniscate seed state with reference step controls.
pub fn lemniscate_state(n: usize) -> (FlowState, StepControl) {
    let arc = lemniscate_arc(1.0, n).expect("lemniscate seed");
    let ctl = StepControl::for_resolution(arc.length(), arc.len());
    (FlowState::new(arc), ctl)
}

pub fn lemniscate_figure(n: usize) -> ClosedPolyline {
    reconstruct_figure_eight(&lemniscate_arc(1.0, n).expect("lemniscate seed"))
}
