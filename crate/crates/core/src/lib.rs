//! Curve shortening flow of monotone figure-eight curves.
//!
//! The flow is tracked on the quarter arc running from the double point to
//! the rightmost point; the full curve follows from its dihedral symmetry.

// NaN must fail every range check, which `!(a < b)` does and `a >= b` does not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curvegeom;
pub mod diagnostics;
pub mod error;
pub mod flowcore;
pub mod renorm;
pub mod runner;
pub mod seeds;

pub use curvegeom::{ArcMeasures, ClosedPolyline, Point2, QuarterArc, ResamplePolicy};
pub use diagnostics::{ThetaInterval, ThetaProfile, TraceRecord};
pub use error::{Error, Result};
pub use flowcore::{FlowState, StepControl, StopReason};
pub use renorm::RenormMode;
pub use seeds::{MonotoneReport, SeedSpec};
