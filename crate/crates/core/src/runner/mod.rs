//! Run configuration, trace and checkpoint files, acceptance checks and SVG
//! snapshots.

mod checkpoint;
mod config;
mod run;
mod svg;
mod trace;
mod verify;

pub use checkpoint::{config_hash, Checkpoint, Provenance, CHECKPOINT_SCHEMA_VERSION};
pub use config::{RunConfig, StepSettings};
pub use run::{run, run_sweep, RunReport, REPORT_SCHEMA_VERSION};
pub use svg::{render_svg, snapshot_svg, SvgOptions};
pub use trace::{read_trace, write_trace, TraceWriter, TRACE_COLUMNS};
pub use verify::{
    circle_oracle, evaluate, verify, CircleOracle, CriterionResult, Status, VerifyReport,
};
