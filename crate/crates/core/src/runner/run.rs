use std::f64::consts::PI;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::checkpoint::{config_hash, Checkpoint, Provenance};
use super::trace::TraceWriter;
use super::RunConfig;
use crate::diagnostics::{diag_record, TraceRecord};
use crate::error::{Error, Result};
use crate::curvegeom::ClosedPolyline;
use crate::flowcore::{csf_step_closed, estimate_vanishing_time, evolve, FlowObserver, FlowState, StopReason};
use crate::seeds::{circle_polygon, SeedSpec};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Summary written to `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config_hash: String,
    pub stop_reason: StopReason,
    /// Message of the step error behind the stop, if any.
    pub stop_detail: Option<String>,
    pub steps: u64,
    pub t_end: f64,
    #[serde(rename = "T_hat")]
    pub t_hat: f64,
    pub trace_rows: usize,
    pub resample_events: usize,
    pub initial: TraceRecord,
    #[serde(rename = "final")]
    pub last: TraceRecord,
}

struct Recorder<'a, W: Write> {
    config: &'a RunConfig,
    provenance: Provenance,
    trace: TraceWriter<W>,
    checkpoint_dir: PathBuf,
    prev_t_hat: Option<f64>,
    first: Option<TraceRecord>,
    last: Option<TraceRecord>,
    last_step: Option<u64>,
    rows: usize,
}

impl<W: Write> Recorder<'_, W> {
    fn record(&mut self, state: &FlowState) -> Result<()> {
        let t_hat = estimate_vanishing_time(state)?;
        let drift = self.prev_t_hat.map_or(0.0, |p| (t_hat - p).abs());
        let rec = diag_record(state, t_hat, self.config.j, drift)?;
        self.trace.write(&rec)?;
        self.prev_t_hat = Some(t_hat);
        self.first.get_or_insert_with(|| rec.clone());
        self.last = Some(rec);
        self.last_step = Some(state.step_index);
        self.rows += 1;
        Ok(())
    }

    fn checkpoint(&self, state: &FlowState, stop: Option<StopReason>, name: &str) -> Result<()> {
        let t_hat = estimate_vanishing_time(state)?;
        Checkpoint::new(state, t_hat, stop, self.provenance.clone())
            .save(&self.checkpoint_dir.join(name))
    }
}

impl<W: Write> FlowObserver for Recorder<'_, W> {
    fn interval(&self) -> u64 {
        1
    }

    fn observe(&mut self, state: &FlowState) -> Result<()> {
        let step = state.step_index;
        if step.is_multiple_of(self.config.diag_interval) {
            self.record(state)?;
        }
        let every = self.config.checkpoint_every;
        if every > 0 && step.is_multiple_of(every) {
            self.checkpoint(state, None, &format!("step_{step:012}.json"))?;
        }
        Ok(())
    }

    fn finish(&mut self, state: &FlowState, stop: StopReason) -> Result<()> {
        if self.last_step != Some(state.step_index) {
            self.record(state)?;
        }
        self.checkpoint(state, Some(stop), "final.json")?;
        self.trace.flush()
    }
}

/// Evolves the configured seed to a stop condition, writing `trace.csv`,
/// `checkpoints/` and `report.json` under `out_dir`.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let out = &config.out_dir;
    let checkpoint_dir = out.join("checkpoints");
    fs::create_dir_all(&checkpoint_dir).map_err(|e| Error::io(&checkpoint_dir, e))?;
    config.save(&out.join("config.json"))?;

    if let SeedSpec::Circle { radius, n } = config.seed {
        return run_circle(config, radius, n);
    }
    let seed = config.seed.build()?;
    let ctl = config.step.resolve(&seed);
    let provenance = Provenance::of(config)?;
    let mut rec = Recorder {
        config,
        provenance,
        trace: TraceWriter::create(&out.join("trace.csv"))?,
        checkpoint_dir,
        prev_t_hat: None,
        first: None,
        last: None,
        last_step: None,
        rows: 0,
    };
    let outcome = evolve(FlowState::new(seed), &ctl, Some(&mut rec))?;
    let state = &outcome.state;
    let report = RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        config_hash: config_hash(config)?,
        stop_reason: outcome.stop,
        stop_detail: outcome.detail.clone(),
        steps: state.step_index,
        t_end: state.t,
        t_hat: estimate_vanishing_time(state)?,
        trace_rows: rec.rows,
        resample_events: state.events.len(),
        initial: rec.first.clone().expect("the initial state is always recorded"),
        last: rec.last.clone().expect("the final state is always recorded"),
    };
    write_json(&out.join("report.json"), &report)?;
    Ok(report)
}

/// Closed-curve control: a circle shrinks until its equal-area radius reaches
/// `x_floor` (a tenth of the initial radius when unset) or `max_steps` runs
/// out. Rows carry the size measures; lobe diagnostics are NaN. No
/// checkpoints are written (they hold quarter arcs).
fn run_circle(config: &RunConfig, radius: f64, n: usize) -> Result<RunReport> {
    let mut poly = circle_polygon(radius, n)?;
    let s = &config.step;
    let floor = if s.x_floor > 0.0 { s.x_floor } else { 0.1 * radius };
    let max_steps = s.max_steps.unwrap_or(u64::MAX);
    let mut trace = TraceWriter::create(&config.out_dir.join("trace.csv"))?;
    let (mut t, mut step, mut rows) = (0.0, 0u64, 0usize);
    let mut prev_t_hat = None;
    let mut row = |poly: &ClosedPolyline, t: f64, trace: &mut TraceWriter<_>| -> Result<TraceRecord> {
        let rec = circle_record(poly, t, prev_t_hat);
        prev_t_hat = Some(rec.t_hat);
        trace.write(&rec)?;
        Ok(rec)
    };
    let first = row(&poly, t, &mut trace)?;
    rows += 1;
    let mut last = first.clone();
    let mut last_step = 0;
    let stop = loop {
        if step >= max_steps {
            break StopReason::MaxSteps;
        }
        if (poly.signed_area() / PI).sqrt() <= floor {
            break StopReason::XFloor;
        }
        let h = poly.min_segment();
        let dt = s.safety * h * h / 2.0;
        poly = csf_step_closed(&poly, dt)?;
        t += dt;
        step += 1;
        if step.is_multiple_of(config.diag_interval) {
            last = row(&poly, t, &mut trace)?;
            last_step = step;
            rows += 1;
        }
    };
    if last_step != step {
        last = row(&poly, t, &mut trace)?;
        rows += 1;
    }
    trace.flush()?;
    let report = RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        config_hash: config_hash(config)?,
        stop_reason: stop,
        stop_detail: None,
        steps: step,
        t_end: t,
        t_hat: last.t_hat,
        trace_rows: rows,
        resample_events: 0,
        initial: first,
        last,
    };
    write_json(&config.out_dir.join("report.json"), &report)?;
    Ok(report)
}

fn circle_record(poly: &ClosedPolyline, t: f64, prev_t_hat: Option<f64>) -> TraceRecord {
    let area = poly.signed_area();
    let t_hat = t + area / (2.0 * PI);
    let (x, y) = poly.half_extents();
    let kappa = (PI / area).sqrt();
    let nan = f64::NAN;
    TraceRecord {
        t,
        t_hat,
        area,
        x,
        y,
        alpha: nan,
        kappa_top: kappa,
        kappa_right: kappa,
        beta: nan,
        ell: nan,
        gr_gap_f: nan,
        gr_gap_ftheta: nan,
        support_residual: nan,
        integral_residual: nan,
        node_zero_count: 0,
        bowtie_dist: nan,
        migration_x: nan,
        migration_y: nan,
        box_area: nan,
        convex: true,
        kappa_theta_margin: nan,
        width_kappa_margin: nan,
        nodal_ok: None,
        t_hat_drift: prev_t_hat.map_or(0.0, |p| (t_hat - p).abs()),
        beta_lo: nan,
        beta_hi: None,
        vertices: poly.len() as u32,
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// Runs independent configs on separate threads; results keep input order.
pub fn run_sweep(configs: &[RunConfig]) -> Vec<Result<RunReport>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = configs.iter().map(|c| s.spawn(move || run(c))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Config("run thread panicked".into()))))
            .collect()
    })
}
