use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::RunConfig;
use crate::curvegeom::{Point2, QuarterArc};
use crate::error::{Error, Result};
use crate::flowcore::{FlowState, StopReason};

pub const CHECKPOINT_SCHEMA_VERSION: u32 = 1;

/// Where a checkpoint came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the run config (without its output directory).
    pub config_hash: String,
    pub crate_version: String,
}

impl Provenance {
    pub fn of(config: &RunConfig) -> Result<Self> {
        Ok(Self {
            config_hash: config_hash(config)?,
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
        })
    }
}

/// Hex SHA-256 of the config's JSON form, with `out_dir` blanked so that the
/// same run written elsewhere hashes the same.
pub fn config_hash(config: &RunConfig) -> Result<String> {
    let mut c = config.clone();
    c.out_dir = Default::default();
    let bytes = serde_json::to_vec(&c)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// A saved quarter arc with its time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub schema_version: u32,
    pub t: f64,
    #[serde(rename = "T_hat")]
    pub t_hat: f64,
    pub step_index: u64,
    /// Half-width at the start of the run, which scales the resampling length.
    pub x_initial: f64,
    pub vertices: Vec<Point2>,
    /// Set on the final checkpoint of a run.
    pub stop_reason: Option<StopReason>,
    pub provenance: Provenance,
}

impl Checkpoint {
    pub fn new(state: &FlowState, t_hat: f64, stop: Option<StopReason>, provenance: Provenance) -> Self {
        Self {
            schema_version: CHECKPOINT_SCHEMA_VERSION,
            t: state.t,
            t_hat,
            step_index: state.step_index,
            x_initial: state.x_initial,
            vertices: state.arc.vertices().to_vec(),
            stop_reason: stop,
            provenance,
        }
    }

    pub fn arc(&self) -> Result<QuarterArc> {
        QuarterArc::new(self.vertices.clone())
    }

    /// Flow state at the checkpoint; resample events are not carried over.
    pub fn state(&self) -> Result<FlowState> {
        let mut s = FlowState::at_time(self.arc()?, self.t);
        s.step_index = self.step_index;
        s.x_initial = self.x_initial;
        Ok(s)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let c: Self = serde_json::from_str(&text)?;
        if c.schema_version != CHECKPOINT_SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "{}: checkpoint schema {} is not supported (expected {})",
                path.display(),
                c.schema_version,
                CHECKPOINT_SCHEMA_VERSION
            )));
        }
        c.arc()?;
        Ok(c)
    }
}
