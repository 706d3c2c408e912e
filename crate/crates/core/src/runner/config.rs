use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::curvegeom::QuarterArc;
use crate::diagnostics::ThetaInterval;
use crate::error::{Error, Result};
use crate::flowcore::StepControl;
use crate::seeds::SeedSpec;

/// Step controls as written in a config file. Unset sizes are derived from
/// the seed: `h_max` from its mean spacing, `max_points` from its vertex
/// count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepSettings {
    pub safety: f64,
    pub dtheta_max: f64,
    pub h_max: Option<f64>,
    pub kappa_h_stop: f64,
    pub x_floor: f64,
    pub max_steps: Option<u64>,
    pub coarsen_ratio: f64,
    pub max_points: Option<usize>,
}

impl Default for StepSettings {
    fn default() -> Self {
        Self {
            safety: 0.4,
            dtheta_max: 0.1,
            h_max: None,
            kappa_h_stop: 0.3,
            x_floor: 0.0,
            max_steps: None,
            coarsen_ratio: 0.5,
            max_points: None,
        }
    }
}

impl StepSettings {
    pub fn resolve(&self, seed: &QuarterArc) -> StepControl {
        let base = StepControl::for_resolution(seed.length(), seed.len());
        StepControl {
            safety: self.safety,
            dtheta_max: self.dtheta_max,
            h_max: self.h_max.unwrap_or(base.h_max),
            kappa_h_stop: self.kappa_h_stop,
            x_floor: self.x_floor,
            max_steps: self.max_steps.unwrap_or(base.max_steps),
            coarsen_ratio: self.coarsen_ratio,
            max_points: self.max_points.unwrap_or(base.max_points),
        }
    }
}

/// Everything that determines a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: SeedSpec,
    #[serde(default)]
    pub step: StepSettings,
    pub diag_interval: u64,
    #[serde(rename = "J")]
    pub j: ThetaInterval,
    pub out_dir: PathBuf,
    /// Write a checkpoint every this many steps; 0 writes only the final one.
    #[serde(default)]
    pub checkpoint_every: u64,
    /// Recorded for provenance; every distance in this crate is computed
    /// deterministically.
    #[serde(default)]
    pub rng_seed: u64,
}

impl RunConfig {
    /// Lemniscate `a = 1` at 800 vertices, `J = [pi/4, 3pi/4]`.
    pub fn reference(out_dir: impl Into<PathBuf>) -> Self {
        Self {
            seed: SeedSpec::Lemniscate { a: 1.0, n: 800 },
            step: StepSettings::default(),
            diag_interval: 20_000,
            j: ThetaInterval::quarter_to_three_quarters(),
            out_dir: out_dir.into(),
            checkpoint_every: 1_000_000,
            rng_seed: 0,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: Self = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn validate(&self) -> Result<()> {
        ThetaInterval::new(self.j.lo, self.j.hi)?;
        if self.diag_interval == 0 {
            return Err(Error::Config("diag_interval must be at least 1".into()));
        }
        match self.seed {
            SeedSpec::Lemniscate { a, n } if !(a > 0.0) || n < 32 => {
                return Err(Error::Config(format!("lemniscate needs a > 0 and n >= 32, got a = {a}, n = {n}")));
            }
            SeedSpec::Circle { radius, n } if !(radius > 0.0) || n < 8 => {
                return Err(Error::Config(format!("circle needs radius > 0 and n >= 8, got radius = {radius}, n = {n}")));
            }
            _ => {}
        }
        let s = &self.step;
        if !(s.safety > 0.0 && s.safety <= 1.0) {
            return Err(Error::Config(format!("safety must lie in (0, 1], got {}", s.safety)));
        }
        let checks = [
            ("dtheta_max", s.dtheta_max > 0.0 && s.dtheta_max < std::f64::consts::FRAC_PI_2),
            ("kappa_h_stop", s.kappa_h_stop > 0.0),
            ("coarsen_ratio", (0.0..1.0).contains(&s.coarsen_ratio)),
            ("x_floor", s.x_floor >= 0.0),
        ];
        if let Some((name, _)) = checks.iter().find(|(_, ok)| !ok) {
            return Err(Error::Config(format!("{name} out of range")));
        }
        if s.h_max.is_some_and(|h| !(h > 0.0)) {
            return Err(Error::Config("h_max must be positive".into()));
        }
        Ok(())
    }
}
