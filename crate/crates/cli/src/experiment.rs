//! Experiment files: one TOML document describing one simulation run.
//!
//! ```toml
//! schema_version = 1
//!
//! [code]
//! m = 6
//! r = 3
//!
//! [decoder]
//! schedule = [4, 8]
//!
//! [simulation]
//! ebno_db = [2.0, 3.0, 4.0]
//! min_frame_errors = 100
//! seed = 1
//!
//! [output]
//! csv = "rm63_sched_4_8.csv"
//! ```
//!
//! Unknown keys are rejected.

use std::fmt;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use rpa_core::geometry::BoxplusMode;
use rpa_core::rpa::{parse_factor, Preset, PruningConfig, Selection, DEFAULT_THETA};
use rpa_core::{CodeParams, MessageMode, SimConfig};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub schema_version: u32,
    pub code: CodeSection,
    #[serde(default)]
    pub decoder: DecoderSection,
    pub simulation: SimulationSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSection {
    pub m: u32,
    pub r: u32,
}

/// A pruning factor written either as a number or as an `"a/b"` string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Factor {
    Number(f64),
    Text(String),
}

impl Factor {
    pub fn value(&self) -> Result<f64> {
        match self {
            Factor::Number(v) => Ok(*v),
            Factor::Text(s) => Ok(parse_factor(s)?),
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Number(v) => write!(f, "{v}"),
            Factor::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionKind {
    #[default]
    Stride,
    Random,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoderSection {
    /// `rpa`, `srpa(q)`, `rpa_sch(d)` or `mfp(γ,δ_itr,δ_rec)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Factor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_itr: Option<Factor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_rec: Option<Factor>,
    /// Projection counts for levels r down to 2; forces a single iteration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub early_stop: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boxplus: Option<BoxplusMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selection: Option<SelectionKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selection_seed: Option<u64>,
}

impl DecoderSection {
    pub fn to_config(&self) -> Result<PruningConfig> {
        let has_factors =
            self.gamma.is_some() || self.delta_itr.is_some() || self.delta_rec.is_some();
        let mut cfg = match (&self.preset, &self.schedule) {
            (Some(_), Some(_)) => bail!("decoder: give either a preset or a schedule, not both"),
            (Some(_), None) if has_factors => {
                bail!("decoder: raw factors cannot be combined with a preset")
            }
            (Some(name), None) => name.parse::<Preset>()?.config()?,
            (None, Some(_)) if has_factors => {
                bail!("decoder: raw factors cannot be combined with a schedule")
            }
            (None, Some(schedule)) => PruningConfig::explicit(schedule.clone()),
            (None, None) => {
                let get = |f: &Option<Factor>| f.as_ref().map_or(Ok(1.0), Factor::value);
                PruningConfig::factors(
                    get(&self.gamma)?,
                    get(&self.delta_itr)?,
                    get(&self.delta_rec)?,
                )
            }
        };
        if let Some(n_max) = self.n_max {
            if self.schedule.is_some() && n_max != 1 {
                bail!("decoder: an explicit schedule runs exactly one iteration (n_max = 1)");
            }
            cfg.n_max = n_max;
        }
        match (self.early_stop.unwrap_or(false), self.theta) {
            (true, theta) => cfg = cfg.with_early_stop(theta.unwrap_or(DEFAULT_THETA)),
            (false, Some(_)) => bail!("decoder: theta is set but early_stop is off"),
            (false, None) => {}
        }
        if let Some(mode) = self.boxplus {
            cfg.boxplus = mode;
        }
        cfg.selection = match (self.selection.unwrap_or_default(), self.selection_seed) {
            (SelectionKind::Stride, None) => Selection::Stride,
            (SelectionKind::Stride, Some(_)) => {
                bail!("decoder: selection_seed needs selection = \"random\"")
            }
            (SelectionKind::Random, seed) => Selection::Random {
                seed: seed.unwrap_or(0),
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn default_min_frame_errors() -> u64 {
    100
}

fn default_max_frames() -> u64 {
    10_000_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub ebno_db: Vec<f64>,
    #[serde(default = "default_min_frame_errors")]
    pub min_frame_errors: u64,
    #[serde(default = "default_max_frames")]
    pub max_frames: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub message_mode: MessageMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Record wall-clock seconds per point (makes the CSV non-reproducible).
    #[serde(default)]
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// CSV destination; `-` writes to stdout.
    pub csv: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = toml::from_str(text).context("cannot parse experiment file")?;
        if spec.schema_version != SCHEMA_VERSION {
            bail!(
                "unsupported schema_version {} (this build reads version {SCHEMA_VERSION})",
                spec.schema_version
            );
        }
        Ok(spec)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn code(&self) -> Result<CodeParams> {
        Ok(CodeParams::new(self.code.m, self.code.r)?)
    }

    /// Resolves the spec into a validated simulation configuration.
    pub fn sim_config(&self, threads_override: Option<usize>) -> Result<SimConfig> {
        let code = self.code()?;
        let mut cfg = SimConfig::new(
            code,
            self.decoder.to_config()?,
            self.simulation.ebno_db.clone(),
        );
        cfg.min_frame_errors = self.simulation.min_frame_errors;
        cfg.max_frames = self.simulation.max_frames;
        cfg.seed = self.simulation.seed;
        cfg.message_mode = self.simulation.message_mode;
        cfg.threads = threads_override.or(self.simulation.threads);
        cfg.record_timing = self.simulation.timing;
        cfg.validate()?;
        Ok(cfg)
    }
}
