//! Scenario files.
//!
//! A scenario is a TOML document with optional sections `[model]`,
//! `[probabilities]`, `[servers]`, `[distributions.<step>]`, `[tariff]`,
//! `[costs]` and `[experiment]`. Every missing key falls back to the
//! built-in default; unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::accounting::{CostModel, Tariff};
use crate::experiment::Economics;
use crate::model::{
    ConfigError, Durations, ModelConfig, Probabilities, ServerCounts, DEFAULT_DAY_LENGTH,
};

pub const DEFAULT_DAYS: u64 = 30;
pub const DEFAULT_LEVELS: [u32; 4] = [30, 40, 50, 53];

/// A fully resolved, validated run description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub model: ModelConfig,
    pub econ: Economics,
    pub days: u64,
    pub levels: Vec<u32>,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            model: ModelConfig::default(),
            econ: Economics::default(),
            days: DEFAULT_DAYS,
            levels: DEFAULT_LEVELS.to_vec(),
        }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error(transparent)]
    Invalid(#[from] ConfigError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ModelSection {
    seed: u64,
    fleet_size: u32,
    driver_count: u32,
    day_length: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        let m = ModelConfig::default();
        Self { seed: m.master_seed, fleet_size: m.fleet_size, driver_count: m.driver_count, day_length: DEFAULT_DAY_LENGTH }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ExperimentSection {
    days: u64,
    levels: Vec<u32>,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self { days: DEFAULT_DAYS, levels: DEFAULT_LEVELS.to_vec() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ScenarioFile {
    model: ModelSection,
    probabilities: Probabilities,
    servers: ServerCounts,
    distributions: Durations,
    tariff: Tariff,
    costs: CostModel,
    experiment: ExperimentSection,
}

impl From<ScenarioFile> for Scenario {
    fn from(f: ScenarioFile) -> Self {
        Scenario {
            model: ModelConfig {
                dists: f.distributions,
                probs: f.probabilities,
                fleet_size: f.model.fleet_size,
                driver_count: f.model.driver_count,
                servers: f.servers,
                day_length: f.model.day_length,
                master_seed: f.model.seed,
            },
            econ: Economics { tariff: f.tariff, costs: f.costs },
            days: f.experiment.days,
            levels: f.experiment.levels,
        }
    }
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        ScenarioFile {
            model: ModelSection {
                seed: s.model.master_seed,
                fleet_size: s.model.fleet_size,
                driver_count: s.model.driver_count,
                day_length: s.model.day_length,
            },
            probabilities: s.model.probs,
            servers: s.model.servers,
            distributions: s.model.dists,
            tariff: s.econ.tariff,
            costs: s.econ.costs,
            experiment: ExperimentSection { days: s.days, levels: s.levels.clone() },
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.model.validate()?;
        let invalid = |key: &str, reason: &str| ConfigError::Invalid { key: key.into(), reason: reason.into() };
        self.econ.tariff.validate().map_err(|k| invalid(&format!("tariff.{k}"), "must be > 0"))?;
        self.econ.costs.validate().map_err(|k| invalid(&format!("costs.{k}"), "must be >= 0"))?;
        if self.days == 0 {
            return Err(invalid("experiment.days", "must be >= 1"));
        }
        if self.levels.is_empty() {
            return Err(invalid("experiment.levels", "must list at least one fleet size"));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&ScenarioFile::from(self)).expect("scenario is always representable in TOML")
    }
}

/// Parses scenario text; `origin` is used in error messages only.
pub fn parse_config(text: &str, origin: &Path) -> Result<Scenario, LoadError> {
    let file: ScenarioFile = toml::from_str(text)
        .map_err(|e| LoadError::Parse { path: origin.to_path_buf(), message: e.to_string() })?;
    let scenario = Scenario::from(file);
    scenario.validate()?;
    Ok(scenario)
}

pub fn load_config(path: &Path) -> Result<Scenario, LoadError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| LoadError::Io { path: path.to_path_buf(), source })?;
    parse_config(&text, path)
}
