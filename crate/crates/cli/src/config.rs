use std::path::{Path, PathBuf};

use graphon_clt::harness::{ExperimentConfig, OutputPaths};
use graphon_clt::{EdgeModel, Error, Graphon, LabelScheme, PatternGraph, Result, StatisticSpec, WeightFunction};
use serde::Deserialize;

/// Everything a command may read from `--config`. Each command takes the
/// fields it needs and ignores the rest; unknown keys are rejected.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kappa: Option<Graphon>,
    /// Extra graphons for `stein-check`, run in addition to `kappa`.
    #[serde(default)]
    pub kappas: Vec<Graphon>,
    pub scheme: Option<LabelScheme>,
    pub model: Option<EdgeModel>,
    #[serde(default)]
    pub statistics: Vec<StatisticSpec>,
    #[serde(default)]
    pub n_grid: Vec<usize>,
    pub replications: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub outputs: OutputPaths,
    pub n: Option<usize>,
    #[serde(default)]
    pub patterns: Vec<PatternGraph>,
    pub max_degree: Option<u32>,
    pub phi: Option<WeightFunction>,
    pub edges: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub probabilities: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn kappa(&self) -> Result<&Graphon> {
        self.kappa.as_ref().ok_or_else(|| missing("kappa"))
    }

    pub fn scheme(&self) -> Result<&LabelScheme> {
        self.scheme.as_ref().ok_or_else(|| missing("scheme"))
    }

    pub fn model(&self) -> EdgeModel {
        self.model.unwrap_or(EdgeModel::Bernoulli)
    }

    pub fn statistics(&self) -> Result<&[StatisticSpec]> {
        if self.statistics.is_empty() {
            return Err(missing("statistics"));
        }
        Ok(&self.statistics)
    }

    pub fn experiment(&self) -> Result<ExperimentConfig> {
        let c = ExperimentConfig {
            kappa: self.kappa()?.clone(),
            scheme: self.scheme()?.clone(),
            model: self.model(),
            statistics: self.statistics()?.to_vec(),
            n_grid: self.n_grid.clone(),
            replications: self.replications.unwrap_or(0),
            seed: self.seed,
            outputs: self.outputs.clone(),
        };
        c.validate()?;
        Ok(c)
    }
}

pub fn missing(field: &str) -> Error {
    Error::Invalid(format!("the configuration needs `{field}`"))
}
