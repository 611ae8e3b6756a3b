use std::fs;
use std::path::Path;

use anyhow::{bail, Context};
use phasenet_core::{CorpusConfig, TrainConfig};
use serde::{Deserialize, Serialize};

/// Everything a command may read from `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub corpus: CorpusConfig,
    pub train: TrainConfig,
    /// Training seeds of the multi-seed comparisons.
    pub seeds: Vec<u64>,
    /// Block counts of the depth sweep.
    pub depths: Vec<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            corpus: CorpusConfig::default(),
            train: TrainConfig::default(),
            seeds: vec![0, 1, 2],
            depths: vec![2, 3, 4, 5, 6],
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>, seed: Option<u64>) -> anyhow::Result<Self> {
        let mut config = match path {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
                serde_json::from_str(&text).with_context(|| format!("invalid configuration {}", path.display()))?
            }
            None => Self::default(),
        };
        if let Some(seed) = seed {
            config.corpus.seed = seed;
            config.train.seed = seed;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.corpus.validate().context("corpus configuration")?;
        self.train.validate().context("training configuration")?;
        if self.seeds.is_empty() {
            bail!("configuration needs at least one seed");
        }
        if self.depths.is_empty() {
            bail!("configuration needs at least one depth");
        }
        Ok(())
    }
}
