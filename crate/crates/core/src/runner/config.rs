//! Experiment configuration and its TOML file form.
//!
//! A config file holds one experiment configuration:
//!
//! ```toml
//! id = "lt-500"
//! init_size = 100
//! query_size = 100
//! budget = 500
//! subset_size = 10000      # or `false` to score the whole unlabeled pool
//! model_start = "cold"     # or "warm"
//! train = "lt"             # preset (st, lt, lt+) or a [train] table
//! strategy = "entropy"
//! seeds = [0, 1, 2, 3, 4]
//! ```
//!
//! Every key has a default. A suite file lists `strategies`, `seeds`,
//! optionally `datasets` and `deltas`, and one `[[configs]]` table per
//! configuration in the form above (without `strategy`/`seeds`).

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classifier::TrainConfig;
use crate::error::{Error, Result};
use crate::strategies::StrategyKind;

pub const DEFAULT_INIT_SIZE: usize = 100;
pub const DEFAULT_QUERY_SIZE: usize = 100;
pub const DEFAULT_BUDGET: usize = 500;
pub const DEFAULT_SUBSET_SIZE: usize = 10_000;
pub const DEFAULT_SEEDS: [u64; 5] = [0, 1, 2, 3, 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelStart {
    /// Re-initialize the head before every training round.
    Cold,
    /// Continue from the previous cycle's parameters.
    Warm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DalConfig {
    pub id: String,
    pub init_size: usize,
    pub query_size: usize,
    /// Total annotations including the initial pool.
    pub budget: usize,
    /// `None` scores the entire unlabeled pool.
    pub subset_size: Option<usize>,
    pub model_start: ModelStart,
    pub train: TrainConfig,
    pub strategy: StrategyKind,
    pub seeds: Vec<u64>,
}

impl Default for DalConfig {
    fn default() -> Self {
        DalConfig {
            id: "default".into(),
            init_size: DEFAULT_INIT_SIZE,
            query_size: DEFAULT_QUERY_SIZE,
            budget: DEFAULT_BUDGET,
            subset_size: Some(DEFAULT_SUBSET_SIZE),
            model_start: ModelStart::Cold,
            train: TrainConfig::default(),
            strategy: StrategyKind::Random,
            seeds: DEFAULT_SEEDS.to_vec(),
        }
    }
}

/// Number of query cycles, `(budget - init_size) / query_size`.
pub fn n_cycles(cfg: &DalConfig) -> Result<usize> {
    if cfg.query_size == 0 {
        return Err(Error::InvalidConfig("query_size must be at least 1".into()));
    }
    if cfg.budget < cfg.init_size {
        return Err(Error::InvalidConfig(format!(
            "budget {} is below init_size {}",
            cfg.budget, cfg.init_size
        )));
    }
    let spend = cfg.budget - cfg.init_size;
    if !spend.is_multiple_of(cfg.query_size) {
        return Err(Error::InvalidConfig(format!(
            "budget - init_size = {spend} is not a multiple of query_size {}",
            cfg.query_size
        )));
    }
    Ok(spend / cfg.query_size)
}

impl DalConfig {
    /// Checks the invariants that do not depend on a dataset.
    pub fn validate(&self) -> Result<()> {
        n_cycles(self)?;
        self.train.validate()?;
        self.strategy.validate()?;
        if self.strategy.needs_labeled_pool() && self.init_size == 0 {
            return Err(Error::InvalidConfig(format!(
                "{} needs init_size >= 1",
                self.strategy.name()
            )));
        }
        if let Some(s) = self.subset_size {
            if s < self.query_size {
                return Err(Error::InvalidConfig(format!(
                    "subset_size {s} is smaller than query_size {}",
                    self.query_size
                )));
            }
        }
        Ok(())
    }

    pub fn validate_for(&self, n_train: usize) -> Result<()> {
        self.validate()?;
        if self.budget > n_train {
            return Err(Error::InvalidConfig(format!(
                "budget {} exceeds train size {n_train}",
                self.budget
            )));
        }
        Ok(())
    }

    /// Config with settings that cannot change the outcome on a train split
    /// of `n_train` rows normalized: a subset at least as large as the train
    /// split is the full pool. Id and seed list are dropped.
    fn effective(&self, n_train: usize) -> EffectiveConfig<'_> {
        EffectiveConfig {
            init_size: self.init_size,
            query_size: self.query_size,
            budget: self.budget,
            subset_size: self.subset_size.filter(|&s| s < n_train),
            model_start: self.model_start,
            train: &self.train,
            strategy: self.strategy,
        }
    }

    /// Short hex digest of the outcome-relevant settings.
    pub fn hash_for(&self, n_train: usize) -> String {
        let canonical = serde_json::to_string(&self.effective(n_train)).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        hex::encode(&digest[..8])
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text)
            .map_err(|e| Error::InvalidConfig(format!("config: {e}")))?;
        let cfg = file.into_config()?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Serialize)]
struct EffectiveConfig<'a> {
    init_size: usize,
    query_size: usize,
    budget: usize,
    subset_size: Option<usize>,
    model_start: ModelStart,
    train: &'a TrainConfig,
    strategy: StrategyKind,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum SubsetSpec {
    Size(usize),
    Enabled(bool),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum TrainSpec {
    Preset(String),
    Explicit(TrainConfig),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct ConfigFile {
    id: Option<String>,
    init_size: Option<usize>,
    query_size: Option<usize>,
    budget: Option<usize>,
    subset_size: Option<SubsetSpec>,
    model_start: Option<ModelStart>,
    train: Option<TrainSpec>,
    pub(crate) strategy: Option<StrategyKind>,
    pub(crate) seeds: Option<Vec<u64>>,
}

impl ConfigFile {
    pub(crate) fn into_config(self) -> Result<DalConfig> {
        let d = DalConfig::default();
        let subset_size = match self.subset_size {
            None | Some(SubsetSpec::Enabled(true)) => d.subset_size,
            Some(SubsetSpec::Enabled(false)) => None,
            Some(SubsetSpec::Size(0)) => {
                return Err(Error::InvalidConfig("subset_size must be at least 1".into()))
            }
            Some(SubsetSpec::Size(s)) => Some(s),
        };
        let train = match self.train {
            None => d.train,
            Some(TrainSpec::Explicit(t)) => t,
            Some(TrainSpec::Preset(name)) => TrainConfig::preset(&name)
                .ok_or_else(|| Error::InvalidConfig(format!("unknown train preset {name:?}")))?,
        };
        Ok(DalConfig {
            id: self.id.unwrap_or(d.id),
            init_size: self.init_size.unwrap_or(d.init_size),
            query_size: self.query_size.unwrap_or(d.query_size),
            budget: self.budget.unwrap_or(d.budget),
            subset_size,
            model_start: self.model_start.unwrap_or(d.model_start),
            train,
            strategy: self.strategy.unwrap_or(d.strategy),
            seeds: self.seeds.unwrap_or(d.seeds),
        })
    }
}

/// Grid of runs: every config × strategy × dataset × seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSpec {
    /// Empty means every dataset in the manifest.
    pub datasets: Vec<String>,
    pub strategies: Vec<StrategyKind>,
    pub seeds: Vec<u64>,
    pub configs: Vec<DalConfig>,
    /// Report improvement over the random baseline.
    pub deltas: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteFile {
    #[serde(default)]
    datasets: Vec<String>,
    strategies: Vec<StrategyKind>,
    seeds: Option<Vec<u64>>,
    #[serde(default = "yes")]
    deltas: bool,
    configs: Vec<ConfigFile>,
}

fn yes() -> bool {
    true
}

impl SuiteSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: SuiteFile = toml::from_str(text)
            .map_err(|e| Error::InvalidConfig(format!("suite: {e}")))?;
        let seeds = file.seeds.unwrap_or_else(|| DEFAULT_SEEDS.to_vec());
        let mut configs = Vec::with_capacity(file.configs.len());
        for c in file.configs {
            if c.strategy.is_some() || c.seeds.is_some() {
                return Err(Error::InvalidConfig(
                    "suite configs take strategies and seeds from the top level".into(),
                ));
            }
            let mut cfg = c.into_config()?;
            cfg.seeds = seeds.clone();
            configs.push(cfg);
        }
        let spec = SuiteSpec {
            datasets: file.datasets,
            strategies: file.strategies,
            seeds,
            configs,
            deltas: file.deltas,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.strategies.is_empty() || self.seeds.is_empty() || self.configs.is_empty() {
            return Err(Error::InvalidConfig(
                "suite needs at least one strategy, seed and config".into(),
            ));
        }
        let mut ids = std::collections::HashSet::new();
        for c in &self.configs {
            if !ids.insert(c.id.as_str()) {
                return Err(Error::InvalidConfig(format!("duplicate config id {:?}", c.id)));
            }
            for &s in &self.strategies {
                DalConfig {
                    strategy: s,
                    ..c.clone()
                }
                .validate()?;
            }
        }
        if self.deltas && !self.strategies.contains(&StrategyKind::Random) {
            return Err(Error::IncompleteSuite(
                "deltas requested but the random baseline is not in the grid".into(),
            ));
        }
        Ok(())
    }
}
