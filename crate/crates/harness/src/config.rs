//! Experiment configuration: a JSON file (all keys optional) plus command
//! line overrides. Reports echo the fully resolved config.

use std::path::Path;

use nbw_core::gnn::TrainConfig;
use nbw_core::{DatasetSpec, GeneratorParams, InitMode, Property, PropertyKind};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub p_min: f64,
    pub p_max: f64,
    pub pacc_min: f64,
    pub pacc_max: f64,
    pub num_symbols: usize,
    pub target_symbol: usize,
    pub n_add: usize,
    pub init_mode: InitMode,
    pub max_attempts_per_slot: u64,
    /// State range of training sets.
    pub train_range: (usize, usize),
    /// State ranges of the test sets.
    pub test_ranges: Vec<(usize, usize)>,
    pub test_size: usize,
    pub sizes: Vec<usize>,
    pub properties: Vec<PropertyKind>,
    pub runs: usize,
    pub train: TrainConfig,
    pub sweep_n_add: Vec<usize>,
    pub sweep_size: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let gen = GeneratorParams::default();
        Self {
            seed: 0,
            p_min: gen.p_min,
            p_max: gen.p_max,
            pacc_min: gen.pacc_min,
            pacc_max: gen.pacc_max,
            num_symbols: gen.num_symbols,
            target_symbol: 1,
            n_add: 3,
            init_mode: InitMode::Half,
            max_attempts_per_slot: 20_000,
            train_range: (3, 9),
            test_ranges: vec![(3, 9), (10, 25)],
            test_size: 500,
            sizes: vec![250, 1000, 10_000, 50_000],
            properties: PropertyKind::ALL.to_vec(),
            runs: 10,
            train: TrainConfig::default(),
            sweep_n_add: (0..=6).collect(),
            sweep_size: 1000,
        }
    }
}

/// Roles keep training and test sets of equal shape on distinct seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetRole {
    Train,
    Test,
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| HarnessError::Validation(format!("config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(HarnessError::Validation("runs must be positive".into()));
        }
        if self.properties.is_empty() {
            return Err(HarnessError::Validation("no properties selected".into()));
        }
        self.train.validate()?;
        Ok(())
    }

    pub fn property(&self, kind: PropertyKind) -> Property {
        Property::with_target(kind, self.target_symbol)
    }

    pub fn gen_params(&self, n_min: usize, n_max: usize, seed: u64) -> GeneratorParams {
        GeneratorParams {
            n_min,
            n_max,
            p_min: self.p_min,
            p_max: self.p_max,
            pacc_min: self.pacc_min,
            pacc_max: self.pacc_max,
            num_symbols: self.num_symbols,
            seed,
        }
    }

    /// Fully specified dataset for one table cell. The generator seed is
    /// derived from the base seed, role, property, size and state range.
    pub fn dataset_spec(
        &self,
        role: DatasetRole,
        kind: PropertyKind,
        size: usize,
        (n_min, n_max): (usize, usize),
    ) -> DatasetSpec {
        let role_tag = match role {
            DatasetRole::Train => 1,
            DatasetRole::Test => 2,
        };
        let kind_tag = match kind {
            PropertyKind::IsEmpty => 1,
            PropertyKind::Min1B => 2,
            PropertyKind::InfB => 3,
        };
        let mut seed = nbw_core::rng::mix(self.seed, role_tag);
        for tag in [kind_tag, size as u64, (n_min as u64) << 32 | n_max as u64] {
            seed = nbw_core::rng::mix(seed, tag);
        }
        DatasetSpec {
            property: self.property(kind),
            size,
            gen: self.gen_params(n_min, n_max, seed),
            n_add: self.n_add,
            init_mode: self.init_mode,
            max_attempts_per_slot: self.max_attempts_per_slot,
        }
    }

    /// Training seed of run `run`.
    pub fn run_seed(&self, run: usize) -> u64 {
        nbw_core::rng::mix(self.seed ^ 0x5255_4e53, run as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_config_fills_defaults() {
        let c: ExperimentConfig = serde_json::from_str(r#"{"runs": 3, "sizes": [250]}"#).unwrap();
        assert_eq!(c.runs, 3);
        assert_eq!(c.sizes, vec![250]);
        assert_eq!(c.train.epochs, 75);
        assert_eq!(c.test_ranges, vec![(3, 9), (10, 25)]);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"rnus": 3}"#).is_err());
    }

    #[test]
    fn distinct_seeds_per_role_and_range() {
        let c = ExperimentConfig::default();
        let a = c.dataset_spec(DatasetRole::Train, PropertyKind::InfB, 500, (3, 9));
        let b = c.dataset_spec(DatasetRole::Test, PropertyKind::InfB, 500, (3, 9));
        let d = c.dataset_spec(DatasetRole::Test, PropertyKind::InfB, 500, (10, 25));
        assert_ne!(a.gen.seed, b.gen.seed);
        assert_ne!(b.gen.seed, d.gen.seed);
        assert_eq!(b.name(), "infb_500_3_9");
    }
}
