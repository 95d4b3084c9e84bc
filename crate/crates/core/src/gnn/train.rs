use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::adam::AdamState;
use super::model::{backward, forward, predict, GcnModel, GraphInput};
use crate::error::GnnError;
use crate::rng::{mix, rng_from_seed};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub hidden: usize,
    pub lr: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 75,
            batch_size: 125,
            hidden: 20,
            lr: 0.01,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), GnnError> {
        if self.epochs == 0 || self.batch_size == 0 || self.hidden == 0 {
            return Err(GnnError::Config("epochs, batch_size and hidden must be positive".into()));
        }
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(GnnError::Config(format!("learning rate must be positive, got {}", self.lr)));
        }
        Ok(())
    }

    /// Seed of the initial weights.
    pub fn init_seed(&self) -> u64 {
        mix(self.seed, 0)
    }

    /// Seed of the shuffle before epoch `epoch` (0-based).
    pub fn epoch_seed(&self, epoch: usize) -> u64 {
        mix(self.seed, 1 + epoch as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean training loss over the epoch's batches, weighted by batch size.
    pub loss: f64,
    /// Fraction of training graphs classified correctly before each batch's
    /// update.
    pub accuracy: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome<T> {
    pub model: GcnModel<T>,
    pub history: Vec<EpochStats>,
}

/// Trains from Glorot initialization. Deterministic in `(data, cfg)`.
pub fn train<T: Scalar>(
    data: &[GraphInput<T>],
    input_width: usize,
    cfg: &TrainConfig,
) -> Result<TrainOutcome<T>, GnnError> {
    let model = GcnModel::init(input_width, cfg.hidden, cfg.init_seed());
    train_from(model, data, cfg)
}

/// Trains starting from `model`.
pub fn train_from<T: Scalar>(
    mut model: GcnModel<T>,
    data: &[GraphInput<T>],
    cfg: &TrainConfig,
) -> Result<TrainOutcome<T>, GnnError> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(GnnError::EmptyBatch);
    }
    let mut adam = AdamState::new(&model, T::from_f64_lossy(cfg.lr));
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        order.sort_unstable();
        order.shuffle(&mut rng_from_seed(cfg.epoch_seed(epoch)));
        let mut loss_sum = 0.0;
        let mut correct = 0;
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<&GraphInput<T>> = chunk.iter().map(|&i| &data[i]).collect();
            let (loss, grad, ok) = backward(&model, &batch)?;
            loss_sum += loss.to_f64_lossy() * batch.len() as f64;
            correct += ok;
            adam.step(&mut model, &grad)?;
        }
        history.push(EpochStats {
            epoch: epoch + 1,
            loss: loss_sum / data.len() as f64,
            accuracy: correct as f64 / data.len() as f64,
        });
    }
    Ok(TrainOutcome { model, history })
}

/// Fraction of graphs whose argmax prediction equals the label.
pub fn evaluate<T: Scalar>(model: &GcnModel<T>, data: &[GraphInput<T>]) -> Result<f64, GnnError> {
    if data.is_empty() {
        return Err(GnnError::EmptyBatch);
    }
    let mut correct = 0usize;
    for g in data {
        let c = forward(model, &g.adj, &g.features)?;
        if predict(c.logits.as_slice().unwrap()) == g.class() {
            correct += 1;
        }
    }
    Ok(correct as f64 / data.len() as f64)
}
