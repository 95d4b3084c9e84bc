//! A small graph convolutional classifier written against `ndarray`.
//!
//! Each layer computes `H' = ReLU(Â H W)` with `Â` the normalized adjacency
//! (no added self-loops). Three layers are followed by mean pooling over
//! nodes and a linear two-class head trained with softmax cross-entropy and
//! Adam.

pub mod adam;
pub mod adjacency;
pub mod check;
pub mod model;
pub mod train;

pub use adam::AdamState;
pub use adjacency::NormalizedAdjacency;
pub use model::{
    backward, cross_entropy, forward, loss_and_gradient, predict, softmax, ForwardCache, GcnModel,
    GraphInput, ModelShape, ParamSet, NUM_CLASSES, NUM_LAYERS, TENSOR_NAMES,
};
pub use train::{evaluate, train, train_from, EpochStats, TrainConfig, TrainOutcome};
