//! Balanced random Büchi-automaton datasets with exact property labels, and a
//! graph convolutional network that learns to predict those properties.
//!
//! - [`automaton`]: the automaton type, reachability, SCCs, cycles, lassos.
//! - [`oracle`]: emptiness, "accepts a word with a `b`", "accepts a word with
//!   infinitely many `b`", plus a brute-force cross-check.
//! - [`generator`]: seeded random automata and bucket-balanced datasets.
//! - [`encoding`], [`dataset`], [`checkpoint`]: tensors and file formats.
//! - [`gnn`]: the network, its gradients, Adam and the training loop.
//!
//! The network code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to double precision, which is what the tools use.

pub mod automaton;
pub mod checkpoint;
pub mod dataset;
pub mod encoding;
pub mod error;
pub mod generator;
pub mod gnn;
pub mod oracle;
pub mod rng;
pub mod scalar;

pub use automaton::{Component, LassoWitness, Nbw, State, Symbol, Transition};
pub use dataset::{read_dataset, write_dataset, Dataset, DatasetHeader, DatasetRecord};
pub use encoding::{encode, EncodedGraph, InitMode};
pub use error::{AutomatonError, FormatError, GeneratorError, GnnError, OracleError};
pub use generator::{
    bucket_of, build_balanced_dataset, quotas, random_nbw, BucketId, DatasetSpec, GeneratorParams,
};
pub use oracle::{
    brute_force_check, check_property, emptiness_subclass, inf_b, is_empty, min1_b, EmptinessSubclass,
    Property, PropertyKind,
};
pub use scalar::Scalar;

/// Default working precision.
pub type Real = f64;
pub type Model = gnn::GcnModel<Real>;
pub type Graph = EncodedGraph<Real>;
pub type Input = gnn::GraphInput<Real>;
pub type Adam = gnn::AdamState<Real>;
pub type ModelCheckpoint = checkpoint::Checkpoint<Real>;

pub type ModelF32 = gnn::GcnModel<f32>;
pub type GraphF32 = EncodedGraph<f32>;
