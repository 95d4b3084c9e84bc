//! Model checkpoints.
//!
//! Line 1 is a JSON header. Each following line holds one tensor as
//! `name rows cols v0 v1 ...` in row-major order, values printed as the
//! shortest decimal that parses back to the same float.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::encoding::InitMode;
use crate::error::FormatError;
use crate::gnn::{GcnModel, ModelShape, ParamSet, TrainConfig, TENSOR_NAMES};
use crate::scalar::Scalar;

pub const CHECKPOINT_FORMAT: &str = "nbwgcn";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub format: String,
    pub version: u32,
    pub scalar: String,
    pub shape: ModelShape,
    pub n_add: usize,
    pub init_mode: InitMode,
    pub train: TrainConfig,
    /// Name of the training dataset, if known.
    pub dataset: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint<T> {
    pub header: CheckpointHeader,
    pub model: GcnModel<T>,
}

impl<T: Scalar> Checkpoint<T> {
    pub fn new(
        model: GcnModel<T>,
        n_add: usize,
        init_mode: InitMode,
        train: TrainConfig,
        dataset: Option<String>,
    ) -> Self {
        Self {
            header: CheckpointHeader {
                format: CHECKPOINT_FORMAT.into(),
                version: CHECKPOINT_VERSION,
                scalar: T::NAME.into(),
                shape: ModelShape::from(&model),
                n_add,
                init_mode,
                train,
                dataset,
            },
            model,
        }
    }

    pub fn to_writer<W: Write>(&self, mut w: W) -> Result<(), FormatError> {
        serde_json::to_writer(&mut w, &self.header).map_err(|e| FormatError::Checkpoint(e.to_string()))?;
        w.write_all(b"\n")?;
        for (name, t) in TENSOR_NAMES.iter().zip(self.model.tensors()) {
            write!(w, "{name} {} {}", t.nrows(), t.ncols())?;
            for v in t.iter() {
                write!(w, " {v}")?;
            }
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self, FormatError> {
        let bad = |msg: String| FormatError::Checkpoint(msg);
        let mut lines = reader.lines();
        let first = lines.next().ok_or_else(|| bad("file is empty".into()))??;
        let header: CheckpointHeader = serde_json::from_str(&first).map_err(|e| bad(e.to_string()))?;
        if header.format != CHECKPOINT_FORMAT {
            return Err(bad(format!("expected format \"{CHECKPOINT_FORMAT}\"")));
        }
        if header.version != CHECKPOINT_VERSION {
            return Err(FormatError::Version {
                found: header.version,
                expected: CHECKPOINT_VERSION,
            });
        }
        if header.scalar != T::NAME {
            return Err(bad(format!("checkpoint holds {} values, reader expects {}", header.scalar, T::NAME)));
        }
        let mut model = GcnModel::<T>::zeros(header.shape.input_width, header.shape.hidden);
        for (name, slot) in TENSOR_NAMES.iter().zip(model.tensors_mut()) {
            let line = lines.next().ok_or_else(|| bad(format!("missing tensor {name}")))??;
            *slot = parse_tensor(&line, name, slot.dim()).map_err(bad)?;
        }
        if lines.next().transpose()?.is_some_and(|l| !l.trim().is_empty()) {
            return Err(bad("trailing data after last tensor".into()));
        }
        Ok(Self { header, model })
    }
}

fn parse_tensor<T: Scalar>(line: &str, name: &str, dim: (usize, usize)) -> Result<Array2<T>, String> {
    let mut it = line.split_ascii_whitespace();
    if it.next() != Some(name) {
        return Err(format!("expected tensor {name}"));
    }
    let mut num = |what: &str| -> Result<usize, String> {
        it.next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format!("tensor {name}: bad {what}"))
    };
    let (rows, cols) = (num("rows")?, num("cols")?);
    if (rows, cols) != dim {
        return Err(format!("tensor {name}: shape {rows}x{cols}, header implies {}x{}", dim.0, dim.1));
    }
    let values = it
        .map(|s| s.parse::<T>().map_err(|_| format!("tensor {name}: bad value `{s}`")))
        .collect::<Result<Vec<T>, _>>()?;
    Array2::from_shape_vec((rows, cols), values).map_err(|e| format!("tensor {name}: {e}"))
}

pub fn write_checkpoint<T: Scalar>(ck: &Checkpoint<T>, path: impl AsRef<Path>) -> Result<(), FormatError> {
    ck.to_writer(BufWriter::new(File::create(path)?))
}

pub fn read_checkpoint<T: Scalar>(path: impl AsRef<Path>) -> Result<Checkpoint<T>, FormatError> {
    Checkpoint::from_reader(BufReader::new(File::open(path)?))
}
