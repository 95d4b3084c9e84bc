//! Vector encoding of automata into GNN inputs.
//!
//! Node row `q` is `[is_initial, is_accepting, extra_0, .., extra_{n_add-1}]`.
//! Edges carry a one-hot vector over the alphabet. Records on disk never
//! store feature matrices; they are rebuilt here from the automaton and the
//! item seed.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::automaton::{Nbw, State, Transition};
use crate::generator::BucketId;
use crate::rng::{mix, rng_from_seed, unit_f64};
use crate::scalar::Scalar;

/// Fills the `n_add` extra feature columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitMode {
    Zero,
    #[default]
    Half,
    /// Uniform in `[0, 1)`, fixed per automaton by its item seed.
    Random,
}

impl fmt::Display for InitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitMode::Zero => "zero",
            InitMode::Half => "half",
            InitMode::Random => "random",
        })
    }
}

impl FromStr for InitMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "zero" | "0" => Ok(InitMode::Zero),
            "half" | "0.5" => Ok(InitMode::Half),
            "random" => Ok(InitMode::Random),
            other => Err(format!("unknown init mode `{other}` (expected zero, half or random)")),
        }
    }
}

/// Salt separating the feature stream from the automaton stream of an item.
const FEATURE_SALT: u64 = 0x4645_4154_5552_4553;

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedEdge<T> {
    pub src: State,
    pub dst: State,
    pub label: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphMeta {
    pub item_seed: u64,
    pub bucket: Option<BucketId>,
    pub num_states: usize,
    pub num_symbols: usize,
}

/// GNN-ready form of one automaton.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedGraph<T> {
    /// `n × (2 + n_add)`.
    pub node_features: Array2<T>,
    /// One per transition, canonical order.
    pub edges: Vec<EncodedEdge<T>>,
    pub label: bool,
    pub meta: GraphMeta,
}

impl<T: Scalar> EncodedGraph<T> {
    pub fn num_nodes(&self) -> usize {
        self.node_features.nrows()
    }

    pub fn feature_width(&self) -> usize {
        self.node_features.ncols()
    }

    /// Rebuilds the automaton from the edge labels and the accepting column.
    pub fn decode(&self) -> Nbw {
        let one = T::one();
        let transitions = self.edges.iter().map(|e| {
            let sym = e.label.iter().position(|&x| x == one).expect("one-hot label");
            Transition::new(e.src, sym, e.dst)
        });
        let accepting = (0..self.num_nodes()).filter(|&q| self.node_features[[q, 1]] == one);
        Nbw::new(self.meta.num_states, self.meta.num_symbols, transitions, accepting)
            .expect("encoding of a valid automaton")
    }
}

/// Encodes `a` with `n_add` extra columns. The label and bucket are attached
/// separately; encoding never looks at them.
pub fn encode<T: Scalar>(a: &Nbw, n_add: usize, init_mode: InitMode, item_seed: u64) -> EncodedGraph<T> {
    let n = a.num_states();
    let mut x = Array2::<T>::zeros((n, 2 + n_add));
    let fill = T::from_f64_lossy(0.5);
    let mut r = rng_from_seed(mix(item_seed, FEATURE_SALT));
    for q in 0..n {
        if q == a.initial() {
            x[[q, 0]] = T::one();
        }
        if a.is_accepting(q) {
            x[[q, 1]] = T::one();
        }
        for k in 0..n_add {
            x[[q, 2 + k]] = match init_mode {
                InitMode::Zero => T::zero(),
                InitMode::Half => fill,
                InitMode::Random => T::from_f64_lossy(unit_f64(&mut r)),
            };
        }
    }
    let s = a.num_symbols();
    let edges = a
        .transitions()
        .iter()
        .map(|t| {
            let mut label = vec![T::zero(); s];
            label[t.sym] = T::one();
            EncodedEdge { src: t.src, dst: t.dst, label }
        })
        .collect();
    EncodedGraph {
        node_features: x,
        edges,
        label: false,
        meta: GraphMeta {
            item_seed,
            bucket: None,
            num_states: n,
            num_symbols: s,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn finitely_many_a() -> Nbw {
        Nbw::new(2, 2, [(0, 0, 0), (0, 1, 0), (0, 1, 1), (1, 1, 1)], [1]).unwrap()
    }

    #[test]
    fn finitely_many_a_half_encoding() {
        let g = encode::<f64>(&finitely_many_a(), 3, InitMode::Half, 0);
        assert_eq!(
            g.node_features,
            array![[1.0, 0.0, 0.5, 0.5, 0.5], [0.0, 1.0, 0.5, 0.5, 0.5]]
        );
        let edges: Vec<_> = g.edges.iter().map(|e| (e.src, e.dst, e.label.clone())).collect();
        assert_eq!(
            edges,
            vec![
                (0, 0, vec![1.0, 0.0]),
                (0, 0, vec![0.0, 1.0]),
                (0, 1, vec![0.0, 1.0]),
                (1, 1, vec![0.0, 1.0]),
            ]
        );
    }

    #[test]
    fn flags_only_without_extras() {
        let g = encode::<f32>(&finitely_many_a(), 0, InitMode::Zero, 0);
        assert_eq!(g.node_features, array![[1.0f32, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn random_mode_is_seeded() {
        let a = finitely_many_a();
        let g1 = encode::<f64>(&a, 4, InitMode::Random, 77);
        let g2 = encode::<f64>(&a, 4, InitMode::Random, 77);
        let g3 = encode::<f64>(&a, 4, InitMode::Random, 78);
        assert_eq!(g1, g2);
        assert_ne!(g1.node_features, g3.node_features);
        assert!(g1.node_features.iter().all(|&v| (0.0..1.0).contains(&v) || v == 1.0));
    }

    #[test]
    fn decode_inverts_encode() {
        let a = finitely_many_a();
        assert_eq!(encode::<f64>(&a, 2, InitMode::Random, 3).decode(), a);
    }

    #[test]
    fn init_mode_parsing() {
        assert_eq!("half".parse::<InitMode>().unwrap(), InitMode::Half);
        assert_eq!("Random".parse::<InitMode>().unwrap(), InitMode::Random);
        assert!("ones".parse::<InitMode>().is_err());
    }
}
