use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use super::adjacency::NormalizedAdjacency;
use crate::error::GnnError;
use crate::rng::{rng_from_seed, uniform_f64};
use crate::scalar::Scalar;

pub const NUM_CLASSES: usize = 2;
pub const NUM_LAYERS: usize = 3;

/// Three GCN layers (no bias), mean pooling and a linear classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct GcnModel<T> {
    /// `(in × h)`, `(h × h)`, `(h × h)`.
    pub layers: Vec<Array2<T>>,
    /// `h × 2`.
    pub classifier: Array2<T>,
    /// `1 × 2`.
    pub bias: Array2<T>,
}

/// Parameter containers the optimizer and gradient checks walk over.
pub trait ParamSet<T> {
    fn tensors(&self) -> Vec<&Array2<T>>;
    fn tensors_mut(&mut self) -> Vec<&mut Array2<T>>;
}

impl<T> ParamSet<T> for GcnModel<T> {
    fn tensors(&self) -> Vec<&Array2<T>> {
        self.layers.iter().chain([&self.classifier, &self.bias]).collect()
    }

    fn tensors_mut(&mut self) -> Vec<&mut Array2<T>> {
        self.layers
            .iter_mut()
            .chain([&mut self.classifier, &mut self.bias])
            .collect()
    }
}

impl<T> ParamSet<T> for Vec<Array2<T>> {
    fn tensors(&self) -> Vec<&Array2<T>> {
        self.iter().collect()
    }

    fn tensors_mut(&mut self) -> Vec<&mut Array2<T>> {
        self.iter_mut().collect()
    }
}

/// Names matching the order of [`ParamSet::tensors`] for a `GcnModel`.
pub const TENSOR_NAMES: [&str; 5] = ["W0", "W1", "W2", "classifier", "bias"];

impl<T: Scalar> GcnModel<T> {
    pub fn zeros(input_width: usize, hidden: usize) -> Self {
        let mut layers = vec![Array2::zeros((input_width, hidden))];
        for _ in 1..NUM_LAYERS {
            layers.push(Array2::zeros((hidden, hidden)));
        }
        Self {
            layers,
            classifier: Array2::zeros((hidden, NUM_CLASSES)),
            bias: Array2::zeros((1, NUM_CLASSES)),
        }
    }

    /// Glorot-uniform weights `U(±sqrt(6/(fan_in+fan_out)))`, zero bias.
    pub fn init(input_width: usize, hidden: usize, seed: u64) -> Self {
        let mut m = Self::zeros(input_width, hidden);
        let mut r = rng_from_seed(seed);
        let n = m.tensors().len();
        for t in m.tensors_mut().into_iter().take(n - 1) {
            let (fan_in, fan_out) = t.dim();
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            t.mapv_inplace(|_| T::from_f64_lossy(uniform_f64(&mut r, -bound, bound)));
        }
        m
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].nrows()
    }

    pub fn hidden(&self) -> usize {
        self.classifier.nrows()
    }

    pub fn num_parameters(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    /// Same shapes as `self`, all zero.
    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.input_width(), self.hidden())
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|x| x.is_finite()))
    }

    fn check_shapes(&self) -> Result<(), GnnError> {
        let h = self.hidden();
        let ok = self.layers.len() == NUM_LAYERS
            && self.layers[1..].iter().all(|w| w.dim() == (h, h))
            && self.layers[0].ncols() == h
            && self.classifier.dim() == (h, NUM_CLASSES)
            && self.bias.dim() == (1, NUM_CLASSES);
        if ok {
            Ok(())
        } else {
            Err(GnnError::Shape("inconsistent model tensor shapes".into()))
        }
    }
}

/// Intermediate values kept for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache<T> {
    /// `Â · H^{l-1}` per layer.
    pub aggregated: Vec<Array2<T>>,
    /// Pre-activations `Â H^{l-1} W^{l-1}` per layer.
    pub pre_activations: Vec<Array2<T>>,
    /// `H^1..H^3`.
    pub hidden: Vec<Array2<T>>,
    pub pooled: Array1<T>,
    pub logits: Array1<T>,
}

fn relu<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        x
    } else {
        T::zero()
    }
}

/// Logits for one graph.
pub fn forward<T: Scalar>(
    model: &GcnModel<T>,
    adj: &NormalizedAdjacency<T>,
    x: &Array2<T>,
) -> Result<ForwardCache<T>, GnnError> {
    model.check_shapes()?;
    if x.nrows() != adj.num_nodes() {
        return Err(GnnError::Shape(format!(
            "{} feature rows for {} nodes",
            x.nrows(),
            adj.num_nodes()
        )));
    }
    if x.ncols() != model.input_width() {
        return Err(GnnError::Shape(format!(
            "feature width {} but model expects {}",
            x.ncols(),
            model.input_width()
        )));
    }
    if x.nrows() == 0 {
        return Err(GnnError::Shape("graph has no nodes".into()));
    }
    let mut aggregated = Vec::with_capacity(NUM_LAYERS);
    let mut pre_activations = Vec::with_capacity(NUM_LAYERS);
    let mut hidden: Vec<Array2<T>> = Vec::with_capacity(NUM_LAYERS);
    for w in &model.layers {
        let h_prev = hidden.last().unwrap_or(x);
        let agg = adj.apply(h_prev);
        let z = agg.dot(w);
        hidden.push(z.mapv(relu));
        aggregated.push(agg);
        pre_activations.push(z);
    }
    let pooled = hidden[NUM_LAYERS - 1]
        .mean_axis(Axis(0))
        .expect("non-empty graph");
    let logits = pooled.dot(&model.classifier) + model.bias.row(0);
    Ok(ForwardCache {
        aggregated,
        pre_activations,
        hidden,
        pooled,
        logits,
    })
}

/// `-log softmax(logits)[label]` with max subtraction.
pub fn cross_entropy<T: Scalar>(logits: &[T], label: usize) -> T {
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let sum = logits.iter().map(|&l| (l - max).exp()).fold(T::zero(), |a, b| a + b);
    max + sum.ln() - logits[label]
}

pub fn softmax<T: Scalar>(logits: &[T]) -> Vec<T> {
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = logits.iter().map(|&l| (l - max).exp()).collect();
    let sum = exps.iter().copied().fold(T::zero(), |a, b| a + b);
    exps.into_iter().map(|e| e / sum).collect()
}

/// Argmax class; ties go to class 0.
pub fn predict<T: Scalar>(logits: &[T]) -> usize {
    usize::from(logits[1] > logits[0])
}

/// One training example: normalized adjacency, features and label.
#[derive(Debug, Clone)]
pub struct GraphInput<T> {
    pub adj: NormalizedAdjacency<T>,
    pub features: Array2<T>,
    pub label: bool,
}

impl<T: Scalar> GraphInput<T> {
    pub fn from_encoded(g: &crate::encoding::EncodedGraph<T>) -> Self {
        Self {
            adj: NormalizedAdjacency::from_graph(g),
            features: g.node_features.clone(),
            label: g.label,
        }
    }

    /// Same graph with node `i` relabeled `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut features = Array2::zeros(self.features.dim());
        for (i, &p) in perm.iter().enumerate() {
            features.row_mut(p).assign(&self.features.row(i));
        }
        Self {
            adj: self.adj.permuted(perm),
            features,
            label: self.label,
        }
    }

    pub fn class(&self) -> usize {
        usize::from(self.label)
    }
}

/// Loss, logits and parameter gradient for one graph.
pub fn loss_and_gradient<T: Scalar>(
    model: &GcnModel<T>,
    input: &GraphInput<T>,
) -> Result<(T, Array1<T>, GcnModel<T>), GnnError> {
    let cache = forward(model, &input.adj, &input.features)?;
    let label = input.class();
    let logits = cache.logits.as_slice().expect("contiguous");
    let loss = cross_entropy(logits, label);

    let mut dlogits = Array1::from(softmax(logits));
    dlogits[label] -= T::one();

    let mut grad = model.zeros_like();
    let pooled = cache.pooled.view().insert_axis(Axis(1));
    grad.classifier = pooled.dot(&dlogits.view().insert_axis(Axis(0)));
    grad.bias.row_mut(0).assign(&dlogits);

    // Mean pooling spreads d(pooled) evenly over the nodes.
    let n = T::from_usize(input.features.nrows()).unwrap();
    let dpooled = model.classifier.dot(&dlogits) / n;
    let mut dh = Array2::from_shape_fn(cache.hidden[NUM_LAYERS - 1].dim(), |(_, j)| dpooled[j]);

    for l in (0..NUM_LAYERS).rev() {
        let z = &cache.pre_activations[l];
        let dz = ndarray::Zip::from(&dh)
            .and(z)
            .map_collect(|&g, &zv| if zv > T::zero() { g } else { T::zero() });
        grad.layers[l] = cache.aggregated[l].t().dot(&dz);
        if l > 0 {
            dh = input.adj.apply_transpose(&dz.dot(&model.layers[l].t()));
        }
    }
    Ok((loss, cache.logits, grad))
}

/// Mean loss and mean gradient over a batch, reduced in batch order.
pub fn backward<T: Scalar>(
    model: &GcnModel<T>,
    batch: &[&GraphInput<T>],
) -> Result<(T, GcnModel<T>, usize), GnnError> {
    if batch.is_empty() {
        return Err(GnnError::EmptyBatch);
    }
    let mut total = model.zeros_like();
    let mut loss_sum = T::zero();
    let mut correct = 0;
    for input in batch {
        let (loss, logits, g) = loss_and_gradient(model, input)?;
        loss_sum += loss;
        if predict(logits.as_slice().unwrap()) == input.class() {
            correct += 1;
        }
        for (acc, part) in total.tensors_mut().into_iter().zip(g.tensors()) {
            *acc += part;
        }
    }
    let scale = T::one() / T::from_usize(batch.len()).unwrap();
    for t in total.tensors_mut() {
        t.mapv_inplace(|v| v * scale);
    }
    Ok((loss_sum * scale, total, correct))
}

/// Model hyperparameters echoed into checkpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelShape {
    pub input_width: usize,
    pub hidden: usize,
    pub layers: usize,
}

impl<T: Scalar> From<&GcnModel<T>> for ModelShape {
    fn from(m: &GcnModel<T>) -> Self {
        ModelShape {
            input_width: m.input_width(),
            hidden: m.hidden(),
            layers: m.layers.len(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn finitely_many_a_input() -> GraphInput<f64> {
        GraphInput {
            adj: NormalizedAdjacency::from_edges(2, [(0, 0), (0, 0), (0, 1), (1, 1)]),
            features: array![[1.0, 0.0, 0.5, 0.5, 0.5], [0.0, 1.0, 0.5, 0.5, 0.5]],
            label: true,
        }
    }

    #[test]
    fn zero_weights_give_bias() {
        let mut m = GcnModel::<f64>::zeros(5, 4);
        m.bias = array![[0.3, -0.7]];
        let inp = finitely_many_a_input();
        let c = forward(&m, &inp.adj, &inp.features).unwrap();
        assert_eq!(c.logits, array![0.3, -0.7]);
    }

    #[test]
    fn isolated_node_gives_bias() {
        let mut m = GcnModel::<f64>::init(3, 6, 1);
        m.bias = array![[1.5, 2.5]];
        let adj = NormalizedAdjacency::from_edges(1, []);
        let c = forward(&m, &adj, &array![[1.0, 1.0, 0.5]]).unwrap();
        assert!(c.hidden[0].iter().all(|&v| v == 0.0));
        assert_eq!(c.logits, array![1.5, 2.5]);
    }

    #[test]
    fn shape_errors() {
        let m = GcnModel::<f64>::init(4, 6, 1);
        let inp = finitely_many_a_input();
        assert!(matches!(forward(&m, &inp.adj, &inp.features), Err(GnnError::Shape(_))));
        let m = GcnModel::<f64>::init(5, 6, 1);
        assert!(forward(&m, &inp.adj, &array![[1.0, 0.0, 0.5, 0.5, 0.5]]).is_err());
        assert!(matches!(backward(&m, &[]), Err(GnnError::EmptyBatch)));
    }

    #[test]
    fn cross_entropy_values() {
        assert!((cross_entropy(&[0.0f64, 0.0], 1) - std::f64::consts::LN_2).abs() < 1e-12);
        let tiny = cross_entropy(&[1000.0f64, -1000.0], 0);
        assert!(tiny.is_finite() && (0.0..1e-12).contains(&tiny));
        assert!((cross_entropy(&[1.0f64, 0.0], 1) - 1.313_261_687_518_222_8).abs() < 1e-12);
    }

    #[test]
    fn prediction_ties_go_to_zero() {
        assert_eq!(predict(&[0.0f64, 0.0]), 0);
        assert_eq!(predict(&[0.0f64, 1e-9]), 1);
    }

    #[test]
    fn bias_gradient_is_softmax_minus_onehot() {
        let mut m = GcnModel::<f64>::zeros(5, 4);
        m.bias = array![[0.2, -0.4]];
        let inp = finitely_many_a_input();
        let (_, g, _) = backward(&m, &[&inp]).unwrap();
        let p = softmax(&[0.2, -0.4]);
        assert!((g.bias[[0, 0]] - p[0]).abs() < 1e-15);
        assert!((g.bias[[0, 1]] - (p[1] - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn identical_batch_equals_single() {
        let m = GcnModel::<f64>::init(5, 8, 3);
        let inp = finitely_many_a_input();
        let (l1, g1, _) = backward(&m, &[&inp]).unwrap();
        let (l2, g2, _) = backward(&m, &[&inp, &inp]).unwrap();
        assert!((l1 - l2).abs() < 1e-15);
        for (a, b) in g1.tensors().into_iter().zip(g2.tensors()) {
            assert!(a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-15));
        }
    }

    #[test]
    fn glorot_bounds_and_determinism() {
        let a = GcnModel::<f64>::init(5, 20, 9);
        assert_eq!(a, GcnModel::init(5, 20, 9));
        let bound = (6.0f64 / 25.0).sqrt();
        assert!(a.layers[0].iter().all(|v| v.abs() <= bound));
        assert!(a.bias.iter().all(|&v| v == 0.0));
        assert_eq!(a.num_parameters(), 5 * 20 + 2 * 400 + 40 + 2);
    }

    #[test]
    fn f32_forward_runs() {
        let m = GcnModel::<f32>::init(5, 20, 9);
        let adj = NormalizedAdjacency::<f32>::from_edges(2, [(0, 1), (1, 0)]);
        let x = array![[1.0f32, 0.0, 0.5, 0.5, 0.5], [0.0, 1.0, 0.5, 0.5, 0.5]];
        assert!(forward(&m, &adj, &x).unwrap().logits.iter().all(|v| v.is_finite()));
    }
}
