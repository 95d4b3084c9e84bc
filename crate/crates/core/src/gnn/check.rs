//! Central finite differences for checking analytic gradients.

use super::model::{cross_entropy, forward, GcnModel, GraphInput, ParamSet};
use crate::error::GnnError;

/// Loss of a single graph.
pub fn loss(model: &GcnModel<f64>, input: &GraphInput<f64>) -> Result<f64, GnnError> {
    let cache = forward(model, &input.adj, &input.features)?;
    Ok(cross_entropy(cache.logits.as_slice().expect("contiguous"), input.class()))
}

/// Numerical gradient of the single-graph loss, one parameter at a time.
pub fn numeric_gradient(
    model: &GcnModel<f64>,
    input: &GraphInput<f64>,
    step: f64,
) -> Result<GcnModel<f64>, GnnError> {
    let mut probe = model.clone();
    let mut grad = model.zeros_like();
    let count = model.tensors().len();
    for t in 0..count {
        let len = model.tensors()[t].len();
        for i in 0..len {
            let orig = probe.tensors()[t].as_slice().expect("standard layout")[i];
            probe.tensors_mut()[t].as_slice_mut().expect("standard layout")[i] = orig + step;
            let up = loss(&probe, input)?;
            probe.tensors_mut()[t].as_slice_mut().expect("standard layout")[i] = orig - step;
            let down = loss(&probe, input)?;
            probe.tensors_mut()[t].as_slice_mut().expect("standard layout")[i] = orig;
            grad.tensors_mut()[t].as_slice_mut().expect("standard layout")[i] = (up - down) / (2.0 * step);
        }
    }
    Ok(grad)
}

/// Per tensor, `max |a - b| / max(|a|, |b|, floor)`.
pub fn max_relative_errors(a: &GcnModel<f64>, b: &GcnModel<f64>, floor: f64) -> Vec<f64> {
    a.tensors()
        .into_iter()
        .zip(b.tensors())
        .map(|(x, y)| {
            x.iter()
                .zip(y.iter())
                .map(|(&p, &q)| (p - q).abs() / p.abs().max(q.abs()).max(floor))
                .fold(0.0, f64::max)
        })
        .collect()
}
