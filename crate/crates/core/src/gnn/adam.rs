use ndarray::{Array2, Zip};

use super::model::ParamSet;
use crate::error::GnnError;
use crate::scalar::Scalar;

/// Adam with bias correction.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<T> {
    pub lr: T,
    pub beta1: T,
    pub beta2: T,
    pub eps: T,
    pub t: u64,
    pub m: Vec<Array2<T>>,
    pub v: Vec<Array2<T>>,
}

impl<T: Scalar> AdamState<T> {
    /// Fresh state with moments shaped like `params` and default betas.
    pub fn new<P: ParamSet<T>>(params: &P, lr: T) -> Self {
        let zeros: Vec<Array2<T>> = params
            .tensors()
            .into_iter()
            .map(|t| Array2::zeros(t.dim()))
            .collect();
        Self {
            lr,
            beta1: T::from_f64_lossy(0.9),
            beta2: T::from_f64_lossy(0.999),
            eps: T::from_f64_lossy(1e-8),
            t: 0,
            m: zeros.clone(),
            v: zeros,
        }
    }

    /// One update `p -= lr · m̂ / (sqrt(v̂) + eps)`.
    pub fn step<P: ParamSet<T>, G: ParamSet<T>>(&mut self, params: &mut P, grads: &G) -> Result<(), GnnError> {
        let mut ps = params.tensors_mut();
        let gs = grads.tensors();
        if ps.len() != gs.len()
            || ps.len() != self.m.len()
            || ps.iter().zip(&gs).zip(&self.m).any(|((p, g), m)| p.dim() != g.dim() || p.dim() != m.dim())
        {
            return Err(GnnError::Shape("parameter, gradient and moment shapes differ".into()));
        }
        self.t += 1;
        let t = i32::try_from(self.t).unwrap_or(i32::MAX);
        let (b1, b2) = (self.beta1, self.beta2);
        let one = T::one();
        let c1 = one - b1.powi(t);
        let c2 = one - b2.powi(t);
        let (lr, eps) = (self.lr, self.eps);
        for (((p, g), m), v) in ps.iter_mut().zip(gs).zip(&mut self.m).zip(&mut self.v) {
            Zip::from(&mut **p)
                .and(g)
                .and(m)
                .and(v)
                .for_each(|p, &g, m, v| {
                    *m = b1 * *m + (one - b1) * g;
                    *v = b2 * *v + (one - b2) * g * g;
                    let m_hat = *m / c1;
                    let v_hat = *v / c2;
                    *p -= lr * m_hat / (v_hat.sqrt() + eps);
                });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn zero_gradient_is_a_no_op() {
        let mut p = vec![array![[1.0f64, -2.0], [3.0, 4.0]]];
        let g = vec![Array2::<f64>::zeros((2, 2))];
        let mut st = AdamState::new(&p, 0.01);
        st.step(&mut p, &g).unwrap();
        assert_eq!(p[0], array![[1.0, -2.0], [3.0, 4.0]]);
        assert_eq!(st.t, 1);
    }

    #[test]
    fn first_step_closed_form() {
        let mut p = vec![array![[1.0f64]]];
        let g = vec![array![[0.5f64]]];
        let mut st = AdamState::new(&p, 0.01);
        st.step(&mut p, &g).unwrap();
        let expected = 1.0 - 0.01 * (0.5 / (0.5 + 1e-8));
        assert!((p[0][[0, 0]] - expected).abs() < 1e-15);
        assert!((p[0][[0, 0]] - 0.99).abs() < 1e-9);
    }

    #[test]
    fn two_steps_match_recurrence() {
        // straight-line evaluation of the recurrence for constant g = 0.5
        let (lr, b1, b2, eps, g) = (0.01f64, 0.9f64, 0.999f64, 1e-8f64, 0.5f64);
        let mut x = 1.0;
        let (mut m, mut v) = (0.0, 0.0);
        for t in 1..=2 {
            m = b1 * m + (1.0 - b1) * g;
            v = b2 * v + (1.0 - b2) * g * g;
            x -= lr * (m / (1.0 - b1.powi(t))) / ((v / (1.0 - b2.powi(t))).sqrt() + eps);
        }
        // constant g makes the corrected moments g and g², so each step is lr·g/(|g|+eps)
        assert!((x - (1.0 - 2.0 * 0.01 * 0.5 / (0.5 + 1e-8))).abs() < 1e-12);

        let mut p = vec![array![[1.0f64]]];
        let gs = vec![array![[g]]];
        let mut st = AdamState::new(&p, lr);
        st.step(&mut p, &gs).unwrap();
        st.step(&mut p, &gs).unwrap();
        assert!((p[0][[0, 0]] - x).abs() < 1e-15);
        assert!(st.v[0][[0, 0]] >= 0.0);
    }

    #[test]
    fn shape_mismatch() {
        let mut p = vec![array![[1.0f64]]];
        let g = vec![array![[1.0f64, 2.0]]];
        let mut st = AdamState::new(&p, 0.01);
        assert!(st.step(&mut p, &g).is_err());
    }
}
