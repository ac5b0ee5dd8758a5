#[allow(unused_imports)]
use num_traits::Float;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::matrix::Matrix;
use super::params::{Gradients, GroupId, ParamStore};
use super::NnError;

/// SGD with heavy-ball momentum: `v <- mu v + g`, `theta <- theta - lr v`.
#[derive(Debug, Clone)]
pub struct SgdMomentum {
    pub momentum: f64,
    velocity: BTreeMap<GroupId, Vec<Matrix>>,
}

impl SgdMomentum {
    pub fn new(momentum: f64) -> Self {
        Self {
            momentum,
            velocity: BTreeMap::new(),
        }
    }

    pub fn step(&mut self, params: &mut ParamStore, grads: &Gradients, lr: f64) -> Result<(), NnError> {
        grads.check_finite(params)?;
        for (&id, g_tensors) in &grads.per_group {
            let velocity = self
                .velocity
                .entry(id)
                .or_insert_with(|| g_tensors.iter().map(|g| Matrix::zeros(g.rows(), g.cols())).collect());
            let group = params.group_mut(id);
            for ((tensor, v), g) in group.tensors.iter_mut().zip(velocity.iter_mut()).zip(g_tensors) {
                for ((theta, vi), &gi) in tensor
                    .value
                    .data_mut()
                    .iter_mut()
                    .zip(v.data_mut().iter_mut())
                    .zip(g.data())
                {
                    *vi = self.momentum * *vi + gi;
                    *theta -= lr * *vi;
                }
            }
        }
        Ok(())
    }
}

/// Adam with bias correction.
#[derive(Debug, Clone)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    t: i32,
    moments: BTreeMap<GroupId, Vec<(Matrix, Matrix)>>,
}

impl Adam {
    pub fn new(lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            moments: BTreeMap::new(),
        }
    }

    pub fn step(&mut self, params: &mut ParamStore, grads: &Gradients) -> Result<(), NnError> {
        grads.check_finite(params)?;
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t);
        let bc2 = 1.0 - self.beta2.powi(self.t);
        for (&id, g_tensors) in &grads.per_group {
            let moments = self.moments.entry(id).or_insert_with(|| {
                g_tensors
                    .iter()
                    .map(|g| (Matrix::zeros(g.rows(), g.cols()), Matrix::zeros(g.rows(), g.cols())))
                    .collect()
            });
            let group = params.group_mut(id);
            for ((tensor, (m, v)), g) in group.tensors.iter_mut().zip(moments.iter_mut()).zip(g_tensors) {
                let theta = tensor.value.data_mut();
                let (m, v) = (m.data_mut(), v.data_mut());
                for i in 0..theta.len() {
                    let gi = g.data()[i];
                    m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * gi;
                    v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * gi * gi;
                    let m_hat = m[i] / bc1;
                    let v_hat = v[i] / bc2;
                    theta[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{ParamGroup, Tensor};
    use alloc::string::ToString;
    use alloc::vec;

    fn single(value: f64) -> (ParamStore, GroupId) {
        let mut store = ParamStore::new();
        let id = store.add_group(ParamGroup {
            name: "p".to_string(),
            tensors: vec![Tensor {
                name: "w0".to_string(),
                value: Matrix::scalar(value),
            }],
        });
        (store, id)
    }

    fn grad_of(id: GroupId, g: f64) -> Gradients {
        let mut grads = Gradients::default();
        grads.per_group.insert(id, vec![Matrix::scalar(g)]);
        grads
    }

    fn value(store: &ParamStore, id: GroupId) -> f64 {
        store.group(id).tensors[0].value.item()
    }

    #[test]
    fn sgd_first_step_without_history() {
        let (mut store, id) = single(1.0);
        let mut opt = SgdMomentum::new(0.9);
        opt.step(&mut store, &grad_of(id, 1.0), 0.1).unwrap();
        assert!((value(&store, id) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn sgd_momentum_second_displacement() {
        let (mut store, id) = single(0.0);
        let mut opt = SgdMomentum::new(0.9);
        opt.step(&mut store, &grad_of(id, 1.0), 0.1).unwrap();
        let first = -value(&store, id);
        opt.step(&mut store, &grad_of(id, 1.0), 0.1).unwrap();
        let second = -value(&store, id) - first;
        assert!((second / first - 1.9).abs() < 1e-12);
    }

    #[test]
    fn adam_first_step_moves_by_lr() {
        let (mut store, id) = single(0.0);
        let mut opt = Adam::new(1e-4);
        opt.step(&mut store, &grad_of(id, 1.0)).unwrap();
        // m_hat = 1, v_hat = 1: displacement lr / (1 + eps)
        let expected = 1e-4 / (1.0 + 1e-8);
        assert!((-value(&store, id) - expected).abs() < 1e-18);
    }

    #[test]
    fn nan_gradient_aborts_without_update() {
        let (mut store, id) = single(2.0);
        let mut opt = SgdMomentum::new(0.9);
        let err = opt.step(&mut store, &grad_of(id, f64::NAN), 0.1).unwrap_err();
        assert!(matches!(err, NnError::NonFiniteGradient { .. }));
        assert_eq!(value(&store, id), 2.0);
        let mut adam = Adam::new(0.1);
        assert!(adam.step(&mut store, &grad_of(id, f64::INFINITY)).is_err());
        assert_eq!(value(&store, id), 2.0);
    }
}
