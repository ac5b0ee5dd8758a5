use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use super::params::ParamGroup;
use super::tape::{Tape, Var};
use super::NnError;

/// Output transform of a sub-network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Head {
    /// Continuous nodes and critics.
    Linear,
    /// Binary nodes: one logit, probability of the second level.
    Logistic,
    /// Categorical nodes with more than two levels.
    Softmax,
}

/// Pre-head output of a tanh MLP whose (weight, bias) tensors are `layers`.
pub fn mlp_forward(tape: &mut Tape, layers: &[Var], input: Var) -> Result<Var, NnError> {
    let expected = tape.shape(layers[0]).0;
    let found = tape.shape(input).1;
    if expected != found {
        return Err(NnError::ShapeMismatch { expected, found });
    }
    let n_layers = layers.len() / 2;
    let mut h = input;
    for (i, pair) in layers.chunks(2).enumerate() {
        let z = tape.matmul(h, pair[0]);
        let z = tape.add_row(z, pair[1]);
        h = if i + 1 < n_layers { tape.tanh(z) } else { z };
    }
    Ok(h)
}

pub fn apply_head(tape: &mut Tape, head: Head, logits: Var) -> Var {
    match head {
        Head::Linear => logits,
        Head::Logistic => tape.sigmoid(logits),
        Head::Softmax => tape.softmax(logits),
    }
}

/// Evaluate a group on a single input vector.
pub fn forward_mlp(group: &ParamGroup, head: Head, input: &[f64]) -> Result<Vec<f64>, NnError> {
    let mut tape = Tape::new();
    let layers: Vec<Var> = group
        .tensors
        .iter()
        .map(|t| tape.constant(t.value.clone()))
        .collect();
    let x = tape.constant(Matrix::row(input));
    let logits = mlp_forward(&mut tape, &layers, x)?;
    let out = apply_head(&mut tape, head, logits);
    Ok(tape.value(out).data().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::ParamStore;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_logistic_net_outputs_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut store = ParamStore::new();
        let id = store.add_mlp("y", &[3, 4, 1], &mut rng);
        for t in &mut store.group_mut(id).tensors {
            t.value = Matrix::zeros(t.value.rows(), t.value.cols());
        }
        for x in [[0.0, 0.0, 0.0], [5.0, -3.0, 1.0]] {
            assert_eq!(forward_mlp(store.group(id), Head::Logistic, &x).unwrap(), vec![0.5]);
        }
    }

    #[test]
    fn zero_hidden_weight_gives_head_bias() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut store = ParamStore::new();
        let id = store.add_mlp("y", &[1, 1, 1], &mut rng);
        let g = store.group_mut(id);
        g.tensors[0].value = Matrix::scalar(0.0);
        g.tensors[1].value = Matrix::scalar(0.3);
        g.tensors[2].value = Matrix::scalar(2.0);
        g.tensors[3].value = Matrix::scalar(-0.5);
        let expected = 2.0 * 0.3f64.tanh() - 0.5;
        for x in [-4.0, 0.0, 7.0] {
            let out = forward_mlp(store.group(id), Head::Linear, &[x]).unwrap()[0];
            assert_eq!(out, expected);
        }
    }

    #[test]
    fn matches_straight_line_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut store = ParamStore::new();
        let id = store.add_mlp("net", &[3, 5, 4, 1], &mut rng);
        for t in &mut store.group_mut(id).tensors {
            let r = t.value.rows();
            let c = t.value.cols();
            let vals = (0..r * c).map(|i| ((i * 37 % 11) as f64 - 5.0) / 7.0).collect();
            t.value = Matrix::from_vec(r, c, vals);
        }
        let x = [0.3, -0.7, 1.1];
        // hand-rolled evaluation, independent of the tape
        let g = store.group(id);
        let mut h: Vec<f64> = x.to_vec();
        let n_layers = g.tensors.len() / 2;
        for layer in 0..n_layers {
            let w = &g.tensors[2 * layer].value;
            let b = &g.tensors[2 * layer + 1].value;
            let mut next = vec![0.0; w.cols()];
            for j in 0..w.cols() {
                let mut acc = 0.0;
                for i in 0..w.rows() {
                    acc += h[i] * w.get(i, j);
                }
                acc += b.get(0, j);
                next[j] = if layer + 1 < n_layers { acc.tanh() } else { acc };
            }
            h = next;
        }
        let p = 1.0 / (1.0 + (-h[0]).exp());
        let out = forward_mlp(g, Head::Logistic, &x).unwrap()[0];
        assert!((out - p).abs() < 1e-12);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut store = ParamStore::new();
        let id = store.add_mlp("y", &[3, 2, 1], &mut rng);
        assert_eq!(
            forward_mlp(store.group(id), Head::Linear, &[1.0]),
            Err(NnError::ShapeMismatch { expected: 3, found: 1 })
        );
    }
}
