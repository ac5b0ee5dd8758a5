#[allow(unused_imports)]
use num_traits::Float;
use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::format;
use rand::Rng;

use super::matrix::Matrix;
use super::tape::{Tape, Var};
use super::NnError;

/// Index of a parameter group inside a [`ParamStore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupId(pub(crate) usize);

impl GroupId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub name: String,
    pub value: Matrix,
}

/// Parameters of one sub-network. Feed-forward groups alternate weight
/// (fan_in × fan_out) and bias (1 × fan_out) tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGroup {
    pub name: String,
    pub tensors: Vec<Tensor>,
}

impl ParamGroup {
    pub fn num_params(&self) -> usize {
        self.tensors.iter().map(|t| t.value.data().len()).sum()
    }

    /// Layer widths `[in, h1, ..., out]` of a feed-forward group.
    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut sizes = Vec::new();
        for (i, t) in self.tensors.iter().step_by(2).enumerate() {
            if i == 0 {
                sizes.push(t.value.rows());
            }
            sizes.push(t.value.cols());
        }
        sizes
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamStore {
    groups: Vec<ParamGroup>,
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add a feed-forward group with Glorot-uniform weights and zero biases.
    pub fn add_mlp<R: Rng + ?Sized>(&mut self, name: &str, sizes: &[usize], rng: &mut R) -> GroupId {
        assert!(sizes.len() >= 2, "an MLP needs input and output widths");
        let mut tensors = Vec::with_capacity(2 * (sizes.len() - 1));
        for (layer, pair) in sizes.windows(2).enumerate() {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let w = (0..fan_in * fan_out)
                .map(|_| rng.random_range(-bound..=bound))
                .collect();
            tensors.push(Tensor {
                name: format!("w{layer}"),
                value: Matrix::from_vec(fan_in, fan_out, w),
            });
            tensors.push(Tensor {
                name: format!("b{layer}"),
                value: Matrix::zeros(1, fan_out),
            });
        }
        self.add_group(ParamGroup {
            name: name.to_string(),
            tensors,
        })
    }

    pub fn add_group(&mut self, group: ParamGroup) -> GroupId {
        self.groups.push(group);
        GroupId(self.groups.len() - 1)
    }

    pub fn group(&self, id: GroupId) -> &ParamGroup {
        &self.groups[id.0]
    }

    pub fn group_mut(&mut self, id: GroupId) -> &mut ParamGroup {
        &mut self.groups[id.0]
    }

    pub fn groups(&self) -> &[ParamGroup] {
        &self.groups
    }

    pub fn ids(&self) -> impl Iterator<Item = GroupId> {
        (0..self.groups.len()).map(GroupId)
    }

    pub fn find(&self, name: &str) -> Option<GroupId> {
        self.groups.iter().position(|g| g.name == name).map(GroupId)
    }

    pub fn num_params(&self) -> usize {
        self.groups.iter().map(ParamGroup::num_params).sum()
    }

    /// Place the groups on `tape`; `trainable` groups become variables,
    /// the others constants.
    pub fn bind(&self, tape: &mut Tape, ids: &[GroupId], trainable: bool) -> Binding {
        let mut vars = BTreeMap::new();
        for &id in ids {
            let layer_vars = self.groups[id.0]
                .tensors
                .iter()
                .map(|t| {
                    if trainable {
                        tape.variable(t.value.clone())
                    } else {
                        tape.constant(t.value.clone())
                    }
                })
                .collect();
            vars.insert(id, layer_vars);
        }
        Binding { vars }
    }
}

/// Tape handles for a set of bound parameter groups.
#[derive(Debug, Clone, Default)]
pub struct Binding {
    vars: BTreeMap<GroupId, Vec<Var>>,
}

impl Binding {
    pub fn vars(&self, id: GroupId) -> &[Var] {
        &self.vars[&id]
    }

    pub fn contains(&self, id: GroupId) -> bool {
        self.vars.contains_key(&id)
    }

    /// Merge another binding (groups must not overlap).
    pub fn extend(&mut self, other: Binding) {
        for (k, v) in other.vars {
            let prev = self.vars.insert(k, v);
            debug_assert!(prev.is_none(), "group bound twice");
        }
    }

    /// Gradient values of `loss` for every bound group.
    pub fn gradients(&self, tape: &mut Tape, loss: Var) -> Result<Gradients, NnError> {
        let flat: Vec<Var> = self.vars.values().flatten().copied().collect();
        let grads = tape.grad(loss, &flat)?;
        let mut it = grads.into_iter();
        let mut per_group = BTreeMap::new();
        for (&id, vars) in &self.vars {
            let values = vars
                .iter()
                .map(|_| tape.value(it.next().expect("gradient per variable")).clone())
                .collect();
            per_group.insert(id, values);
        }
        Ok(Gradients { per_group })
    }
}

/// Gradient values keyed by parameter group, tensors in group order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Gradients {
    pub per_group: BTreeMap<GroupId, Vec<Matrix>>,
}

impl Gradients {
    pub fn group(&self, id: GroupId) -> Option<&[Matrix]> {
        self.per_group.get(&id).map(Vec::as_slice)
    }

    pub fn retain(&mut self, keep: &[GroupId]) {
        self.per_group.retain(|id, _| keep.contains(id));
    }

    pub(crate) fn check_finite(&self, params: &ParamStore) -> Result<(), NnError> {
        for (id, tensors) in &self.per_group {
            if !tensors.iter().all(Matrix::is_finite) {
                return Err(NnError::NonFiniteGradient {
                    group: params.group(*id).name.clone(),
                });
            }
        }
        Ok(())
    }
}
