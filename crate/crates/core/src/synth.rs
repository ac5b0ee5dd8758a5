//! Synthetic structural causal models with explicit noise, used as ground
//! truth for effect recovery.
//!
//! Continuous nodes are affine in their parents plus Gaussian noise; binary
//! nodes are Bernoulli with a logistic-of-affine probability. Binary values
//! enter parents' affine forms as 0/1, and their levels are the strings
//! `"0"` and `"1"`.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{Column, ColumnarDataset, RawColumn, CONDITION_TOL};
use crate::graph::{CausalGraph, Condition, ConditionValue, Edge, NodeId, NodeKind, NodeSpec, PathSet};
use crate::nn::sigmoid;

/// Default number of exogenous draws for the oracle.
pub const ORACLE_DRAWS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("node `{0}` has no structural function")]
    MissingFunction(String),
    #[error("function of `{node}` references `{parent}`, which is not a parent in the graph")]
    NotAParent { node: String, parent: String },
    #[error("node `{0}`: continuous nodes need a linear function, binary nodes a logistic one")]
    FormMismatch(String),
    #[error("node `{0}`: only continuous and binary nodes can be simulated")]
    Unsupported(String),
    #[error("node `{0}` has a non-finite parameter")]
    NonFinite(String),
    #[error("no oracle draw satisfied the condition")]
    EmptyCondition,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FunctionForm {
    Linear { noise_sd: f64 },
    Logistic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeFunction {
    pub form: FunctionForm,
    pub intercept: f64,
    pub coefficients: Vec<(NodeId, f64)>,
}

impl NodeFunction {
    pub fn linear(intercept: f64, coefficients: Vec<(NodeId, f64)>, noise_sd: f64) -> Self {
        Self {
            form: FunctionForm::Linear { noise_sd },
            intercept,
            coefficients,
        }
    }

    pub fn logistic(intercept: f64, coefficients: Vec<(NodeId, f64)>) -> Self {
        Self {
            form: FunctionForm::Logistic,
            intercept,
            coefficients,
        }
    }

    fn affine(&self, values: &[f64]) -> f64 {
        self.intercept + self.coefficients.iter().map(|&(p, c)| c * values[p.0]).sum::<f64>()
    }

    /// Value given parents and the node's exogenous draw: a standard normal
    /// for linear nodes, a uniform for logistic ones.
    fn apply(&self, values: &[f64], noise: f64) -> f64 {
        match self.form {
            FunctionForm::Linear { noise_sd } => self.affine(values) + noise_sd * noise,
            FunctionForm::Logistic => (noise < sigmoid(self.affine(values))) as u8 as f64,
        }
    }

    fn probability(&self, values: &[f64]) -> f64 {
        sigmoid(self.affine(values))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticScm {
    graph: CausalGraph,
    functions: Vec<NodeFunction>,
}

/// Effect to compute by brute force.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleQuery {
    Total,
    /// Intervention carried only along the path set's edges.
    PathSpecific(PathSet),
    /// Total effect among draws whose natural values satisfy the condition.
    Counterfactual(Vec<Condition>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleEstimate {
    pub value: f64,
    pub standard_error: f64,
    pub draws: usize,
}

impl SyntheticScm {
    pub fn new(graph: CausalGraph, functions: Vec<NodeFunction>) -> Result<Self, SynthError> {
        if functions.len() != graph.len() {
            let missing = graph.name(NodeId(functions.len().min(graph.len() - 1))).to_string();
            return Err(SynthError::MissingFunction(missing));
        }
        for (id, f) in graph.ids().zip(&functions) {
            let name = graph.name(id).to_string();
            let form_ok = match (graph.node(id).kind, f.form) {
                (NodeKind::Continuous, FunctionForm::Linear { .. }) => true,
                (NodeKind::Categorical { cardinality: 2 }, FunctionForm::Logistic) => true,
                (NodeKind::Categorical { cardinality }, _) if cardinality > 2 => {
                    return Err(SynthError::Unsupported(name));
                }
                _ => false,
            };
            if !form_ok {
                return Err(SynthError::FormMismatch(name));
            }
            let sd_ok = match f.form {
                FunctionForm::Linear { noise_sd } => noise_sd.is_finite() && noise_sd >= 0.0,
                FunctionForm::Logistic => true,
            };
            if !sd_ok || !f.intercept.is_finite() || f.coefficients.iter().any(|(_, c)| !c.is_finite()) {
                return Err(SynthError::NonFinite(name));
            }
            for &(p, _) in &f.coefficients {
                if !graph.parents(id).contains(&p) {
                    return Err(SynthError::NotAParent {
                        node: name,
                        parent: graph.name(p).to_string(),
                    });
                }
            }
        }
        Ok(Self { graph, functions })
    }

    pub fn graph(&self) -> &CausalGraph {
        &self.graph
    }

    pub fn functions(&self) -> &[NodeFunction] {
        &self.functions
    }

    fn draw_noise(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        for (slot, f) in out.iter_mut().zip(&self.functions) {
            *slot = match f.form {
                FunctionForm::Linear { .. } => rng.sample(StandardNormal),
                FunctionForm::Logistic => rng.random::<f64>(),
            };
        }
    }

    fn natural(&self, noise: &[f64], values: &mut [f64]) {
        for &v in self.graph.topo_order() {
            values[v.0] = self.functions[v.0].apply(values, noise[v.0]);
        }
    }

    /// World under `do(S = s)` sharing `natural`'s noise.
    fn intervened(&self, noise: &[f64], natural: &[f64], s: f64, values: &mut [f64]) {
        values.copy_from_slice(natural);
        let s_node = self.graph.sensitive();
        values[s_node.0] = s;
        let desc = self.graph.descendants(s_node);
        for &v in self.graph.topo_order() {
            if desc[v.0] {
                values[v.0] = self.functions[v.0].apply(values, noise[v.0]);
            }
        }
    }

    /// Ancestral sample of `n` rows, columns in graph node order.
    pub fn generate(&self, n: usize, seed: u64) -> ColumnarDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = self.graph.len();
        let mut noise = vec![0.0; k];
        let mut values = vec![0.0; k];
        let mut cols: Vec<Vec<f64>> = vec![Vec::with_capacity(n); k];
        for _ in 0..n {
            self.draw_noise(&mut rng, &mut noise);
            self.natural(&noise, &mut values);
            for (c, &v) in cols.iter_mut().zip(&values) {
                c.push(v);
            }
        }
        let columns = self
            .graph
            .nodes()
            .iter()
            .zip(cols)
            .map(|(spec, v)| Column {
                name: spec.name.clone(),
                values: match spec.kind {
                    NodeKind::Continuous => RawColumn::Continuous(v),
                    NodeKind::Categorical { .. } => {
                        RawColumn::Categorical(v.into_iter().map(|x| (x as u8).to_string()).collect())
                    }
                },
            })
            .collect();
        ColumnarDataset::new(columns).expect("generated columns are consistent")
    }

    fn matches(&self, values: &[f64], condition: &[Condition]) -> bool {
        condition.iter().all(|c| match &c.value {
            ConditionValue::Number(x) => (values[c.node.0] - x).abs() <= CONDITION_TOL,
            ConditionValue::Level(l) => (values[c.node.0] as u8).to_string() == *l,
        })
    }

    /// Mean difference of outcome probabilities between the two worlds over
    /// `draws` exogenous samples, with its standard error.
    pub fn oracle_effect(&self, query: &OracleQuery, draws: usize, seed: u64) -> Result<OracleEstimate, SynthError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = self.graph.len();
        let y = self.graph.outcome();
        let s = self.graph.sensitive();
        let f_y = &self.functions[y.0];
        let mut noise = vec![0.0; k];
        let mut nat = vec![0.0; k];
        let mut plus = vec![0.0; k];
        let mut minus = vec![0.0; k];
        let (mut sum, mut sum_sq, mut used) = (0.0, 0.0, 0usize);
        for _ in 0..draws {
            self.draw_noise(&mut rng, &mut noise);
            self.natural(&noise, &mut nat);
            if let OracleQuery::Counterfactual(cond) = query {
                if !self.matches(&nat, cond) {
                    continue;
                }
            }
            self.intervened(&noise, &nat, 0.0, &mut minus);
            match query {
                OracleQuery::PathSpecific(pi) => {
                    plus.copy_from_slice(&minus);
                    plus[s.0] = 1.0;
                    for &v in self.graph.topo_order() {
                        let parents = self.graph.parents(v);
                        if v == s || !parents.iter().any(|&p| pi.carries(Edge::new(p, v))) {
                            continue;
                        }
                        // Parents reached through non-path edges keep their reference value.
                        let f = &self.functions[v.0];
                        let mut z = f.intercept;
                        for &(p, c) in &f.coefficients {
                            let src = if pi.carries(Edge::new(p, v)) { plus[p.0] } else { minus[p.0] };
                            z += c * src;
                        }
                        plus[v.0] = match f.form {
                            FunctionForm::Linear { noise_sd } => z + noise_sd * noise[v.0],
                            FunctionForm::Logistic => (noise[v.0] < sigmoid(z)) as u8 as f64,
                        };
                    }
                    // the outcome's probability under the same per-edge rule
                    let mut z = f_y.intercept;
                    for &(p, c) in &f_y.coefficients {
                        let src = if pi.carries(Edge::new(p, y)) { plus[p.0] } else { minus[p.0] };
                        z += c * src;
                    }
                    let diff = sigmoid(z) - f_y.probability(&minus);
                    sum += diff;
                    sum_sq += diff * diff;
                }
                _ => {
                    self.intervened(&noise, &nat, 1.0, &mut plus);
                    let diff = f_y.probability(&plus) - f_y.probability(&minus);
                    sum += diff;
                    sum_sq += diff * diff;
                }
            }
            used += 1;
        }
        if used == 0 {
            return Err(SynthError::EmptyCondition);
        }
        let n = used as f64;
        let mean = sum / n;
        let var = (sum_sq / n - mean * mean).max(0.0);
        Ok(OracleEstimate {
            value: mean,
            standard_error: (var / n).sqrt(),
            draws: used,
        })
    }

    /// `P(Y=1 | S=1) − P(Y=1 | S=0)` in the natural world, by sampling.
    pub fn oracle_parity(&self, draws: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = self.graph.len();
        let (s, y) = (self.graph.sensitive(), self.graph.outcome());
        let mut noise = vec![0.0; k];
        let mut nat = vec![0.0; k];
        let mut acc = [(0.0, 0usize); 2];
        for _ in 0..draws {
            self.draw_noise(&mut rng, &mut noise);
            self.natural(&noise, &mut nat);
            let g = nat[s.0] as usize;
            acc[g].0 += self.functions[y.0].probability(&nat);
            acc[g].1 += 1;
        }
        acc[1].0 / acc[1].1.max(1) as f64 - acc[0].0 / acc[0].1.max(1) as f64
    }
}

/// Default benchmark family. Two roots (continuous `A1`, binary `A2`), a
/// binary sensitive `S` that is the majority group, a mediator `B`, and a
/// logistic outcome whose response to `S` varies strongly with `A1`.
pub fn benchmark() -> SyntheticScm {
    let graph = CausalGraph::new(
        vec![
            NodeSpec::continuous("A1"),
            NodeSpec::binary("A2"),
            NodeSpec::binary("S"),
            NodeSpec::continuous("B"),
            NodeSpec::binary("Y"),
        ],
        &[
            ("A1", "S"),
            ("A2", "S"),
            ("A1", "B"),
            ("S", "B"),
            ("S", "Y"),
            ("B", "Y"),
            ("A1", "Y"),
            ("A2", "Y"),
        ],
        "S",
        "Y",
    )
    .expect("benchmark graph is valid");
    let id = |n: &str| graph.id(n).expect("benchmark node");
    let functions = vec![
        NodeFunction::linear(0.0, vec![], 1.0),
        NodeFunction::logistic(0.0, vec![]),
        NodeFunction::logistic(1.0, vec![(id("A1"), 2.0), (id("A2"), 0.5)]),
        NodeFunction::linear(0.0, vec![(id("S"), 2.0), (id("A1"), 0.5)], 0.3),
        NodeFunction::logistic(-1.0, vec![(id("S"), 2.0), (id("B"), 0.5), (id("A1"), 4.0), (id("A2"), 1.0)]),
    ];
    SyntheticScm::new(graph, functions).expect("benchmark functions are valid")
}

/// Conditioning event used with the benchmark for counterfactual effects.
pub fn benchmark_condition(scm: &SyntheticScm) -> Vec<Condition> {
    vec![Condition {
        node: scm.graph().id("A2").expect("benchmark node"),
        value: ConditionValue::Level("1".to_string()),
    }]
}
