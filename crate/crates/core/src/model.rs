//! Graph-structured networks: one sub-network per non-root node, shared by
//! the observational fit (F¹) and the interventional cascades (F²), plus the
//! scalar critic D.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Encoding;
use crate::graph::{CausalGraph, EffectMode, NodeId, NodeKind, PathSet};
use crate::nn::{apply_head, mlp_forward, Binding, GroupId, Head, Matrix, NnError, ParamStore, Tape, Var};

/// Rows per tape when evaluating a whole dataset.
const EVAL_CHUNK: usize = 2048;
const NORM_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error("weight vector has length {found}, batch has {expected} rows")]
    WeightLength { expected: usize, found: usize },
    #[error("weight {value} at index {index} is negative or not finite")]
    BadWeight { index: usize, value: f64 },
    #[error("batch has {found} columns, encoding expects {expected}")]
    Width { expected: usize, found: usize },
    #[error("encoding does not cover node `{0}`")]
    Encoding(String),
    #[error("fairness mode is {found}, operation needs {expected}")]
    ModeMismatch { expected: EffectMode, found: EffectMode },
    #[error("path set is empty")]
    EmptyPathSet,
    #[error("parameter group `{0}` is missing or has the wrong shape")]
    Checkpoint(String),
    #[error("critic inputs have mismatched lengths")]
    CriticInput,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub hidden: Vec<usize>,
    pub critic_hidden: Vec<usize>,
    /// Append observed non-descendants of `S` to the critic input.
    pub critic_context: bool,
    /// Feed predicted rather than observed parent values during the fit.
    pub f1_cascade: bool,
    pub lambda_gp: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            hidden: vec![32, 32],
            critic_hidden: vec![32, 32, 32],
            critic_context: false,
            f1_cascade: false,
            lambda_gp: 10.0,
        }
    }
}

/// Handles produced by one critic evaluation on a tape.
#[derive(Debug, Clone, Copy)]
pub struct CriticTerms {
    /// `(1/n) Σ w_k (D(ŷ⁺_k) − D(ŷ⁻_k))`.
    pub gap: Var,
    pub penalty: Var,
    /// `gap − λ_gp · penalty`, the quantity the critic maximizes.
    pub objective: Var,
}

#[derive(Debug, Clone)]
pub struct StructuredModel {
    graph: CausalGraph,
    encoding: Encoding,
    pathset: PathSet,
    config: ModelConfig,
    params: ParamStore,
    node_groups: Vec<Option<GroupId>>,
    heads: Vec<Head>,
    critic: GroupId,
    s_descendant: Vec<bool>,
    context_nodes: Vec<NodeId>,
    trained: bool,
}

pub(crate) fn node_group_name(graph: &CausalGraph, id: NodeId) -> String {
    let mut s = String::from("node:");
    s.push_str(graph.name(id));
    s
}

pub(crate) const CRITIC_GROUP: &str = "critic";

fn head_for(kind: NodeKind) -> Head {
    match kind {
        NodeKind::Continuous => Head::Linear,
        NodeKind::Categorical { cardinality: 2 } => Head::Logistic,
        NodeKind::Categorical { .. } => Head::Softmax,
    }
}

fn head_width(kind: NodeKind) -> usize {
    match kind {
        NodeKind::Categorical { cardinality } if cardinality > 2 => cardinality,
        _ => 1,
    }
}

impl StructuredModel {
    /// Fresh parameters drawn from `seed`: node groups in id order, then the critic.
    pub fn new(graph: CausalGraph, encoding: Encoding, pathset: PathSet, config: ModelConfig, seed: u64) -> Result<Self, ModelError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = ParamStore::new();
        let layout = Self::layout(&graph, &encoding, &config)?;
        for (id, sizes) in &layout.node_sizes {
            params.add_mlp(&node_group_name(&graph, *id), sizes, &mut rng);
        }
        params.add_mlp(CRITIC_GROUP, &layout.critic_sizes, &mut rng);
        Self::from_params(graph, encoding, pathset, config, params)
    }

    /// Rebuild around existing parameters, checking every group's shape.
    pub fn from_params(graph: CausalGraph, encoding: Encoding, pathset: PathSet, config: ModelConfig, params: ParamStore) -> Result<Self, ModelError> {
        let layout = Self::layout(&graph, &encoding, &config)?;
        let mut node_groups = vec![None; graph.len()];
        let check = |name: &str, sizes: &[usize]| -> Result<GroupId, ModelError> {
            let id = params.find(name).ok_or_else(|| ModelError::Checkpoint(name.to_string()))?;
            if params.group(id).layer_sizes() != sizes {
                return Err(ModelError::Checkpoint(name.to_string()));
            }
            Ok(id)
        };
        for (id, sizes) in &layout.node_sizes {
            node_groups[id.0] = Some(check(&node_group_name(&graph, *id), sizes)?);
        }
        let critic = check(CRITIC_GROUP, &layout.critic_sizes)?;
        let heads = graph.nodes().iter().map(|n| head_for(n.kind)).collect();
        let s_descendant = graph.descendants(graph.sensitive());
        Ok(Self {
            node_groups,
            heads,
            critic,
            s_descendant,
            context_nodes: layout.context_nodes,
            graph,
            encoding,
            pathset,
            config,
            params,
            trained: false,
        })
    }

    fn layout(graph: &CausalGraph, encoding: &Encoding, config: &ModelConfig) -> Result<Layout, ModelError> {
        for id in graph.ids() {
            if encoding.columns().iter().all(|c| c.node != id) {
                return Err(ModelError::Encoding(graph.name(id).to_string()));
            }
            let (_, width) = encoding.block(id);
            if width != graph.node(id).kind.encoded_width() {
                return Err(ModelError::Encoding(graph.name(id).to_string()));
            }
        }
        let mut node_sizes = Vec::new();
        for id in graph.ids().filter(|&id| !graph.is_root(id)) {
            let fan_in: usize = graph.parents(id).iter().map(|&p| encoding.block(p).1).sum();
            let mut sizes = vec![fan_in];
            sizes.extend_from_slice(&config.hidden);
            sizes.push(head_width(graph.node(id).kind));
            node_sizes.push((id, sizes));
        }
        let s_desc = graph.descendants(graph.sensitive());
        let context_nodes: Vec<NodeId> = if config.critic_context {
            graph
                .ids()
                .filter(|&id| id != graph.sensitive() && id != graph.outcome() && !s_desc[id.0])
                .collect()
        } else {
            Vec::new()
        };
        let ctx_width: usize = context_nodes.iter().map(|&id| encoding.block(id).1).sum();
        let mut critic_sizes = vec![1 + ctx_width];
        critic_sizes.extend_from_slice(&config.critic_hidden);
        critic_sizes.push(1);
        Ok(Layout {
            node_sizes,
            critic_sizes,
            context_nodes,
        })
    }

    pub fn graph(&self) -> &CausalGraph {
        &self.graph
    }

    pub fn encoding(&self) -> &Encoding {
        &self.encoding
    }

    pub fn pathset(&self) -> &PathSet {
        &self.pathset
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn params(&self) -> &ParamStore {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut ParamStore {
        &mut self.params
    }

    pub fn is_trained(&self) -> bool {
        self.trained
    }

    pub fn mark_trained(&mut self) {
        self.trained = true;
    }

    /// Group of a non-root node's sub-network.
    pub fn node_group(&self, id: NodeId) -> Option<GroupId> {
        self.node_groups[id.0]
    }

    pub fn node_group_ids(&self) -> Vec<GroupId> {
        self.node_groups.iter().flatten().copied().collect()
    }

    pub fn critic_group(&self) -> GroupId {
        self.critic
    }

    /// Non-root nodes, i.e. those owning a sub-network.
    pub fn modeled_nodes(&self) -> Vec<NodeId> {
        self.graph.ids().filter(|&id| self.node_groups[id.0].is_some()).collect()
    }

    pub fn bind_nodes(&self, tape: &mut Tape, trainable: bool) -> Binding {
        self.params.bind(tape, &self.node_group_ids(), trainable)
    }

    pub fn bind_critic(&self, tape: &mut Tape, trainable: bool) -> Binding {
        self.params.bind(tape, &[self.critic], trainable)
    }

    fn check_width(&self, x: &Matrix) -> Result<(), ModelError> {
        if x.cols() != self.encoding.dim() {
            return Err(ModelError::Width {
                expected: self.encoding.dim(),
                found: x.cols(),
            });
        }
        Ok(())
    }

    fn observed(&self, tape: &mut Tape, x: Var) -> Vec<Var> {
        self.graph
            .ids()
            .map(|id| {
                let (offset, width) = self.encoding.block(id);
                tape.slice_cols(x, offset, width)
            })
            .collect()
    }

    /// Logits and the propagated value (probabilities for categorical nodes)
    /// of `node` given per-parent input values.
    fn node_step(&self, tape: &mut Tape, b: &Binding, node: NodeId, inputs: &[Var]) -> Result<(Var, Var), ModelError> {
        let group = self.node_groups[node.0].expect("non-root node");
        let input = if inputs.len() == 1 {
            inputs[0]
        } else {
            tape.concat_cols(inputs)
        };
        let logits = mlp_forward(tape, b.vars(group), input)?;
        let head = self.heads[node.0];
        let out = apply_head(tape, head, logits);
        let value = match head {
            Head::Logistic => {
                let q = tape.one_minus(out);
                tape.concat_cols(&[q, out])
            }
            _ => out,
        };
        Ok((logits, value))
    }

    fn clamp_s(&self, tape: &mut Tape, rows: usize, s: f64) -> Var {
        let mut m = Matrix::zeros(rows, 2);
        for r in 0..rows {
            m.set(r, 0, 1.0 - s);
            m.set(r, 1, s);
        }
        tape.constant(m)
    }

    /// Per-node logits from the observational fit; `None` for roots.
    pub fn f1_logits(&self, tape: &mut Tape, b: &Binding, x: Var) -> Result<Vec<Option<Var>>, ModelError> {
        let obs = self.observed(tape, x);
        let mut values = obs.clone();
        let mut logits = vec![None; self.graph.len()];
        for &v in self.graph.topo_order() {
            if self.graph.is_root(v) {
                continue;
            }
            let source = if self.config.f1_cascade { &values } else { &obs };
            let inputs: Vec<Var> = self.graph.parents(v).iter().map(|p| source[p.0]).collect();
            let (z, value) = self.node_step(tape, b, v, &inputs)?;
            logits[v.0] = Some(z);
            values[v.0] = value;
        }
        Ok(logits)
    }

    /// Per-node predicted values (probability vectors for categorical nodes).
    pub fn f1_forward(&self, x: &Matrix) -> Result<Vec<Option<Matrix>>, ModelError> {
        self.check_width(x)?;
        let mut tape = Tape::new();
        let b = self.bind_nodes(&mut tape, false);
        let xv = tape.constant(x.clone());
        let logits = self.f1_logits(&mut tape, &b, xv)?;
        Ok(logits
            .into_iter()
            .enumerate()
            .map(|(i, z)| {
                z.map(|z| {
                    let out = apply_head(&mut tape, self.heads[i], z);
                    tape.value(out).clone()
                })
            })
            .collect())
    }

    /// Per-row loss of every modeled node, each n×1.
    fn node_losses(&self, tape: &mut Tape, b: &Binding, x: Var) -> Result<Vec<(NodeId, Var)>, ModelError> {
        let logits = self.f1_logits(tape, b, x)?;
        let obs = self.observed(tape, x);
        let mut out = Vec::new();
        for v in self.modeled_nodes() {
            let z = logits[v.0].expect("modeled node");
            let target = obs[v.0];
            let l = match self.heads[v.0] {
                Head::Linear => {
                    let diff = tape.sub(z, target);
                    tape.square(diff)
                }
                Head::Logistic => {
                    let y1 = tape.slice_cols(target, 1, 1);
                    let sp = tape.softplus(z);
                    let yz = tape.mul(y1, z);
                    tape.sub(sp, yz)
                }
                Head::Softmax => {
                    let lse = tape.logsumexp(z);
                    let xz = tape.mul(target, z);
                    let picked = tape.sum_cols(xz);
                    tape.sub(lse, picked)
                }
            };
            out.push((v, l));
        }
        Ok(out)
    }

    /// `(1/n) Σ_k w_k Σ_V l_V(k)` with squared error for continuous nodes and
    /// cross-entropy for categorical ones.
    pub fn f1_loss(&self, tape: &mut Tape, b: &Binding, x: Var, w: &[f64]) -> Result<Var, ModelError> {
        let n = tape.shape(x).0;
        if tape.shape(x).1 != self.encoding.dim() {
            return Err(ModelError::Width {
                expected: self.encoding.dim(),
                found: tape.shape(x).1,
            });
        }
        check_weights(w, n)?;
        let losses = self.node_losses(tape, b, x)?;
        let mut total = losses[0].1;
        for &(_, l) in &losses[1..] {
            total = tape.add(total, l);
        }
        let wv = tape.constant(Matrix::column(w));
        let weighted = tape.mul(total, wv);
        let s = tape.sum_all(weighted);
        Ok(tape.scale(s, 1.0 / n.max(1) as f64))
    }

    pub fn f1_loss_value(&self, x: &Matrix, w: &[f64]) -> Result<f64, ModelError> {
        let mut tape = Tape::new();
        let b = self.bind_nodes(&mut tape, false);
        let xv = tape.constant(x.clone());
        let l = self.f1_loss(&mut tape, &b, xv, w)?;
        Ok(tape.value(l).item())
    }

    /// Unweighted mean loss per modeled node.
    pub fn f1_node_losses(&self, x: &Matrix) -> Result<Vec<(NodeId, f64)>, ModelError> {
        self.check_width(x)?;
        let mut tape = Tape::new();
        let b = self.bind_nodes(&mut tape, false);
        let xv = tape.constant(x.clone());
        let losses = self.node_losses(&mut tape, &b, xv)?;
        Ok(losses
            .into_iter()
            .map(|(v, l)| {
                let m = tape.mean_all(l);
                (v, tape.value(m).item())
            })
            .collect())
    }

    /// Cascade under `do(S = s)`: roots and non-descendants of `S` keep their
    /// observed values, descendants are recomputed from propagated parents.
    pub fn total_pass(&self, tape: &mut Tape, b: &Binding, x: Var, s: f64) -> Result<Vec<Var>, ModelError> {
        let rows = tape.shape(x).0;
        let mut values = self.observed(tape, x);
        let y = self.graph.outcome();
        for &v in self.graph.topo_order() {
            if v == self.graph.sensitive() {
                values[v.0] = self.clamp_s(tape, rows, s);
            } else if !self.graph.is_root(v) && (self.s_descendant[v.0] || v == y) {
                let inputs: Vec<Var> = self.graph.parents(v).iter().map(|p| values[p.0]).collect();
                values[v.0] = self.node_step(tape, b, v, &inputs)?.1;
            }
        }
        Ok(values)
    }

    /// Interventional state of the dual-state cascade. Nodes with an incoming
    /// path-set edge take, per parent, the parent's interventional value when
    /// that edge is in the set and its reference value otherwise; all other
    /// nodes keep their reference value.
    pub fn path_specific_pass(&self, tape: &mut Tape, b: &Binding, x: Var, s: f64) -> Result<Vec<Var>, ModelError> {
        if self.pathset.on_pi_edges().is_empty() {
            return Err(ModelError::EmptyPathSet);
        }
        let rows = tape.shape(x).0;
        let reference = self.total_pass(tape, b, x, 0.0)?;
        let mut values = reference.clone();
        for &v in self.graph.topo_order() {
            if v == self.graph.sensitive() {
                values[v.0] = self.clamp_s(tape, rows, s);
                continue;
            }
            let parents = self.graph.parents(v);
            let carried: Vec<bool> = parents
                .iter()
                .map(|&p| self.pathset.carries(crate::graph::Edge::new(p, v)))
                .collect();
            if !carried.iter().any(|&c| c) {
                continue;
            }
            let inputs: Vec<Var> = parents
                .iter()
                .zip(&carried)
                .map(|(p, &c)| if c { values[p.0] } else { reference[p.0] })
                .collect();
            values[v.0] = self.node_step(tape, b, v, &inputs)?.1;
        }
        Ok(values)
    }

    fn outcome_prob(&self, tape: &mut Tape, values: &[Var]) -> Var {
        tape.slice_cols(values[self.graph.outcome().0], 1, 1)
    }

    /// `ŷ` under `do(S = s)` along all paths.
    pub fn f2_total(&self, x: &Matrix, s: f64) -> Result<Vec<f64>, ModelError> {
        self.eval_chunks(x, |m, tape, b, xv| {
            let values = m.total_pass(tape, b, xv, s)?;
            Ok(m.outcome_prob(tape, &values))
        })
    }

    /// `ŷ` with the intervention carried only along the path set.
    pub fn f2_path_specific(&self, x: &Matrix, s: f64) -> Result<Vec<f64>, ModelError> {
        if self.pathset.mode() != EffectMode::PathSpecific {
            return Err(ModelError::ModeMismatch {
                expected: EffectMode::PathSpecific,
                found: self.pathset.mode(),
            });
        }
        self.eval_chunks(x, |m, tape, b, xv| {
            let values = m.path_specific_pass(tape, b, xv, s)?;
            Ok(m.outcome_prob(tape, &values))
        })
    }

    /// `ŷ` for rows already restricted to the conditioning event.
    pub fn f2_counterfactual(&self, x_conditioned: &Matrix, s: f64) -> Result<Vec<f64>, ModelError> {
        if self.pathset.mode() != EffectMode::Counterfactual {
            return Err(ModelError::ModeMismatch {
                expected: EffectMode::Counterfactual,
                found: self.pathset.mode(),
            });
        }
        self.f2_total(x_conditioned, s)
    }

    /// The (ŷ⁺, ŷ⁻) contrast the critic compares in the configured mode. For
    /// path-specific effects `ŷ⁻` is the plain cascade at `S = 0`.
    pub fn f2_pair(&self, x: &Matrix) -> Result<(Vec<f64>, Vec<f64>), ModelError> {
        let plus = match self.pathset.mode() {
            EffectMode::PathSpecific => self.f2_path_specific(x, 1.0)?,
            _ => self.f2_total(x, 1.0)?,
        };
        Ok((plus, self.f2_total(x, 0.0)?))
    }

    fn eval_chunks(
        &self,
        x: &Matrix,
        f: impl Fn(&Self, &mut Tape, &Binding, Var) -> Result<Var, ModelError>,
    ) -> Result<Vec<f64>, ModelError> {
        self.check_width(x)?;
        let mut out = Vec::with_capacity(x.rows());
        let mut start = 0;
        while start < x.rows() {
            let end = (start + EVAL_CHUNK).min(x.rows());
            let rows: Vec<usize> = (start..end).collect();
            let mut tape = Tape::new();
            let b = self.bind_nodes(&mut tape, false);
            let xv = tape.constant(x.select_rows(&rows));
            let y = f(self, &mut tape, &b, xv)?;
            out.extend_from_slice(tape.value(y).data());
            start = end;
        }
        Ok(out)
    }

    /// Observed encoded blocks of the critic's context nodes (n×0 when off).
    pub fn critic_context(&self, x: &Matrix) -> Matrix {
        let blocks: Vec<Matrix> = self
            .context_nodes
            .iter()
            .map(|&id| {
                let (offset, width) = self.encoding.block(id);
                x.slice_cols(offset, width)
            })
            .collect();
        let refs: Vec<&Matrix> = blocks.iter().collect();
        if refs.is_empty() {
            Matrix::zeros(x.rows(), 0)
        } else {
            Matrix::concat_cols(&refs)
        }
    }

    pub fn uses_context(&self) -> bool {
        !self.context_nodes.is_empty()
    }

    /// `D` on an n×1 `ŷ` (and n×c context), output n×1.
    pub fn critic_forward(&self, tape: &mut Tape, b: &Binding, yhat: Var, ctx: Option<Var>) -> Result<Var, ModelError> {
        let input = match ctx {
            Some(c) if tape.shape(c).1 > 0 => tape.concat_cols(&[yhat, c]),
            _ => yhat,
        };
        Ok(mlp_forward(tape, b.vars(self.critic), input)?)
    }

    /// Critic values for each entry of `yhat`.
    pub fn discriminator_value(&self, yhat: &[f64], ctx: Option<&Matrix>) -> Result<Vec<f64>, ModelError> {
        let mut out = Vec::with_capacity(yhat.len());
        let mut start = 0;
        while start < yhat.len() {
            let end = (start + EVAL_CHUNK).min(yhat.len());
            let mut tape = Tape::new();
            let b = self.bind_critic(&mut tape, false);
            let y = tape.constant(Matrix::column(&yhat[start..end]));
            let c = ctx.map(|c| {
                let rows: Vec<usize> = (start..end).collect();
                tape.constant(c.select_rows(&rows))
            });
            let d = self.critic_forward(&mut tape, &b, y, c)?;
            out.extend_from_slice(tape.value(d).data());
            start = end;
        }
        Ok(out)
    }

    /// `d_k = D(ŷ⁺_k) − D(ŷ⁻_k)`.
    pub fn critic_gap(&self, yplus: &[f64], yminus: &[f64], ctx: Option<&Matrix>) -> Result<Vec<f64>, ModelError> {
        let a = self.discriminator_value(yplus, ctx)?;
        let b = self.discriminator_value(yminus, ctx)?;
        Ok(a.iter().zip(&b).map(|(p, m)| p - m).collect())
    }

    /// `mean_k (‖∇_x D(x̂_k)‖ − 1)²` at `x̂ = u·ŷ⁺ + (1−u)·ŷ⁻`, recorded so the
    /// result can be differentiated again with respect to the critic.
    pub fn gradient_penalty(&self, tape: &mut Tape, b: &Binding, yplus: &[f64], yminus: &[f64], u: &[f64], ctx: Option<Var>) -> Result<Var, ModelError> {
        if yplus.len() != yminus.len() || yplus.len() != u.len() || yplus.is_empty() {
            return Err(ModelError::CriticInput);
        }
        let mix: Vec<f64> = yplus
            .iter()
            .zip(yminus)
            .zip(u)
            .map(|((p, m), u)| u * p + (1.0 - u) * m)
            .collect();
        let xhat = tape.variable(Matrix::column(&mix));
        let out = self.critic_forward(tape, b, xhat, ctx)?;
        let total = tape.sum_all(out);
        let g = tape.grad(total, &[xhat])?[0];
        let sq = tape.square(g);
        let eps = tape.constant(Matrix::filled(yplus.len(), 1, NORM_EPS));
        let sq = tape.add(sq, eps);
        let norm = tape.sqrt(sq);
        let ones = tape.constant(Matrix::filled(yplus.len(), 1, 1.0));
        let dev = tape.sub(norm, ones);
        let dev2 = tape.square(dev);
        Ok(tape.mean_all(dev2))
    }

    /// Weighted gap, penalty, and objective for one critic batch.
    #[allow(clippy::too_many_arguments)]
    pub fn critic_terms(
        &self,
        tape: &mut Tape,
        b: &Binding,
        yplus: &[f64],
        yminus: &[f64],
        w: &[f64],
        u: &[f64],
        ctx: Option<&Matrix>,
    ) -> Result<CriticTerms, ModelError> {
        let n = yplus.len();
        if yminus.len() != n {
            return Err(ModelError::CriticInput);
        }
        check_weights(w, n)?;
        let c = ctx.map(|c| tape.constant(c.clone()));
        let yp = tape.constant(Matrix::column(yplus));
        let ym = tape.constant(Matrix::column(yminus));
        let dp = self.critic_forward(tape, b, yp, c)?;
        let dm = self.critic_forward(tape, b, ym, c)?;
        let diff = tape.sub(dp, dm);
        let wv = tape.constant(Matrix::column(w));
        let wd = tape.mul(diff, wv);
        let s = tape.sum_all(wd);
        let gap = tape.scale(s, 1.0 / n.max(1) as f64);
        let penalty = self.gradient_penalty(tape, b, yplus, yminus, u, c)?;
        let scaled = tape.scale(penalty, self.config.lambda_gp);
        let objective = tape.sub(gap, scaled);
        Ok(CriticTerms { gap, penalty, objective })
    }
}

struct Layout {
    node_sizes: Vec<(NodeId, Vec<usize>)>,
    critic_sizes: Vec<usize>,
    context_nodes: Vec<NodeId>,
}

fn check_weights(w: &[f64], n: usize) -> Result<(), ModelError> {
    if w.len() != n {
        return Err(ModelError::WeightLength { expected: n, found: w.len() });
    }
    if let Some((index, &value)) = w.iter().enumerate().find(|(_, v)| !(**v >= 0.0 && v.is_finite())) {
        return Err(ModelError::BadWeight { index, value });
    }
    Ok(())
}
