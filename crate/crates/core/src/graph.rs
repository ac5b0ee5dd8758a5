//! Causal DAG over named variables with a designated sensitive node `S` and
//! outcome node `Y`, plus the path machinery used by the fairness modes.
//!
//! The graph is assumed causally sufficient; only structure is validated.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;
use serde::{Deserialize, Serialize};

/// Default cap on enumerated S→Y paths.
pub const DEFAULT_PATH_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NodeKind {
    Continuous,
    Categorical { cardinality: usize },
}

impl NodeKind {
    /// Columns occupied in the encoded matrix.
    pub fn encoded_width(self) -> usize {
        match self {
            NodeKind::Continuous => 1,
            NodeKind::Categorical { cardinality } => cardinality,
        }
    }

    pub fn is_binary(self) -> bool {
        matches!(self, NodeKind::Categorical { cardinality: 2 })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub name: String,
    pub kind: NodeKind,
}

impl NodeSpec {
    pub fn continuous(name: &str) -> Self {
        Self {
            name: name.to_string(),
            kind: NodeKind::Continuous,
        }
    }

    pub fn categorical(name: &str, cardinality: usize) -> Self {
        Self {
            name: name.to_string(),
            kind: NodeKind::Categorical { cardinality },
        }
    }

    pub fn binary(name: &str) -> Self {
        Self::categorical(name, 2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub parent: NodeId,
    pub child: NodeId,
}

impl Edge {
    pub fn new(parent: NodeId, child: NodeId) -> Self {
        Self { parent, child }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("node `{0}` declared twice")]
    DuplicateNode(String),
    #[error("edge {parent} -> {child} references unknown node `{missing}`")]
    UnknownNode {
        parent: String,
        child: String,
        missing: String,
    },
    #[error("categorical node `{0}` needs at least two levels")]
    Cardinality(String),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(String, String),
    #[error("cycle detected: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("missing `{0}` role designation")]
    MissingRole(&'static str),
    #[error("{role} node `{name}` is not declared")]
    UnknownRole { role: &'static str, name: String },
    #[error("sensitive and outcome roles both name `{0}`")]
    SameRole(String),
    #[error("{role} node `{name}` must be categorical with two levels")]
    NotBinary { role: &'static str, name: String },
    #[error("outcome node `{0}` has no parents, so no sub-network can model it")]
    OutcomeIsRoot(String),
    #[error("more than {limit} S->Y paths; refusing to enumerate")]
    PathLimit { limit: usize },
    #[error("no indirect S->Y path exists; the indirect effect is undefined for this graph")]
    NoIndirectPath,
    #[error("no direct edge from the sensitive node to the outcome")]
    NoDirectEdge,
    #[error("edge {0} -> {1} lies on no directed path from the sensitive node to the outcome")]
    EdgeNotOnPath(String, String),
    #[error("`{0}` is not a directed path from the sensitive node to the outcome")]
    NotAPath(String),
    #[error("the requested paths cannot be expressed as an edge set: their edges also form other paths")]
    NotEdgeRepresentable,
    #[error("counterfactual mode needs a non-empty condition")]
    EmptyCondition,
    #[error("condition on `{0}` is not allowed; conditions must name observed non-sensitive, non-outcome nodes")]
    ConditionNode(String),
    #[error("condition on `{name}` has the wrong value type for a {expected} node")]
    ConditionKind { name: String, expected: &'static str },
    #[error("unknown node `{0}`")]
    Unknown(String),
}

/// Validated causal DAG. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalGraph {
    nodes: Vec<NodeSpec>,
    edges: Vec<Edge>,
    sensitive: NodeId,
    outcome: NodeId,
    parents: Vec<Vec<NodeId>>,
    children: Vec<Vec<NodeId>>,
    topo: Vec<NodeId>,
    topo_pos: Vec<usize>,
}

impl CausalGraph {
    /// Build from node specs and named edges.
    pub fn new<S: AsRef<str>>(
        nodes: Vec<NodeSpec>,
        edges: &[(S, S)],
        sensitive: &str,
        outcome: &str,
    ) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        for n in &nodes {
            if !seen.insert(n.name.as_str()) {
                return Err(GraphError::DuplicateNode(n.name.clone()));
            }
        }
        let lookup = |name: &str| nodes.iter().position(|n| n.name == name).map(NodeId);
        let mut ids = Vec::with_capacity(edges.len());
        for (p, c) in edges {
            let (p, c) = (p.as_ref(), c.as_ref());
            let unknown = |missing: &str| GraphError::UnknownNode {
                parent: p.to_string(),
                child: c.to_string(),
                missing: missing.to_string(),
            };
            let pid = lookup(p).ok_or_else(|| unknown(p))?;
            let cid = lookup(c).ok_or_else(|| unknown(c))?;
            ids.push(Edge::new(pid, cid));
        }
        let s = lookup(sensitive).ok_or_else(|| GraphError::UnknownRole {
            role: "sensitive",
            name: sensitive.to_string(),
        })?;
        let y = lookup(outcome).ok_or_else(|| GraphError::UnknownRole {
            role: "outcome",
            name: outcome.to_string(),
        })?;
        Self::from_ids(nodes, ids, s, y)
    }

    pub fn from_ids(nodes: Vec<NodeSpec>, edges: Vec<Edge>, sensitive: NodeId, outcome: NodeId) -> Result<Self, GraphError> {
        let n = nodes.len();
        let name = |id: NodeId| nodes[id.0].name.clone();
        for spec in &nodes {
            if let NodeKind::Categorical { cardinality } = spec.kind {
                if cardinality < 2 {
                    return Err(GraphError::Cardinality(spec.name.clone()));
                }
            }
        }
        if sensitive == outcome {
            return Err(GraphError::SameRole(name(sensitive)));
        }
        for (role, id) in [("sensitive", sensitive), ("outcome", outcome)] {
            if !nodes[id.0].kind.is_binary() {
                return Err(GraphError::NotBinary { role, name: name(id) });
            }
        }
        let mut unique = BTreeSet::new();
        for e in &edges {
            if e.parent == e.child {
                return Err(GraphError::SelfLoop(name(e.parent)));
            }
            if !unique.insert(*e) {
                return Err(GraphError::DuplicateEdge(name(e.parent), name(e.child)));
            }
        }
        let edges: Vec<Edge> = unique.into_iter().collect();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for e in &edges {
            parents[e.child.0].push(e.parent);
            children[e.parent.0].push(e.child);
        }
        let topo = topological_order(n, &parents, &children).map_err(|cycle| {
            GraphError::Cycle(cycle.into_iter().map(&name).collect())
        })?;
        let mut topo_pos = vec![0; n];
        for (i, id) in topo.iter().enumerate() {
            topo_pos[id.0] = i;
        }
        if parents[outcome.0].is_empty() {
            return Err(GraphError::OutcomeIsRoot(name(outcome)));
        }
        for list in children.iter_mut() {
            list.sort_by_key(|c| topo_pos[c.0]);
        }
        Ok(Self {
            nodes,
            edges,
            sensitive,
            outcome,
            parents,
            children,
            topo,
            topo_pos,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[NodeSpec] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &NodeSpec {
        &self.nodes[id.0]
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.nodes[id.0].name
    }

    pub fn id(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.name == name).map(NodeId)
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    /// Edges sorted by (parent, child).
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_edge(&self, parent: NodeId, child: NodeId) -> bool {
        self.edges.binary_search(&Edge::new(parent, child)).is_ok()
    }

    /// Parents in ascending id order.
    pub fn parents(&self, id: NodeId) -> &[NodeId] {
        &self.parents[id.0]
    }

    /// Children in topological order.
    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.children[id.0]
    }

    pub fn sensitive(&self) -> NodeId {
        self.sensitive
    }

    pub fn outcome(&self) -> NodeId {
        self.outcome
    }

    pub fn topo_order(&self) -> &[NodeId] {
        &self.topo
    }

    pub fn topo_index(&self, id: NodeId) -> usize {
        self.topo_pos[id.0]
    }

    pub fn is_root(&self, id: NodeId) -> bool {
        self.parents[id.0].is_empty()
    }

    pub fn roots(&self) -> Vec<NodeId> {
        self.ids().filter(|&id| self.is_root(id)).collect()
    }

    /// Mask of nodes reachable from `id` by a non-empty directed path.
    pub fn descendants(&self, id: NodeId) -> Vec<bool> {
        let mut mask = vec![false; self.len()];
        let mut stack: Vec<NodeId> = self.children(id).to_vec();
        while let Some(v) = stack.pop() {
            if !mask[v.0] {
                mask[v.0] = true;
                stack.extend_from_slice(self.children(v));
            }
        }
        mask
    }

    /// Mask of nodes with a non-empty directed path to `id`.
    pub fn ancestors(&self, id: NodeId) -> Vec<bool> {
        let mut mask = vec![false; self.len()];
        let mut stack: Vec<NodeId> = self.parents(id).to_vec();
        while let Some(v) = stack.pop() {
            if !mask[v.0] {
                mask[v.0] = true;
                stack.extend_from_slice(self.parents(v));
            }
        }
        mask
    }

    /// Whether `S` reaches `Y`; without such a path every effect is zero.
    pub fn has_causal_path(&self) -> bool {
        self.descendants(self.sensitive)[self.outcome.0]
    }

    /// Edges lying on at least one directed S→Y path.
    pub fn causal_path_edges(&self) -> BTreeSet<Edge> {
        let from_s = self.descendants(self.sensitive);
        let to_y = self.ancestors(self.outcome);
        let s = self.sensitive;
        let y = self.outcome;
        self.edges
            .iter()
            .filter(|e| (e.parent == s || from_s[e.parent.0]) && (e.child == y || to_y[e.child.0]))
            .copied()
            .collect()
    }

    /// The interventional graph: every edge into `S` removed.
    pub fn intervene(&self) -> CausalGraph {
        let edges = self
            .edges
            .iter()
            .filter(|e| e.child != self.sensitive)
            .copied()
            .collect();
        CausalGraph::from_ids(self.nodes.clone(), edges, self.sensitive, self.outcome)
            .expect("removing edges keeps a valid graph")
    }

    pub fn enumerate_paths(&self) -> Result<Vec<Path>, GraphError> {
        self.enumerate_paths_capped(DEFAULT_PATH_LIMIT)
    }

    /// Every directed S→Y path, shortest first, ties broken
    /// lexicographically by the topological indices of their nodes.
    pub fn enumerate_paths_capped(&self, limit: usize) -> Result<Vec<Path>, GraphError> {
        let reach_y = self.ancestors(self.outcome);
        let mut paths = Vec::new();
        let mut stack = vec![self.sensitive];
        self.dfs_paths(&reach_y, &mut stack, &mut paths, limit)?;
        paths.sort_by(|a: &Path, b: &Path| {
            a.edges.len().cmp(&b.edges.len()).then_with(|| {
                let ka: Vec<usize> = a.nodes().iter().map(|&v| self.topo_index(v)).collect();
                let kb: Vec<usize> = b.nodes().iter().map(|&v| self.topo_index(v)).collect();
                ka.cmp(&kb)
            })
        });
        Ok(paths)
    }

    fn dfs_paths(&self, reach_y: &[bool], stack: &mut Vec<NodeId>, out: &mut Vec<Path>, limit: usize) -> Result<(), GraphError> {
        let v = *stack.last().expect("non-empty stack");
        for &c in self.children(v) {
            if c == self.outcome {
                if out.len() == limit {
                    return Err(GraphError::PathLimit { limit });
                }
                let mut nodes = stack.clone();
                nodes.push(c);
                out.push(Path::from_nodes(&nodes));
            } else if reach_y[c.0] {
                stack.push(c);
                self.dfs_paths(reach_y, stack, out, limit)?;
                stack.pop();
            }
        }
        Ok(())
    }

    /// Render an edge as `parent -> child`.
    pub fn edge_label(&self, e: Edge) -> String {
        let mut s = String::new();
        s.push_str(self.name(e.parent));
        s.push_str(" -> ");
        s.push_str(self.name(e.child));
        s
    }
}

/// Kahn's algorithm, smallest id first. On failure returns one cycle.
fn topological_order(n: usize, parents: &[Vec<NodeId>], children: &[Vec<NodeId>]) -> Result<Vec<NodeId>, Vec<NodeId>> {
    let mut indeg: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut ready: BinaryHeap<Reverse<usize>> = (0..n).filter(|&i| indeg[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(v)) = ready.pop() {
        order.push(NodeId(v));
        for c in &children[v] {
            indeg[c.0] -= 1;
            if indeg[c.0] == 0 {
                ready.push(Reverse(c.0));
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // Every leftover node has a leftover parent; walk parents until a repeat.
    let start = (0..n).find(|&i| indeg[i] > 0).expect("leftover node");
    let mut walk = vec![start];
    let mut pos = vec![usize::MAX; n];
    pos[start] = 0;
    loop {
        let v = *walk.last().expect("non-empty walk");
        let p = parents[v].iter().find(|p| indeg[p.0] > 0).expect("leftover parent").0;
        if pos[p] != usize::MAX {
            let mut cycle: Vec<NodeId> = walk[pos[p]..].iter().rev().map(|&i| NodeId(i)).collect();
            cycle.push(cycle[0]);
            return Err(cycle);
        }
        pos[p] = walk.len();
        walk.push(p);
    }
}

/// A directed path as its edge sequence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    pub edges: Vec<Edge>,
}

impl Path {
    pub fn from_nodes(nodes: &[NodeId]) -> Self {
        Self {
            edges: nodes.windows(2).map(|w| Edge::new(w[0], w[1])).collect(),
        }
    }

    pub fn nodes(&self) -> Vec<NodeId> {
        let mut v: Vec<NodeId> = self.edges.iter().map(|e| e.parent).collect();
        if let Some(last) = self.edges.last() {
            v.push(last.child);
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectMode {
    Total,
    PathSpecific,
    Counterfactual,
}

impl fmt::Display for EffectMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EffectMode::Total => "total",
            EffectMode::PathSpecific => "path_specific",
            EffectMode::Counterfactual => "counterfactual",
        })
    }
}

/// Value a conditioned node must take.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConditionValue {
    Number(f64),
    Level(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub node: NodeId,
    pub value: ConditionValue,
}

/// Which edges carry the intervention, and for counterfactual mode the
/// conditioning event `O = o`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSet {
    mode: EffectMode,
    on_pi: BTreeSet<Edge>,
    condition: Vec<Condition>,
}

impl PathSet {
    /// All edges on any S→Y path.
    pub fn total(g: &CausalGraph) -> Self {
        Self {
            mode: EffectMode::Total,
            on_pi: g.causal_path_edges(),
            condition: Vec::new(),
        }
    }

    /// Every S→Y path except the direct edge.
    pub fn indirect(g: &CausalGraph) -> Result<Self, GraphError> {
        let direct = Edge::new(g.sensitive(), g.outcome());
        let mut on_pi = g.causal_path_edges();
        on_pi.remove(&direct);
        if on_pi.is_empty() {
            return Err(GraphError::NoIndirectPath);
        }
        Ok(Self {
            mode: EffectMode::PathSpecific,
            on_pi,
            condition: Vec::new(),
        })
    }

    /// Only the direct edge S→Y.
    pub fn direct(g: &CausalGraph) -> Result<Self, GraphError> {
        let direct = Edge::new(g.sensitive(), g.outcome());
        if !g.has_edge(direct.parent, direct.child) {
            return Err(GraphError::NoDirectEdge);
        }
        Ok(Self {
            mode: EffectMode::PathSpecific,
            on_pi: [direct].into_iter().collect(),
            condition: Vec::new(),
        })
    }

    /// Path-specific mode over all S→Y edges; behaves like the total mode.
    pub fn all_paths(g: &CausalGraph) -> Self {
        Self {
            mode: EffectMode::PathSpecific,
            ..Self::total(g)
        }
    }

    pub fn from_edges(g: &CausalGraph, edges: &[Edge]) -> Result<Self, GraphError> {
        let on_path = g.causal_path_edges();
        for e in edges {
            if !on_path.contains(e) {
                return Err(GraphError::EdgeNotOnPath(
                    g.name(e.parent).to_string(),
                    g.name(e.child).to_string(),
                ));
            }
        }
        if edges.is_empty() {
            return Err(GraphError::NoIndirectPath);
        }
        Ok(Self {
            mode: EffectMode::PathSpecific,
            on_pi: edges.iter().copied().collect(),
            condition: Vec::new(),
        })
    }

    /// Path set given as explicit node sequences. Rejected when the union of
    /// their edges would also carry some path that was not requested.
    pub fn from_paths(g: &CausalGraph, paths: &[Vec<NodeId>]) -> Result<Self, GraphError> {
        let all = g.enumerate_paths()?;
        let mut requested = BTreeSet::new();
        for nodes in paths {
            let p = Path::from_nodes(nodes);
            if !all.contains(&p) {
                let names: Vec<&str> = nodes.iter().map(|&v| g.name(v)).collect();
                return Err(GraphError::NotAPath(names.join(" -> ")));
            }
            requested.insert(p);
        }
        let edges: BTreeSet<Edge> = requested.iter().flat_map(|p| p.edges.iter().copied()).collect();
        let implied: BTreeSet<Path> = all
            .into_iter()
            .filter(|p| p.edges.iter().all(|e| edges.contains(e)))
            .collect();
        if implied != requested {
            return Err(GraphError::NotEdgeRepresentable);
        }
        let edges: Vec<Edge> = edges.into_iter().collect();
        Self::from_edges(g, &edges)
    }

    /// Total-effect propagation restricted to rows matching `condition`.
    pub fn counterfactual(g: &CausalGraph, condition: Vec<Condition>) -> Result<Self, GraphError> {
        if condition.is_empty() {
            return Err(GraphError::EmptyCondition);
        }
        for c in &condition {
            if c.node.0 >= g.len() {
                return Err(GraphError::Unknown(alloc::format!("#{}", c.node.0)));
            }
            let name = g.name(c.node).to_string();
            if c.node == g.sensitive() || c.node == g.outcome() {
                return Err(GraphError::ConditionNode(name));
            }
            match (g.node(c.node).kind, &c.value) {
                (NodeKind::Continuous, ConditionValue::Number(_)) => {}
                (NodeKind::Categorical { .. }, ConditionValue::Level(_)) => {}
                (NodeKind::Continuous, _) => {
                    return Err(GraphError::ConditionKind { name, expected: "continuous" })
                }
                (NodeKind::Categorical { .. }, _) => {
                    return Err(GraphError::ConditionKind { name, expected: "categorical" })
                }
            }
        }
        Ok(Self {
            mode: EffectMode::Counterfactual,
            on_pi: g.causal_path_edges(),
            condition,
        })
    }

    pub fn mode(&self) -> EffectMode {
        self.mode
    }

    pub fn on_pi_edges(&self) -> &BTreeSet<Edge> {
        &self.on_pi
    }

    pub fn carries(&self, e: Edge) -> bool {
        self.on_pi.contains(&e)
    }

    pub fn condition(&self) -> &[Condition] {
        &self.condition
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// A→S, A→Y, S→B, S→Y, B→Y.
    pub(crate) fn fig2() -> CausalGraph {
        CausalGraph::new(
            vec![
                NodeSpec::continuous("A"),
                NodeSpec::binary("S"),
                NodeSpec::continuous("B"),
                NodeSpec::binary("Y"),
            ],
            &[("A", "S"), ("A", "Y"), ("S", "B"), ("S", "Y"), ("B", "Y")],
            "S",
            "Y",
        )
        .unwrap()
    }

    fn diamond() -> CausalGraph {
        CausalGraph::new(
            vec![
                NodeSpec::continuous("A"),
                NodeSpec::binary("S"),
                NodeSpec::continuous("B1"),
                NodeSpec::continuous("B2"),
                NodeSpec::binary("Y"),
            ],
            &[("A", "S"), ("S", "B1"), ("B1", "Y"), ("S", "B2"), ("B2", "Y"), ("S", "Y")],
            "S",
            "Y",
        )
        .unwrap()
    }

    fn e(g: &CausalGraph, p: &str, c: &str) -> Edge {
        Edge::new(g.id(p).unwrap(), g.id(c).unwrap())
    }

    /// Independent oracle: exhaustive DFS over node sequences.
    fn brute_force_paths(g: &CausalGraph) -> BTreeSet<Vec<NodeId>> {
        fn go(g: &CausalGraph, v: NodeId, cur: &mut Vec<NodeId>, out: &mut BTreeSet<Vec<NodeId>>) {
            if v == g.outcome() {
                out.insert(cur.clone());
                return;
            }
            for e in g.edges().iter().filter(|e| e.parent == v) {
                cur.push(e.child);
                go(g, e.child, cur, out);
                cur.pop();
            }
        }
        let mut out = BTreeSet::new();
        go(g, g.sensitive(), &mut vec![g.sensitive()], &mut out);
        out
    }

    #[test]
    fn fig2_roots_and_topology() {
        let g = fig2();
        assert_eq!(g.roots(), vec![g.id("A").unwrap()]);
        for edge in g.edges() {
            assert!(g.topo_index(edge.parent) < g.topo_index(edge.child));
        }
    }

    #[test]
    fn minimal_graph() {
        let g = CausalGraph::new(vec![NodeSpec::binary("S"), NodeSpec::binary("Y")], &[("S", "Y")], "S", "Y").unwrap();
        assert_eq!(g.roots(), vec![g.id("S").unwrap()]);
        assert_eq!(g.enumerate_paths().unwrap().len(), 1);
    }

    #[test]
    fn two_cycle_is_rejected() {
        let err = CausalGraph::new(
            vec![NodeSpec::continuous("A"), NodeSpec::binary("S"), NodeSpec::binary("Y")],
            &[("A", "S"), ("S", "A"), ("S", "Y")],
            "S",
            "Y",
        )
        .unwrap_err();
        match err {
            GraphError::Cycle(nodes) => {
                assert!(nodes.contains(&"A".to_string()) && nodes.contains(&"S".to_string()));
                assert_eq!(nodes.first(), nodes.last());
            }
            other => panic!("expected cycle, got {other:?}"),
        }
    }

    #[test]
    fn structural_errors() {
        let nodes = || vec![NodeSpec::binary("S"), NodeSpec::binary("Y")];
        assert!(matches!(
            CausalGraph::new(nodes(), &[("S", "Z")], "S", "Y"),
            Err(GraphError::UnknownNode { missing, .. }) if missing == "Z"
        ));
        assert!(matches!(
            CausalGraph::new(nodes(), &[("S", "S"), ("S", "Y")], "S", "Y"),
            Err(GraphError::SelfLoop(_))
        ));
        assert!(matches!(
            CausalGraph::new(nodes(), &[("S", "Y"), ("S", "Y")], "S", "Y"),
            Err(GraphError::DuplicateEdge(..))
        ));
        assert!(matches!(
            CausalGraph::new(nodes(), &[("S", "Y")], "S", "S"),
            Err(GraphError::SameRole(_))
        ));
        assert!(matches!(
            CausalGraph::new(nodes(), &[("S", "Y")], "Q", "Y"),
            Err(GraphError::UnknownRole { role: "sensitive", .. })
        ));
        assert!(matches!(
            CausalGraph::new(nodes(), &[("Y", "S")], "S", "Y"),
            Err(GraphError::OutcomeIsRoot(_))
        ));
        assert!(matches!(
            CausalGraph::new(vec![NodeSpec::continuous("S"), NodeSpec::binary("Y")], &[("S", "Y")], "S", "Y"),
            Err(GraphError::NotBinary { role: "sensitive", .. })
        ));
    }

    #[test]
    fn surgery_removes_incoming_edges_of_s() {
        let g = fig2();
        let gs = g.intervene();
        let expected: BTreeSet<Edge> = [e(&g, "A", "Y"), e(&g, "S", "B"), e(&g, "S", "Y"), e(&g, "B", "Y")]
            .into_iter()
            .collect();
        assert_eq!(gs.edges().iter().copied().collect::<BTreeSet<_>>(), expected);
        assert_eq!(gs.intervene(), gs);
    }

    #[test]
    fn surgery_on_root_s_is_identity() {
        let g = diamond().intervene();
        assert_eq!(g.intervene(), g);
    }

    #[test]
    fn surgery_drops_two_parents() {
        let g = CausalGraph::new(
            vec![
                NodeSpec::continuous("A1"),
                NodeSpec::continuous("A2"),
                NodeSpec::binary("S"),
                NodeSpec::binary("Y"),
            ],
            &[("A1", "S"), ("A2", "S"), ("S", "Y"), ("A1", "Y")],
            "S",
            "Y",
        )
        .unwrap();
        assert_eq!(g.intervene().edges().len(), g.edges().len() - 2);
    }

    #[test]
    fn fig2_paths_in_order() {
        let g = fig2();
        let paths = g.enumerate_paths().unwrap();
        assert_eq!(
            paths,
            vec![
                Path { edges: vec![e(&g, "S", "Y")] },
                Path { edges: vec![e(&g, "S", "B"), e(&g, "B", "Y")] },
            ]
        );
    }

    #[test]
    fn diamond_paths_match_brute_force() {
        let g = diamond();
        let paths = g.enumerate_paths().unwrap();
        assert_eq!(paths.len(), 3);
        let got: BTreeSet<Vec<NodeId>> = paths.iter().map(Path::nodes).collect();
        assert_eq!(got, brute_force_paths(&g));
    }

    #[test]
    fn path_cap() {
        // layered graph with 2^6 paths
        let mut nodes = vec![NodeSpec::binary("S")];
        let mut edges: Vec<(String, String)> = Vec::new();
        let mut prev = vec!["S".to_string()];
        for layer in 0..6 {
            let cur: Vec<String> = (0..2).map(|k| alloc::format!("L{layer}_{k}")).collect();
            for c in &cur {
                nodes.push(NodeSpec::continuous(c));
                for p in &prev {
                    edges.push((p.clone(), c.clone()));
                }
            }
            prev = cur;
        }
        nodes.push(NodeSpec::binary("Y"));
        for p in &prev {
            edges.push((p.clone(), "Y".to_string()));
        }
        let g = CausalGraph::new(nodes, &edges, "S", "Y").unwrap();
        assert_eq!(g.enumerate_paths().unwrap().len(), 64);
        assert_eq!(g.enumerate_paths_capped(10), Err(GraphError::PathLimit { limit: 10 }));
    }

    #[test]
    fn indirect_sets() {
        let g = fig2();
        let pi = PathSet::indirect(&g).unwrap();
        let expected: BTreeSet<Edge> = [e(&g, "S", "B"), e(&g, "B", "Y")].into_iter().collect();
        assert_eq!(pi.on_pi_edges(), &expected);
        assert_eq!(pi.mode(), EffectMode::PathSpecific);

        let d = diamond();
        let pi = PathSet::indirect(&d).unwrap();
        let expected: BTreeSet<Edge> =
            [e(&d, "S", "B1"), e(&d, "B1", "Y"), e(&d, "S", "B2"), e(&d, "B2", "Y")].into_iter().collect();
        assert_eq!(pi.on_pi_edges(), &expected);

        let minimal = CausalGraph::new(vec![NodeSpec::binary("S"), NodeSpec::binary("Y")], &[("S", "Y")], "S", "Y").unwrap();
        assert_eq!(PathSet::indirect(&minimal), Err(GraphError::NoIndirectPath));
    }

    #[test]
    fn total_set_is_all_path_edges() {
        let g = fig2();
        let total = PathSet::total(&g);
        let from_paths: BTreeSet<Edge> = g
            .enumerate_paths()
            .unwrap()
            .into_iter()
            .flat_map(|p| p.edges)
            .collect();
        assert_eq!(total.on_pi_edges(), &from_paths);
        assert!(!total.carries(e(&g, "A", "Y")));
    }

    #[test]
    fn removing_pi_edges_disconnects_exactly_pi_paths() {
        for g in [fig2(), diamond()] {
            for pi in [PathSet::indirect(&g).unwrap(), PathSet::direct(&g).unwrap(), PathSet::total(&g)] {
                let before = g.enumerate_paths().unwrap();
                let kept: Vec<Edge> = g.edges().iter().filter(|e| !pi.carries(**e)).copied().collect();
                let pruned = CausalGraph::from_ids(g.nodes().to_vec(), kept, g.sensitive(), g.outcome());
                let after: BTreeSet<Path> = match pruned {
                    Ok(p) => p.enumerate_paths().unwrap().into_iter().collect(),
                    Err(GraphError::OutcomeIsRoot(_)) => BTreeSet::new(),
                    Err(other) => panic!("{other:?}"),
                };
                for p in before {
                    let on_pi = p.edges.iter().all(|e| pi.carries(*e));
                    let off_pi = p.edges.iter().all(|e| !pi.carries(*e));
                    assert!(on_pi || off_pi, "path mixes pi and non-pi edges");
                    assert_eq!(after.contains(&p), off_pi);
                }
            }
        }
    }

    #[test]
    fn explicit_paths() {
        let d = diamond();
        let id = |n| d.id(n).unwrap();
        let one = PathSet::from_paths(&d, &[vec![id("S"), id("B1"), id("Y")]]).unwrap();
        assert_eq!(one.on_pi_edges().len(), 2);
        assert!(matches!(
            PathSet::from_paths(&d, &[vec![id("S"), id("Y"), id("B1")]]),
            Err(GraphError::NotAPath(_))
        ));
        // two requested paths cross at B1, so their edges also carry S→B1→B3→Y and S→B2→B1→Y
        let g = CausalGraph::new(
            vec![
                NodeSpec::binary("S"),
                NodeSpec::continuous("B1"),
                NodeSpec::continuous("B2"),
                NodeSpec::continuous("B3"),
                NodeSpec::binary("Y"),
            ],
            &[("S", "B1"), ("S", "B2"), ("B2", "B1"), ("B1", "Y"), ("B1", "B3"), ("B3", "Y")],
            "S",
            "Y",
        )
        .unwrap();
        let id = |n| g.id(n).unwrap();
        assert_eq!(
            PathSet::from_paths(
                &g,
                &[vec![id("S"), id("B1"), id("Y")], vec![id("S"), id("B2"), id("B1"), id("B3"), id("Y")]]
            ),
            Err(GraphError::NotEdgeRepresentable)
        );
    }

    #[test]
    fn edge_not_on_path() {
        let g = fig2();
        assert!(matches!(
            PathSet::from_edges(&g, &[e(&g, "A", "Y")]),
            Err(GraphError::EdgeNotOnPath(..))
        ));
    }

    #[test]
    fn counterfactual_conditions() {
        let g = fig2();
        assert_eq!(PathSet::counterfactual(&g, vec![]), Err(GraphError::EmptyCondition));
        let on_s = Condition {
            node: g.sensitive(),
            value: ConditionValue::Level("1".into()),
        };
        assert!(matches!(PathSet::counterfactual(&g, vec![on_s]), Err(GraphError::ConditionNode(_))));
        let wrong = Condition {
            node: g.id("A").unwrap(),
            value: ConditionValue::Level("x".into()),
        };
        assert!(matches!(PathSet::counterfactual(&g, vec![wrong]), Err(GraphError::ConditionKind { .. })));
        let ok = Condition {
            node: g.id("A").unwrap(),
            value: ConditionValue::Number(0.5),
        };
        let cf = PathSet::counterfactual(&g, vec![ok]).unwrap();
        assert_eq!(cf.mode(), EffectMode::Counterfactual);
        assert_eq!(cf.on_pi_edges(), PathSet::total(&g).on_pi_edges());
    }

    #[test]
    fn no_path_graph_is_allowed() {
        let g = CausalGraph::new(
            vec![NodeSpec::continuous("A"), NodeSpec::binary("S"), NodeSpec::binary("Y")],
            &[("A", "S"), ("A", "Y")],
            "S",
            "Y",
        )
        .unwrap();
        assert!(!g.has_causal_path());
        assert!(g.enumerate_paths().unwrap().is_empty());
        assert!(PathSet::total(&g).on_pi_edges().is_empty());
    }
}
