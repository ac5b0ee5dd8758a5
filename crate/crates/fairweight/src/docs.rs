//! TOML documents describing causal graphs and synthetic SCMs.
//!
//! ```toml
//! [roles]
//! sensitive = "S"
//! outcome = "Y"
//!
//! [[nodes]]
//! name = "S"
//! kind = "binary"        # or "continuous", or "categorical" with `cardinality`
//!
//! [[edges]]
//! parent = "S"
//! child = "Y"
//! ```
//!
//! An SCM document adds one `[functions.<node>]` table per node and optional
//! `[synth]` and `[oracle]` tables.

use std::collections::BTreeMap;
use std::path::Path;

use fairweight_core::graph::{CausalGraph, Condition, ConditionValue, NodeKind, NodeSpec, PathSet};
use fairweight_core::synth::{FunctionForm, NodeFunction, SyntheticScm, ORACLE_DRAWS};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{read_string, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Roles {
    pub sensitive: String,
    pub outcome: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeEntry {
    pub name: String,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cardinality: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub parent: String,
    pub child: String,
}

/// Unknown top-level tables are ignored, so an SCM document also serves as
/// a graph document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub roles: Roles,
    pub nodes: Vec<NodeEntry>,
    #[serde(default)]
    pub edges: Vec<EdgeEntry>,
}

impl GraphDoc {
    pub fn build(&self) -> Result<CausalGraph> {
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let kind = match (n.kind.as_str(), n.cardinality) {
                ("continuous", None) => NodeKind::Continuous,
                ("binary", None | Some(2)) => NodeKind::Categorical { cardinality: 2 },
                ("categorical", Some(c)) => NodeKind::Categorical { cardinality: c },
                ("categorical", None) => return Err(Error::Config(format!("node `{}`: categorical nodes need a cardinality", n.name))),
                ("continuous" | "binary", Some(_)) => {
                    return Err(Error::Config(format!("node `{}`: cardinality only applies to categorical nodes", n.name)))
                }
                (other, _) => return Err(Error::Config(format!("node `{}`: unknown kind `{other}`", n.name))),
            };
            nodes.push(NodeSpec { name: n.name.clone(), kind });
        }
        let edges: Vec<(&str, &str)> = self.edges.iter().map(|e| (e.parent.as_str(), e.child.as_str())).collect();
        Ok(CausalGraph::new(nodes, &edges, &self.roles.sensitive, &self.roles.outcome)?)
    }

    pub fn from_graph(g: &CausalGraph) -> Self {
        Self {
            roles: Roles {
                sensitive: g.name(g.sensitive()).to_string(),
                outcome: g.name(g.outcome()).to_string(),
            },
            nodes: g
                .nodes()
                .iter()
                .map(|n| match n.kind {
                    NodeKind::Continuous => NodeEntry { name: n.name.clone(), kind: "continuous".into(), cardinality: None },
                    NodeKind::Categorical { cardinality: 2 } => NodeEntry { name: n.name.clone(), kind: "binary".into(), cardinality: None },
                    NodeKind::Categorical { cardinality } => NodeEntry {
                        name: n.name.clone(),
                        kind: "categorical".into(),
                        cardinality: Some(cardinality),
                    },
                })
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeEntry {
                    parent: g.name(e.parent).to_string(),
                    child: g.name(e.child).to_string(),
                })
                .collect(),
        }
    }
}

fn parse_toml<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_string(path)?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub fn load_graph(path: &Path) -> Result<CausalGraph> {
    parse_toml::<GraphDoc>(path)?.build()
}

/// SHA-256 over a canonical description: roles, nodes in declaration order
/// with their kinds, and the sorted edge list.
pub fn graph_hash(g: &CausalGraph) -> String {
    let mut h = Sha256::new();
    h.update(format!("sensitive={}\noutcome={}\n", g.name(g.sensitive()), g.name(g.outcome())));
    for n in g.nodes() {
        let kind = match n.kind {
            NodeKind::Continuous => "continuous".to_string(),
            NodeKind::Categorical { cardinality } => format!("categorical/{cardinality}"),
        };
        h.update(format!("node {} {kind}\n", n.name));
    }
    for e in g.edges() {
        h.update(format!("edge {} {}\n", g.name(e.parent), g.name(e.child)));
    }
    hex(&h.finalize())
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Which S→Y paths a path-specific query carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PiSpec {
    Direct,
    #[default]
    Indirect,
    All,
}

impl PiSpec {
    pub fn pathset(self, g: &CausalGraph) -> Result<PathSet> {
        Ok(match self {
            PiSpec::Direct => PathSet::direct(g)?,
            PiSpec::Indirect => PathSet::indirect(g)?,
            PiSpec::All => PathSet::all_paths(g),
        })
    }
}

/// `{ node = value }` tables as used in config and SCM documents.
pub type ConditionMap = BTreeMap<String, ConditionValue>;

pub fn conditions(g: &CausalGraph, map: &ConditionMap) -> Result<Vec<Condition>> {
    map.iter()
        .map(|(name, value)| {
            let node = g
                .id(name)
                .ok_or_else(|| Error::Config(format!("condition names unknown node `{name}`")))?;
            Ok(Condition { node, value: value.clone() })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionEntry {
    #[serde(rename = "type")]
    pub form: String,
    #[serde(default)]
    pub intercept: f64,
    #[serde(default)]
    pub coefficients: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_sd: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSection {
    pub n: usize,
    pub seed: u64,
}

impl Default for SynthSection {
    fn default() -> Self {
        Self { n: 10_000, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSection {
    pub draws: usize,
    pub seed: u64,
    pub pi: PiSpec,
    pub condition: ConditionMap,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            draws: ORACLE_DRAWS,
            seed: 1,
            pi: PiSpec::Indirect,
            condition: ConditionMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScmDoc {
    #[serde(flatten)]
    pub graph: GraphDoc,
    pub functions: BTreeMap<String, FunctionEntry>,
    #[serde(default)]
    pub synth: SynthSection,
    #[serde(default)]
    pub oracle: OracleSection,
}

impl ScmDoc {
    pub fn load(path: &Path) -> Result<Self> {
        parse_toml(path)
    }

    /// Coefficients are applied in node declaration order.
    pub fn build(&self) -> Result<SyntheticScm> {
        let graph = self.graph.build()?;
        if let Some(extra) = self.functions.keys().find(|k| graph.id(k).is_none()) {
            return Err(Error::Config(format!("function given for unknown node `{extra}`")));
        }
        let mut functions = Vec::with_capacity(graph.len());
        for id in graph.ids() {
            let name = graph.name(id);
            let f = self
                .functions
                .get(name)
                .ok_or_else(|| Error::Config(format!("node `{name}` has no [functions.{name}] table")))?;
            let mut coefficients = Vec::with_capacity(f.coefficients.len());
            for p in graph.ids() {
                if let Some(&c) = f.coefficients.get(graph.name(p)) {
                    coefficients.push((p, c));
                }
            }
            if let Some(unknown) = f.coefficients.keys().find(|k| graph.id(k).is_none()) {
                return Err(Error::Config(format!("function of `{name}` names unknown node `{unknown}`")));
            }
            let form = match (f.form.as_str(), f.noise_sd) {
                ("linear", sd) => FunctionForm::Linear { noise_sd: sd.unwrap_or(1.0) },
                ("logistic", None) => FunctionForm::Logistic,
                ("logistic", Some(_)) => return Err(Error::Config(format!("function of `{name}`: logistic nodes take no noise_sd"))),
                (other, _) => return Err(Error::Config(format!("function of `{name}`: unknown type `{other}`"))),
            };
            functions.push(NodeFunction {
                form,
                intercept: f.intercept,
                coefficients,
            });
        }
        Ok(SyntheticScm::new(graph, functions)?)
    }
}
