//! Run configuration documents, command-line overrides and manifests.
//!
//! Relative paths in a config document are resolved against the directory
//! holding the document.

use std::path::{Path, PathBuf};

use fairweight_core::data::ColumnarDataset;
use fairweight_core::effects::WassersteinConfig;
use fairweight_core::graph::{CausalGraph, PathSet};
use fairweight_core::model::ModelConfig;
use fairweight_core::trainer::{ProtocolConfig, TrainConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::docs::{conditions, graph_hash, hex, load_graph, ConditionMap, PiSpec};
use crate::error::{read, read_string, Error, Result};
use crate::table::{load_csv, schema_from_graph, Schema};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModeSpec {
    #[default]
    Total,
    PathSpecific {
        #[serde(default)]
        pi: PiSpec,
        /// Explicit node-name paths; take precedence over `pi`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        paths: Option<Vec<Vec<String>>>,
    },
    Counterfactual {
        condition: ConditionMap,
    },
}

impl ModeSpec {
    pub fn pathset(&self, g: &CausalGraph) -> Result<PathSet> {
        match self {
            ModeSpec::Total => Ok(PathSet::total(g)),
            ModeSpec::PathSpecific { paths: Some(paths), .. } => {
                let mut ids = Vec::with_capacity(paths.len());
                for p in paths {
                    let path: Option<Vec<_>> = p.iter().map(|n| g.id(n)).collect();
                    ids.push(path.ok_or_else(|| Error::Config(format!("path {p:?} names an unknown node")))?);
                }
                Ok(PathSet::from_paths(g, &ids)?)
            }
            ModeSpec::PathSpecific { pi, .. } => pi.pathset(g),
            ModeSpec::Counterfactual { condition } => Ok(PathSet::counterfactual(g, conditions(g, condition)?)?),
        }
    }
}

fn default_tau() -> f64 {
    0.05
}
fn default_repeats() -> usize {
    5
}
fn default_fraction() -> f64 {
    0.8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub data: PathBuf,
    pub graph: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Defaults to one column per graph node with the node's kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<Schema>,
    #[serde(default)]
    pub mode: ModeSpec,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub wasserstein: WassersteinConfig,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    /// Seeds the splits, the network initialization, batching and the
    /// Wasserstein critic; overrides `train.seed` and `wasserstein.seed`.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_fraction")]
    pub train_fraction: f64,
}

fn resolve(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read_string(path)?;
        let mut cfg: RunConfig = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        resolve(base, &mut cfg.data);
        resolve(base, &mut cfg.graph);
        if let Some(out) = cfg.out.as_mut() {
            resolve(base, out);
        }
        Ok(cfg)
    }

    pub fn protocol(&self) -> ProtocolConfig {
        ProtocolConfig {
            repeats: self.repeats,
            train_fraction: self.train_fraction,
            seed: self.seed,
            tau: self.tau,
            wasserstein: WassersteinConfig {
                seed: self.seed,
                ..self.wasserstein.clone()
            },
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            seed: self.seed,
            ..self.train.clone()
        }
    }

    pub fn out_dir(&self) -> Result<&Path> {
        self.out.as_deref().ok_or_else(|| Error::Config("no output directory (set `out` or pass --out)".into()))
    }

    /// SHA-256 of the config's JSON form.
    pub fn hash(&self) -> String {
        hex(&Sha256::digest(serde_json::to_vec(self).expect("config serializes")))
    }

    /// Check the referenced files and value ranges, then load the graph and
    /// the dataset and build the path set.
    pub fn prepare(&self) -> Result<Prepared> {
        for (what, p) in [("data", &self.data), ("graph", &self.graph)] {
            if !p.is_file() {
                return Err(Error::Config(format!("{what} file not found: {}", p.display())));
            }
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::Config(format!("tau must be positive, got {}", self.tau)));
        }
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config(format!("train_fraction must lie in (0, 1), got {}", self.train_fraction)));
        }
        let graph = load_graph(&self.graph)?;
        let pathset = self.mode.pathset(&graph)?;
        let schema = self.schema.clone().unwrap_or_else(|| schema_from_graph(&graph));
        let dataset = load_csv(&self.data, &schema)?;
        Ok(Prepared { graph, pathset, dataset })
    }
}

pub struct Prepared {
    pub graph: CausalGraph,
    pub pathset: PathSet,
    pub dataset: ColumnarDataset,
}

/// Command-line values that replace config document fields.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub mode: Option<String>,
    pub t_balance: Option<f64>,
    pub tau: Option<f64>,
    pub out: Option<PathBuf>,
    pub repeats: Option<usize>,
}

impl Overrides {
    /// `mode` accepts `total`, `path_specific` (keeps the document's path
    /// selection, default indirect), `direct`, `indirect`, `all`, and
    /// `counterfactual` (needs a condition in the document).
    pub fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(t) = self.t_balance {
            cfg.train.t_balance = t;
        }
        if let Some(tau) = self.tau {
            cfg.tau = tau;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        if let Some(r) = self.repeats {
            cfg.repeats = r;
        }
        if let Some(mode) = &self.mode {
            let pi = |pi| ModeSpec::PathSpecific { pi, paths: None };
            cfg.mode = match mode.as_str() {
                "total" => ModeSpec::Total,
                "path_specific" => match &cfg.mode {
                    m @ ModeSpec::PathSpecific { .. } => m.clone(),
                    _ => pi(PiSpec::Indirect),
                },
                "direct" => pi(PiSpec::Direct),
                "indirect" => pi(PiSpec::Indirect),
                "all" => pi(PiSpec::All),
                "counterfactual" => match &cfg.mode {
                    m @ ModeSpec::Counterfactual { .. } => m.clone(),
                    _ => return Err(Error::Config("--mode counterfactual needs a `condition` in the config document".into())),
                },
                other => return Err(Error::Config(format!("unknown mode `{other}`"))),
            };
        }
        Ok(())
    }
}

/// Record of a run, sufficient to repeat it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub config_hash: String,
    pub graph_hash: String,
    pub data_hash: String,
    pub seed: u64,
}

pub fn file_hash(path: &Path) -> Result<String> {
    Ok(hex(&Sha256::digest(read(path)?)))
}

impl Manifest {
    pub fn new(command: &str, config: &RunConfig, graph: &CausalGraph) -> Result<Self> {
        Ok(Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config: config.clone(),
            config_hash: config.hash(),
            graph_hash: graph_hash(graph),
            data_hash: file_hash(&config.data)?,
            seed: config.seed,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// The recorded config, after checking that its inputs are unchanged.
    pub fn replay_config(&self) -> Result<RunConfig> {
        if self.config.hash() != self.config_hash {
            return Err(Error::Config("manifest config does not match its recorded hash".into()));
        }
        let graph = load_graph(&self.config.graph)?;
        if graph_hash(&graph) != self.graph_hash {
            return Err(Error::Config(format!("graph {} changed since the manifest was written", self.config.graph.display())));
        }
        if file_hash(&self.config.data)? != self.data_hash {
            return Err(Error::Config(format!("data {} changed since the manifest was written", self.config.data.display())));
        }
        Ok(self.config.clone())
    }
}
