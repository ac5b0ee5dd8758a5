//! Plain-text model checkpoints. Parameter values are stored as the hex
//! bit patterns of their `f64`s, so a round trip is exact.
//!
//! ```text
//! fairweight-checkpoint 1
//! graph-hash <sha256>
//! mode <json>
//! model-config <json>
//! encoding <json>
//! group node:Y
//! tensor w0 4 32
//! 3fb999999999999a ...      one line per matrix row
//! end
//! ```

use std::path::Path;

use fairweight_core::data::Encoding;
use fairweight_core::graph::CausalGraph;
use fairweight_core::model::{ModelConfig, StructuredModel};
use fairweight_core::nn::{Matrix, ParamGroup, ParamStore, Tensor};

use crate::config::ModeSpec;
use crate::docs::graph_hash;
use crate::error::{read_string, write, Error, Result};

const MAGIC: &str = "fairweight-checkpoint 1";

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub graph_hash: String,
    pub mode: ModeSpec,
    pub model_config: ModelConfig,
    pub encoding: Encoding,
    pub params: ParamStore,
}

impl Checkpoint {
    pub fn of(model: &StructuredModel, mode: &ModeSpec) -> Self {
        Self {
            graph_hash: graph_hash(model.graph()),
            mode: mode.clone(),
            model_config: model.config().clone(),
            encoding: model.encoding().clone(),
            params: model.params().clone(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(MAGIC);
        out.push('\n');
        out.push_str(&format!("graph-hash {}\n", self.graph_hash));
        out.push_str(&format!("mode {}\n", json(&self.mode)));
        out.push_str(&format!("model-config {}\n", json(&self.model_config)));
        out.push_str(&format!("encoding {}\n", json(&self.encoding)));
        for g in self.params.groups() {
            out.push_str(&format!("group {}\n", g.name));
            for t in &g.tensors {
                let (rows, cols) = t.value.shape();
                out.push_str(&format!("tensor {} {rows} {cols}\n", t.name));
                for r in 0..rows {
                    let line: Vec<String> = t.value.row_slice(r).iter().map(|v| format!("{:016x}", v.to_bits())).collect();
                    out.push_str(&line.join(" "));
                    out.push('\n');
                }
            }
        }
        out.push_str("end\n");
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |line: usize, what: &str| Error::Checkpoint(format!("line {line}: {what}"));
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |what: &str| lines.next().ok_or_else(|| Error::Checkpoint(format!("truncated file, expected {what}")));
        let (n, l) = next("header")?;
        if l != MAGIC {
            return Err(bad(n, "not a fairweight checkpoint"));
        }
        let field = |(n, l): (usize, &str), key: &str| -> Result<String> {
            l.strip_prefix(key)
                .and_then(|r| r.strip_prefix(' '))
                .map(str::to_string)
                .ok_or_else(|| bad(n, &format!("expected `{key}`")))
        };
        let graph_hash = field(next("graph-hash")?, "graph-hash")?;
        let (n, l) = next("mode")?;
        let mode = from_json(n, &field((n, l), "mode")?)?;
        let (n, l) = next("model-config")?;
        let model_config = from_json(n, &field((n, l), "model-config")?)?;
        let (n, l) = next("encoding")?;
        let encoding = from_json(n, &field((n, l), "encoding")?)?;

        let mut params = ParamStore::new();
        let mut group: Option<ParamGroup> = None;
        loop {
            let (n, l) = next("`end`")?;
            if l == "end" {
                break;
            }
            if let Some(name) = l.strip_prefix("group ") {
                if let Some(g) = group.take() {
                    params.add_group(g);
                }
                group = Some(ParamGroup { name: name.to_string(), tensors: Vec::new() });
                continue;
            }
            let Some(rest) = l.strip_prefix("tensor ") else {
                return Err(bad(n, "expected `group`, `tensor` or `end`"));
            };
            let parts: Vec<&str> = rest.split(' ').collect();
            let [name, rows, cols] = parts[..] else {
                return Err(bad(n, "tensor line needs a name and a shape"));
            };
            let dim = |s: &str| s.parse::<usize>().map_err(|_| bad(n, "invalid tensor shape"));
            let (rows, cols) = (dim(rows)?, dim(cols)?);
            let mut data = Vec::with_capacity(rows * cols);
            for _ in 0..rows {
                let (n, l) = next("tensor values")?;
                let before = data.len();
                for word in l.split(' ').filter(|w| !w.is_empty()) {
                    let bits = u64::from_str_radix(word, 16).map_err(|_| bad(n, "invalid hex value"))?;
                    data.push(f64::from_bits(bits));
                }
                if data.len() - before != cols {
                    return Err(bad(n, &format!("expected {cols} values")));
                }
            }
            let g = group.as_mut().ok_or_else(|| bad(n, "tensor outside a group"))?;
            g.tensors.push(Tensor {
                name: name.to_string(),
                value: Matrix::from_vec(rows, cols, data),
            });
        }
        if let Some(g) = group.take() {
            params.add_group(g);
        }
        Ok(Self {
            graph_hash,
            mode,
            model_config,
            encoding,
            params,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write(path, self.to_text())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_string(path)?)
    }

    /// Rebuild the trained model; the graph must hash to the stored value.
    pub fn into_model(self, graph: &CausalGraph) -> Result<StructuredModel> {
        let found = graph_hash(graph);
        if found != self.graph_hash {
            return Err(Error::Checkpoint(format!(
                "graph hash mismatch: checkpoint has {}, graph file gives {found}",
                self.graph_hash
            )));
        }
        let pathset = self.mode.pathset(graph)?;
        let mut model = StructuredModel::from_params(graph.clone(), self.encoding, pathset, self.model_config, self.params)
            .map_err(|e| Error::Checkpoint(e.to_string()))?;
        model.mark_trained();
        Ok(model)
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("checkpoint header serializes")
}

fn from_json<T: serde::de::DeserializeOwned>(line: usize, s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Checkpoint(format!("line {line}: {e}")))
}
