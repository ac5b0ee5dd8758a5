//! The subcommands, callable without going through the binary.

use std::path::{Path, PathBuf};

use fairweight_core::data::{Encoding, SplitPlan};
use fairweight_core::effects::{downstream_accuracy, EffectReport, MetricSummary, WassersteinConfig};
use fairweight_core::graph::EffectMode;
use fairweight_core::model::StructuredModel;
use fairweight_core::synth::OracleQuery;
use fairweight_core::trainer::{evaluate as evaluate_model, repeat_protocol, train, Clock, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::checkpoint::Checkpoint;
use crate::config::{Manifest, Prepared, RunConfig};
use crate::docs::{conditions, PiSpec, ScmDoc};
use crate::error::{write, Error, Result};
use crate::table::{export_weights, weights_for_dataset, write_dataset};

fn json_pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn write_report(dir: &Path, stem: &str, report: &EffectReport) -> Result<()> {
    write(&dir.join(format!("{stem}.json")), json_pretty(report))?;
    write(&dir.join(format!("{stem}.txt")), report.table())
}

/// Train and evaluate `cfg.repeats` times and write, under the output
/// directory:
///
/// - `manifest.json`
/// - `rep_<r>/weights.csv`, `rep_<r>/model.ckpt`, `rep_<r>/train_log.jsonl`
/// - `weights.csv`: per row, the mean weight over the repetitions that
///   trained on it (1 for rows never in a training split)
/// - `report.json`, `report.txt`
pub fn reweigh(cfg: &RunConfig, clock: &dyn Clock) -> Result<EffectReport> {
    let Prepared { graph, pathset, dataset } = cfg.prepare()?;
    let out = cfg.out_dir()?;
    let manifest = Manifest::new("reweigh", cfg, &graph)?;
    write(&out.join("manifest.json"), json_pretty(&manifest))?;

    let (report, reps) = repeat_protocol(&graph, &dataset, &pathset, &cfg.model, &cfg.train_config(), &cfg.protocol(), clock)?;

    let m = dataset.len();
    let mut sum = vec![0.0; m];
    let mut count = vec![0usize; m];
    for rep in &reps {
        let dir = out.join(format!("rep_{}", rep.index));
        let w = &rep.outcome.weights.w;
        export_weights(&dir.join("weights.csv"), &dataset, &rep.train_rows, w)?;
        Checkpoint::of(&rep.model, &cfg.mode).save(&dir.join("model.ckpt"))?;
        let mut log = String::new();
        for e in &rep.outcome.log.epochs {
            log.push_str(&serde_json::to_string(e).expect("serializable"));
            log.push('\n');
        }
        write(&dir.join("train_log.jsonl"), log)?;
        write(&dir.join("metrics.json"), json_pretty(&rep.metrics))?;
        for (&row, &v) in rep.train_rows.iter().zip(w) {
            sum[row] += v;
            count[row] += 1;
        }
    }
    let averaged: Vec<f64> = sum.iter().zip(&count).map(|(s, &c)| if c == 0 { 1.0 } else { s / c as f64 }).collect();
    let all: Vec<usize> = (0..m).collect();
    export_weights(&out.join("weights.csv"), &dataset, &all, &averaged)?;
    write_report(out, "report", &report)?;
    Ok(report)
}

/// Where `effects` gets its model from.
#[derive(Debug, Clone)]
pub enum ModelSource {
    Checkpoint(PathBuf),
    /// Fit F¹ on all rows with unit weights and no reweighting.
    Fit,
}

/// Evaluate every estimator on the whole dataset under the given weights
/// (unit weights when none are given). The logistic regression is fit and
/// scored on the same rows. With an output directory the report is also
/// written as `effects.json` and `effects.txt`.
pub fn effects(cfg: &RunConfig, weights: Option<&Path>, source: &ModelSource, clock: &dyn Clock) -> Result<EffectReport> {
    let Prepared { graph, pathset, dataset } = cfg.prepare()?;
    let model = match source {
        ModelSource::Checkpoint(path) => {
            let ck = Checkpoint::load(path)?;
            let mode_differs = ck.mode != cfg.mode;
            let model = ck.into_model(&graph)?;
            if mode_differs {
                let mut m = StructuredModel::from_params(graph.clone(), model.encoding().clone(), pathset.clone(), model.config().clone(), model.params().clone())?;
                m.mark_trained();
                m
            } else {
                model
            }
        }
        ModelSource::Fit => {
            let all: Vec<usize> = (0..dataset.len()).collect();
            let encoding = Encoding::fit(&graph, &dataset, &all)?;
            let x = encoding.encode(&dataset)?;
            let mut model = StructuredModel::new(graph.clone(), encoding, pathset.clone(), cfg.model.clone(), cfg.seed)?;
            let config = TrainConfig {
                reweight: false,
                ..cfg.train_config()
            };
            train(&mut model, &x, None, &config, clock)?;
            model
        }
    };
    let x = model.encoding().encode(&dataset)?;
    let w = match weights {
        Some(p) => weights_for_dataset(p, dataset.len())?,
        None => vec![1.0; dataset.len()],
    };
    let eval_rows = match pathset.mode() {
        EffectMode::Counterfactual => Some(dataset.rows_matching(&graph, pathset.condition())?),
        _ => None,
    };
    let wcfg = WassersteinConfig {
        seed: cfg.seed,
        ..cfg.wasserstein.clone()
    };
    let metrics = evaluate_model(&model, &x, &w, eval_rows.as_deref(), &x, &wcfg, 0)?;
    let report = EffectReport::aggregate(pathset.mode(), cfg.tau, vec![metrics]);
    if let Some(out) = &cfg.out {
        write_report(out, "effects", &report)?;
    }
    Ok(report)
}

/// Downstream logistic-regression accuracy over `cfg.repeats` splits; the
/// regression is fit on the weighted training split.
pub fn evaluate(cfg: &RunConfig, weights: Option<&Path>) -> Result<MetricSummary> {
    let Prepared { graph, dataset, .. } = cfg.prepare()?;
    let w = match weights {
        Some(p) => weights_for_dataset(p, dataset.len())?,
        None => vec![1.0; dataset.len()],
    };
    let mut acc = Vec::with_capacity(cfg.repeats);
    for r in 0..cfg.repeats as u64 {
        let (train_rows, test_rows) = SplitPlan::new(cfg.seed, cfg.train_fraction, r).split(dataset.len());
        let encoding = Encoding::fit(&graph, &dataset, &train_rows)?;
        let x_train = encoding.encode_rows(&dataset, &train_rows)?;
        let x_test = encoding.encode_rows(&dataset, &test_rows)?;
        let w_train: Vec<f64> = train_rows.iter().map(|&i| w[i]).collect();
        acc.push(downstream_accuracy(&graph, &encoding, &x_train, &w_train, &x_test)?.accuracy);
    }
    let summary = MetricSummary::from_values(acc);
    if let Some(out) = &cfg.out {
        write(&out.join("accuracy.json"), json_pretty(&summary))?;
    }
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleValue {
    pub value: f64,
    pub standard_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSpecificValue {
    pub pi: PiSpec,
    pub value: f64,
    pub standard_error: f64,
}

/// Oracle effects written next to generated data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub n: usize,
    pub seed: u64,
    pub oracle_draws: usize,
    pub oracle_seed: u64,
    pub total_effect: OracleValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path_specific: Option<PathSpecificValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterfactual: Option<OracleValue>,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("oracle.json")
}

/// Sample `n` rows (default from the `[synth]` table) to `out` and write
/// the oracle values to the sidecar path.
pub fn gen_synth(scm_path: &Path, out: &Path, n: Option<usize>, seed: Option<u64>) -> Result<Sidecar> {
    let doc = ScmDoc::load(scm_path)?;
    let scm = doc.build()?;
    let n = n.unwrap_or(doc.synth.n);
    let seed = seed.unwrap_or(doc.synth.seed);
    if n == 0 {
        return Err(Error::Config("n must be at least 1".into()));
    }
    write_dataset(out, &scm.generate(n, seed))?;

    let o = &doc.oracle;
    let est = |q: OracleQuery| -> Result<OracleValue> {
        let e = scm.oracle_effect(&q, o.draws, o.seed)?;
        Ok(OracleValue {
            value: e.value,
            standard_error: e.standard_error,
        })
    };
    let g = scm.graph();
    let path_specific = match o.pi.pathset(g) {
        Ok(ps) => {
            let v = est(OracleQuery::PathSpecific(ps))?;
            Some(PathSpecificValue {
                pi: o.pi,
                value: v.value,
                standard_error: v.standard_error,
            })
        }
        Err(_) => None,
    };
    let counterfactual = if o.condition.is_empty() {
        None
    } else {
        Some(est(OracleQuery::Counterfactual(conditions(g, &o.condition)?))?)
    };
    let sidecar = Sidecar {
        n,
        seed,
        oracle_draws: o.draws,
        oracle_seed: o.seed,
        total_effect: est(OracleQuery::Total)?,
        path_specific,
        counterfactual,
    };
    write(&sidecar_path(out), json_pretty(&sidecar))?;
    Ok(sidecar)
}
