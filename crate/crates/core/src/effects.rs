//! Effect estimators on (re)weighted data, utility metrics, and report
//! aggregation across repetitions.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::string::String;
use alloc::vec::Vec;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Encoding;
use crate::graph::{CausalGraph, EffectMode};
use crate::model::{ModelError, StructuredModel};
use crate::nn::{mlp_forward, sigmoid, Adam, Matrix, NnError, ParamStore, Tape};
use crate::trainer::weighted_gap;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EffectsError {
    #[error("model has not been trained")]
    Untrained,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("no rows satisfy the conditioning event")]
    EmptySubset,
    #[error("group {0} has no weight mass")]
    EmptyGroup(&'static str),
    #[error("weights sum to zero")]
    ZeroMass,
    #[error("weight vector has length {found}, expected {expected}")]
    WeightLength { expected: usize, found: usize },
    #[error("Wasserstein critic diverged")]
    Diverged,
    #[error("datasets have different widths")]
    Width,
}

fn require_trained(model: &StructuredModel) -> Result<(), EffectsError> {
    if model.is_trained() {
        Ok(())
    } else {
        Err(EffectsError::Untrained)
    }
}

fn check_len(w: &[f64], n: usize) -> Result<(), EffectsError> {
    if w.len() != n {
        return Err(EffectsError::WeightLength { expected: n, found: w.len() });
    }
    if w.iter().sum::<f64>() <= 0.0 {
        return Err(EffectsError::ZeroMass);
    }
    Ok(())
}

/// `Σ ω_k ŷ⁺_k − Σ ω_k ŷ⁻_k` with both arms cascaded along all paths.
pub fn total_effect(model: &StructuredModel, x: &Matrix, w: &[f64]) -> Result<f64, EffectsError> {
    require_trained(model)?;
    check_len(w, x.rows())?;
    let plus = model.f2_total(x, 1.0)?;
    let minus = model.f2_total(x, 0.0)?;
    Ok(weighted_gap(&plus, &minus, w))
}

/// Intervened arm carried along the path set only, reference arm at `S = 0`.
pub fn path_specific_effect(model: &StructuredModel, x: &Matrix, w: &[f64]) -> Result<f64, EffectsError> {
    require_trained(model)?;
    check_len(w, x.rows())?;
    let plus = model.f2_path_specific(x, 1.0)?;
    let minus = model.f2_total(x, 0.0)?;
    Ok(weighted_gap(&plus, &minus, w))
}

/// Total-effect contrast over `rows` (those matching the condition), with
/// the weights renormalized inside the subset.
pub fn counterfactual_effect(model: &StructuredModel, x: &Matrix, w: &[f64], rows: &[usize]) -> Result<f64, EffectsError> {
    require_trained(model)?;
    check_len(w, x.rows())?;
    if rows.is_empty() {
        return Err(EffectsError::EmptySubset);
    }
    let xs = x.select_rows(rows);
    let ws: Vec<f64> = rows.iter().map(|&i| w[i]).collect();
    if ws.iter().sum::<f64>() <= 0.0 {
        return Err(EffectsError::ZeroMass);
    }
    let plus = model.f2_counterfactual(&xs, 1.0)?;
    let minus = model.f2_counterfactual(&xs, 0.0)?;
    Ok(weighted_gap(&plus, &minus, &ws))
}

/// The estimator matching the model's fairness mode. `rows` is the
/// conditioned subset in counterfactual mode and ignored otherwise.
pub fn mode_effect(model: &StructuredModel, x: &Matrix, w: &[f64], rows: Option<&[usize]>) -> Result<f64, EffectsError> {
    match model.pathset().mode() {
        EffectMode::Total => total_effect(model, x, w),
        EffectMode::PathSpecific => path_specific_effect(model, x, w),
        EffectMode::Counterfactual => counterfactual_effect(model, x, w, rows.ok_or(EffectsError::EmptySubset)?),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapDiagnostic {
    pub value: f64,
    /// Set when the critic output is constant and the value is forced to 0.
    pub degenerate: bool,
}

/// Critic outputs on both arms, min-max normalized over the pooled outputs,
/// then the difference of weighted means.
pub fn discriminator_gap(model: &StructuredModel, x: &Matrix, w: &[f64], rows: Option<&[usize]>) -> Result<GapDiagnostic, EffectsError> {
    require_trained(model)?;
    check_len(w, x.rows())?;
    let (xs, ws) = match rows {
        Some(r) if model.pathset().mode() == EffectMode::Counterfactual => {
            (x.select_rows(r), r.iter().map(|&i| w[i]).collect::<Vec<f64>>())
        }
        _ => (x.clone(), w.to_vec()),
    };
    if xs.rows() == 0 {
        return Err(EffectsError::EmptySubset);
    }
    let (yp, ym) = model.f2_pair(&xs)?;
    let ctx = model.uses_context().then(|| model.critic_context(&xs));
    let dp = model.discriminator_value(&yp, ctx.as_ref())?;
    let dm = model.discriminator_value(&ym, ctx.as_ref())?;
    Ok(normalized_gap(&dp, &dm, &ws))
}

pub fn normalized_gap(dp: &[f64], dm: &[f64], w: &[f64]) -> GapDiagnostic {
    let lo = dp.iter().chain(dm).copied().fold(f64::INFINITY, f64::min);
    let hi = dp.iter().chain(dm).copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi - lo > 1e-12 * hi.abs().max(lo.abs()).max(1.0)) {
        return GapDiagnostic {
            value: 0.0,
            degenerate: true,
        };
    }
    let norm = |v: &[f64]| -> Vec<f64> { v.iter().map(|x| (x - lo) / (hi - lo)).collect() };
    GapDiagnostic {
        value: weighted_gap(&norm(dp), &norm(dm), w),
        degenerate: false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WassersteinConfig {
    pub steps: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub hidden: Vec<usize>,
    pub lambda_gp: f64,
    pub seed: u64,
}

impl Default for WassersteinConfig {
    fn default() -> Self {
        Self {
            steps: 2000,
            batch_size: 512,
            lr: 1e-3,
            hidden: alloc::vec![32, 32, 32],
            lambda_gp: 10.0,
            seed: 0,
        }
    }
}

/// Critic estimate of the Wasserstein-1 distance between the `wa`-weighted
/// rows of `a` and the `wb`-weighted rows of `b`.
///
/// Training batches pair a uniform draw from each side; expectations are
/// weighted, and weight-proportional draws are used only to pick the
/// interpolation partners of the gradient penalty. The critic and its
/// negation are equally admissible, so the ascent runs on `|gap|`; this keeps
/// a critic initialized with the wrong orientation from stalling behind the
/// penalty. The returned value is `|gap|` evaluated exactly on all rows.
pub fn wasserstein_distance(a: &Matrix, wa: &[f64], b: &Matrix, wb: &[f64], config: &WassersteinConfig) -> Result<f64, EffectsError> {
    if a.cols() != b.cols() {
        return Err(EffectsError::Width);
    }
    check_len(wa, a.rows())?;
    check_len(wb, b.rows())?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params = ParamStore::new();
    let mut sizes = alloc::vec![a.cols()];
    sizes.extend_from_slice(&config.hidden);
    sizes.push(1);
    let id = params.add_mlp("wasserstein", &sizes, &mut rng);
    let mut adam = Adam::new(config.lr);
    let pick_a = WeightedIndex::new(wa).map_err(|_| EffectsError::ZeroMass)?;
    let pick_b = WeightedIndex::new(wb).map_err(|_| EffectsError::ZeroMass)?;

    for _ in 0..config.steps {
        let na = config.batch_size.min(a.rows());
        let nb = config.batch_size.min(b.rows());
        let ia: Vec<usize> = (0..na).map(|_| rng.random_range(0..a.rows())).collect();
        let ib: Vec<usize> = (0..nb).map(|_| rng.random_range(0..b.rows())).collect();
        let k = na.min(nb);
        let ga: Vec<usize> = (0..k).map(|_| pick_a.sample(&mut rng)).collect();
        let gb: Vec<usize> = (0..k).map(|_| pick_b.sample(&mut rng)).collect();
        let mut mix = Matrix::zeros(k, a.cols());
        for r in 0..k {
            let u: f64 = rng.random();
            for c in 0..a.cols() {
                mix.set(r, c, u * a.get(ga[r], c) + (1.0 - u) * b.get(gb[r], c));
            }
        }

        let mut tape = Tape::new();
        let bind = params.bind(&mut tape, &[id], true);
        let layers = bind.vars(id).to_vec();
        let side = |tape: &mut Tape, x: &Matrix, rows: &[usize], w: &[f64]| -> Result<crate::nn::Var, NnError> {
            let xs = tape.constant(x.select_rows(rows));
            let out = mlp_forward(tape, &layers, xs)?;
            let ws: Vec<f64> = rows.iter().map(|&i| w[i]).collect();
            let total: f64 = ws.iter().sum();
            let scaled: Vec<f64> = ws.iter().map(|v| if total > 0.0 { v / total } else { 0.0 }).collect();
            let wv = tape.constant(Matrix::column(&scaled));
            let prod = tape.mul(out, wv);
            Ok(tape.sum_all(prod))
        };
        let ea = side(&mut tape, a, &ia, wa).map_err(ModelError::from)?;
        let eb = side(&mut tape, b, &ib, wb).map_err(ModelError::from)?;
        let gap = tape.sub(ea, eb);
        let sign = if tape.value(gap).item() < 0.0 { -1.0 } else { 1.0 };
        let gap = tape.scale(gap, sign);
        let xhat = tape.variable(mix);
        let out = mlp_forward(&mut tape, &layers, xhat).map_err(ModelError::from)?;
        let total = tape.sum_all(out);
        let g = tape.grad(total, &[xhat]).map_err(ModelError::from)?[0];
        let sq = tape.square(g);
        let row_sq = tape.sum_cols(sq);
        let eps = tape.constant(Matrix::filled(k, 1, 1e-12));
        let row_sq = tape.add(row_sq, eps);
        let norm = tape.sqrt(row_sq);
        let ones = tape.constant(Matrix::filled(k, 1, 1.0));
        let dev = tape.sub(norm, ones);
        let dev2 = tape.square(dev);
        let gp = tape.mean_all(dev2);
        let gp = tape.scale(gp, config.lambda_gp);
        let objective = tape.sub(gap, gp);
        if !tape.value(objective).item().is_finite() {
            return Err(EffectsError::Diverged);
        }
        let loss = tape.scale(objective, -1.0);
        let grads = bind.gradients(&mut tape, loss).map_err(ModelError::from)?;
        adam.step(&mut params, &grads).map_err(|_| EffectsError::Diverged)?;
    }

    let mean_of = |x: &Matrix, w: &[f64]| -> Result<f64, EffectsError> {
        let total: f64 = w.iter().sum();
        let mut acc = 0.0;
        let mut start = 0;
        while start < x.rows() {
            let end = (start + 2048).min(x.rows());
            let rows: Vec<usize> = (start..end).collect();
            let mut tape = Tape::new();
            let bind = params.bind(&mut tape, &[id], false);
            let xs = tape.constant(x.select_rows(&rows));
            let out = mlp_forward(&mut tape, bind.vars(id), xs).map_err(ModelError::from)?;
            for (v, &i) in tape.value(out).data().iter().zip(&rows) {
                acc += w[i] * v;
            }
            start = end;
        }
        Ok(acc / total)
    };
    let value = (mean_of(a, wa)? - mean_of(b, wb)?).abs();
    if !value.is_finite() {
        return Err(EffectsError::Diverged);
    }
    Ok(value)
}

/// Indicator columns for `S = s⁺` and `Y = 1` read from the encoded matrix.
fn indicator(encoding: &Encoding, graph: &CausalGraph, x: &Matrix, y: bool) -> Vec<f64> {
    let node = if y { graph.outcome() } else { graph.sensitive() };
    let (offset, _) = encoding.block(node);
    (0..x.rows()).map(|r| x.get(r, offset + 1)).collect()
}

/// Weighted `P(Y=1 | S=1) − P(Y=1 | S=0)` straight from the data.
pub fn statistical_parity(graph: &CausalGraph, encoding: &Encoding, x: &Matrix, w: &[f64]) -> Result<f64, EffectsError> {
    check_len(w, x.rows())?;
    let s = indicator(encoding, graph, x, false);
    let y = indicator(encoding, graph, x, true);
    let mut acc = [(0.0, 0.0); 2];
    for k in 0..x.rows() {
        let g = (s[k] > 0.5) as usize;
        acc[g].0 += w[k] * y[k];
        acc[g].1 += w[k];
    }
    if acc[1].1 <= 0.0 {
        return Err(EffectsError::EmptyGroup("S=1"));
    }
    if acc[0].1 <= 0.0 {
        return Err(EffectsError::EmptyGroup("S=0"));
    }
    Ok(acc[1].0 / acc[1].1 - acc[0].0 / acc[0].1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyResult {
    pub accuracy: f64,
    pub converged: bool,
    pub final_loss: f64,
}

const LR_EPOCHS: usize = 500;
const LR_STEP: f64 = 0.1;
const LR_GRAD_TOL: f64 = 1e-3;

/// Weighted logistic regression on every non-outcome encoded column plus a
/// bias, full-batch gradient descent; accuracy on the test rows.
pub fn downstream_accuracy(
    graph: &CausalGraph,
    encoding: &Encoding,
    x_train: &Matrix,
    w: &[f64],
    x_test: &Matrix,
) -> Result<AccuracyResult, EffectsError> {
    check_len(w, x_train.rows())?;
    let (y_off, y_width) = encoding.block(graph.outcome());
    let features: Vec<usize> = (0..encoding.dim()).filter(|c| *c < y_off || *c >= y_off + y_width).collect();
    let design = |x: &Matrix| -> (Matrix, Vec<f64>) {
        let mut f = Matrix::zeros(x.rows(), features.len() + 1);
        for r in 0..x.rows() {
            for (j, &c) in features.iter().enumerate() {
                f.set(r, j, x.get(r, c));
            }
            f.set(r, features.len(), 1.0);
        }
        let y = (0..x.rows()).map(|r| x.get(r, y_off + 1)).collect();
        (f, y)
    };
    let (ftr, ytr) = design(x_train);
    let total: f64 = w.iter().sum();
    let d = ftr.cols();
    let mut beta = alloc::vec![0.0; d];
    let mut grad_max = f64::INFINITY;
    let mut loss = 0.0;
    for _ in 0..LR_EPOCHS {
        let mut grad = alloc::vec![0.0; d];
        loss = 0.0;
        for r in 0..ftr.rows() {
            let row = ftr.row_slice(r);
            let z: f64 = row.iter().zip(&beta).map(|(a, b)| a * b).sum();
            let p = sigmoid(z);
            let coef = w[r] * (p - ytr[r]) / total;
            for (g, &a) in grad.iter_mut().zip(row) {
                *g += coef * a;
            }
            loss += w[r] * (crate::nn::softplus(z) - ytr[r] * z) / total;
        }
        grad_max = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        for (b, g) in beta.iter_mut().zip(&grad) {
            *b -= LR_STEP * g;
        }
    }
    let (fte, yte) = design(x_test);
    let correct = (0..fte.rows())
        .filter(|&r| {
            let z: f64 = fte.row_slice(r).iter().zip(&beta).map(|(a, b)| a * b).sum();
            (z > 0.0) == (yte[r] > 0.5)
        })
        .count();
    Ok(AccuracyResult {
        accuracy: if fte.rows() == 0 { 0.0 } else { correct as f64 / fte.rows() as f64 },
        converged: grad_max < LR_GRAD_TOL,
        final_loss: loss,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single repetition.
    pub std: f64,
    pub values: Vec<f64>,
}

impl MetricSummary {
    pub fn from_values(values: Vec<f64>) -> Self {
        let n = values.len();
        let mean = if n == 0 { 0.0 } else { values.iter().sum::<f64>() / n as f64 };
        let std = if n < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Self { mean, std, values }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionMetrics {
    pub repetition: u64,
    /// Mode effect under the learned weights.
    pub effect: f64,
    /// Mode effect of the same trained model under unit weights.
    pub effect_unweighted: f64,
    pub discriminator_gap: GapDiagnostic,
    pub wasserstein: f64,
    pub statistical_parity: f64,
    pub accuracy: f64,
    pub accuracy_converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectReport {
    pub mode: EffectMode,
    pub tau: f64,
    pub effect: MetricSummary,
    pub effect_unweighted: MetricSummary,
    pub discriminator_gap: MetricSummary,
    pub wasserstein: MetricSummary,
    pub statistical_parity: MetricSummary,
    pub accuracy: MetricSummary,
    pub fair: bool,
    pub warnings: Vec<String>,
    pub repetitions: Vec<RepetitionMetrics>,
}

impl EffectReport {
    pub fn aggregate(mode: EffectMode, tau: f64, repetitions: Vec<RepetitionMetrics>) -> Self {
        let pick = |f: fn(&RepetitionMetrics) -> f64| MetricSummary::from_values(repetitions.iter().map(f).collect());
        let effect = pick(|r| r.effect);
        let mut warnings = Vec::new();
        for r in &repetitions {
            if !r.accuracy_converged {
                warnings.push(alloc::format!(
                    "repetition {}: downstream logistic regression did not converge in {LR_EPOCHS} epochs",
                    r.repetition
                ));
            }
            if r.discriminator_gap.degenerate {
                warnings.push(alloc::format!("repetition {}: critic output is constant; gap diagnostic set to 0", r.repetition));
            }
        }
        Self {
            mode,
            tau,
            fair: effect.mean.abs() < tau,
            effect,
            effect_unweighted: pick(|r| r.effect_unweighted),
            discriminator_gap: pick(|r| r.discriminator_gap.value),
            wasserstein: pick(|r| r.wasserstein),
            statistical_parity: pick(|r| r.statistical_parity),
            accuracy: pick(|r| r.accuracy),
            warnings,
            repetitions,
        }
    }

    /// Plain-text table: metric, mean, and standard deviation in parentheses.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let row = |out: &mut String, name: &str, m: &MetricSummary| {
            out.push_str(&alloc::format!("{name:<22} {:>9.4} ({:.4})\n", m.mean, m.std));
        };
        let label = match self.mode {
            EffectMode::Total => "TE",
            EffectMode::PathSpecific => "SE",
            EffectMode::Counterfactual => "CE",
        };
        out.push_str(&alloc::format!("{:<22} {:>9} {}\n", "metric", "mean", "(std)"));
        row(&mut out, &alloc::format!("{label} (reweighted)"), &self.effect);
        row(&mut out, &alloc::format!("{label} (unit weights)"), &self.effect_unweighted);
        row(&mut out, "discriminator gap", &self.discriminator_gap);
        row(&mut out, "Wasserstein", &self.wasserstein);
        row(&mut out, "statistical parity", &self.statistical_parity);
        row(&mut out, "LR accuracy", &self.accuracy);
        out.push_str(&alloc::format!(
            "|{label}| {} tau = {}: {}\n",
            if self.fair { "<" } else { ">=" },
            self.tau,
            if self.fair { "fair" } else { "unfair" }
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{tests::fig2, PathSet};
    use crate::model::tests::fig2_data;
    use crate::model::ModelConfig;
    use alloc::vec;

    fn trained_model(ps: fn(&CausalGraph) -> PathSet) -> (StructuredModel, Matrix) {
        let g = fig2();
        let ds = fig2_data(128, 2);
        let rows: Vec<usize> = (0..128).collect();
        let enc = Encoding::fit(&g, &ds, &rows).unwrap();
        let x = enc.encode(&ds).unwrap();
        let p = ps(&g);
        let mut m = StructuredModel::new(g, enc, p, ModelConfig::default(), 5).unwrap();
        m.mark_trained();
        (m, x)
    }

    #[test]
    fn untrained_is_rejected() {
        let (mut m, x) = trained_model(PathSet::total);
        m = StructuredModel::from_params(m.graph().clone(), m.encoding().clone(), m.pathset().clone(), m.config().clone(), m.params().clone()).unwrap();
        assert_eq!(total_effect(&m, &x, &vec![1.0; x.rows()]), Err(EffectsError::Untrained));
    }

    #[test]
    fn all_paths_effect_equals_total_bitwise() {
        let (m, x) = trained_model(PathSet::all_paths);
        let w: Vec<f64> = (0..x.rows()).map(|i| 0.5 + (i % 3) as f64).collect();
        let a = total_effect(&m, &x, &w).unwrap();
        let b = path_specific_effect(&m, &x, &w).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn full_condition_matches_total() {
        let (m, x) = trained_model(PathSet::total);
        let w = vec![1.0; x.rows()];
        let g = m.graph().clone();
        let cf = StructuredModel::from_params(
            g.clone(),
            m.encoding().clone(),
            PathSet::counterfactual(&g, vec![crate::graph::Condition {
                node: g.id("A").unwrap(),
                value: crate::graph::ConditionValue::Number(0.0),
            }])
            .unwrap(),
            m.config().clone(),
            m.params().clone(),
        )
        .map(|mut c| {
            c.mark_trained();
            c
        })
        .unwrap();
        let all: Vec<usize> = (0..x.rows()).collect();
        assert_eq!(counterfactual_effect(&cf, &x, &w, &all).unwrap(), total_effect(&m, &x, &w).unwrap());
        assert_eq!(counterfactual_effect(&cf, &x, &w, &[]), Err(EffectsError::EmptySubset));
    }

    #[test]
    fn estimators_are_scale_free() {
        let (m, x) = trained_model(PathSet::total);
        let w: Vec<f64> = (0..x.rows()).map(|i| 0.2 + (i % 5) as f64).collect();
        let w7: Vec<f64> = w.iter().map(|v| v * 7.0).collect();
        let a = total_effect(&m, &x, &w).unwrap();
        let b = total_effect(&m, &x, &w7).unwrap();
        assert!((a - b).abs() < 1e-12);
        let g = m.graph();
        let pa = statistical_parity(g, m.encoding(), &x, &w).unwrap();
        let pb = statistical_parity(g, m.encoding(), &x, &w7).unwrap();
        assert!((pa - pb).abs() < 1e-12);
        let la = downstream_accuracy(g, m.encoding(), &x, &w, &x).unwrap();
        let lb = downstream_accuracy(g, m.encoding(), &x, &w7, &x).unwrap();
        assert_eq!(la.accuracy, lb.accuracy);
    }

    #[test]
    fn gap_normalization() {
        assert_eq!(normalized_gap(&[0.3; 4], &[0.3; 4], &[1.0; 4]), GapDiagnostic { value: 0.0, degenerate: true });
        let same = normalized_gap(&[0.1, 0.5, 0.9], &[0.1, 0.5, 0.9], &[1.0; 3]);
        assert!(same.value.abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let dp: Vec<f64> = (0..200).map(|_| 0.9 + rng.random_range(-0.01..0.01)).collect();
        let dm: Vec<f64> = (0..200).map(|_| 0.1 + rng.random_range(-0.01..0.01)).collect();
        assert!(normalized_gap(&dp, &dm, &[1.0; 200]).value > 0.95);
    }

    /// rows: (S one-hot, Y one-hot) given group rates
    fn parity_matrix(rates: [(usize, usize); 2]) -> (CausalGraph, Encoding, Matrix) {
        let g = CausalGraph::new(vec![crate::graph::NodeSpec::binary("S"), crate::graph::NodeSpec::binary("Y")], &[("S", "Y")], "S", "Y").unwrap();
        let mut s = Vec::new();
        let mut y = Vec::new();
        for (group, (pos, total)) in rates.iter().enumerate() {
            for i in 0..*total {
                s.push(alloc::format!("{group}"));
                y.push(if i < *pos { "1".into() } else { "0".into() });
            }
        }
        let ds = crate::data::ColumnarDataset::new(vec![
            crate::data::Column { name: "S".into(), values: crate::data::RawColumn::Categorical(s) },
            crate::data::Column { name: "Y".into(), values: crate::data::RawColumn::Categorical(y) },
        ])
        .unwrap();
        let rows: Vec<usize> = (0..ds.len()).collect();
        let enc = Encoding::fit(&g, &ds, &rows).unwrap();
        let x = enc.encode(&ds).unwrap();
        (g, enc, x)
    }

    #[test]
    fn parity_counts() {
        let (g, enc, x) = parity_matrix([(2, 4), (3, 4)]);
        let w = vec![1.0; x.rows()];
        assert!((statistical_parity(&g, &enc, &x, &w).unwrap() - 0.25).abs() < 1e-12);
        let (g, enc, x) = parity_matrix([(2, 4), (1, 2)]);
        assert!(statistical_parity(&g, &enc, &x, &vec![1.0; x.rows()]).unwrap().abs() < 1e-12);
        let mut w = vec![1.0; x.rows()];
        for v in w.iter_mut().skip(4) {
            *v = 0.0;
        }
        assert_eq!(statistical_parity(&g, &enc, &x, &w), Err(EffectsError::EmptyGroup("S=1")));
    }

    #[test]
    fn logistic_regression_cases() {
        // Y = S: separable through the S one-hot
        let (g, enc, x) = parity_matrix([(0, 10), (10, 10)]);
        let r = downstream_accuracy(&g, &enc, &x, &vec![1.0; x.rows()], &x).unwrap();
        assert_eq!(r.accuracy, 1.0);
        // constant Y: prediction is the majority class
        let (g, enc, x) = parity_matrix([(7, 10), (3, 10)]);
        let mut ds_y = x.clone();
        for r in 0..ds_y.rows() {
            ds_y.set(r, 2, 0.0);
            ds_y.set(r, 3, 1.0);
        }
        let r = downstream_accuracy(&g, &enc, &ds_y, &vec![1.0; x.rows()], &ds_y).unwrap();
        assert_eq!(r.accuracy, 1.0);
    }

    fn quick() -> WassersteinConfig {
        WassersteinConfig {
            steps: 400,
            batch_size: 128,
            hidden: vec![16, 16],
            ..WassersteinConfig::default()
        }
    }

    #[test]
    fn wasserstein_point_masses() {
        let a = Matrix::zeros(200, 1);
        let b = Matrix::filled(200, 1, 1.0);
        let w = vec![1.0; 200];
        let d = wasserstein_distance(&a, &w, &b, &w, &quick()).unwrap();
        assert!((d - 1.0).abs() < 0.1, "{d}");
    }

    #[test]
    fn wasserstein_identical_and_concentrated() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 400;
        let mut x = Matrix::zeros(n, 2);
        for r in 0..n {
            let mode = if r % 2 == 0 { -1.0 } else { 1.0 };
            x.set(r, 0, mode + 0.1 * rng.random_range(-1.0..1.0));
            x.set(r, 1, rng.random_range(-1.0..1.0));
        }
        let ones = vec![1.0; n];
        let same = wasserstein_distance(&x, &ones, &x, &ones, &quick()).unwrap();
        assert!(same.abs() <= 0.05, "{same}");
        let concentrated: Vec<f64> = (0..n).map(|r| if r % 2 == 0 { 2.0 } else { 0.0 }).collect();
        let far = wasserstein_distance(&x, &ones, &x, &concentrated, &quick()).unwrap();
        assert!(far > same + 0.3, "{far} vs {same}");
    }

    #[test]
    fn summary_conventions() {
        let one = MetricSummary::from_values(vec![0.3]);
        assert_eq!((one.mean, one.std), (0.3, 0.0));
        let s = MetricSummary::from_values(vec![1.0, 3.0]);
        assert!((s.std - 2f64.sqrt()).abs() < 1e-12);
        let c = MetricSummary::from_values(vec![0.25; 5]);
        assert_eq!(c.std, 0.0);
    }
}
