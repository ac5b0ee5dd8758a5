//! Alternating optimization: weighted F¹ fitting, critic steps with gradient
//! penalty, and one weight solve per epoch on the full training split.

use alloc::string::String;
use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{ColumnarDataset, DataError, Encoding, SplitPlan};
use crate::effects::{
    discriminator_gap, downstream_accuracy, mode_effect, statistical_parity, wasserstein_distance, EffectReport, EffectsError, RepetitionMetrics,
    WassersteinConfig,
};
use crate::graph::{CausalGraph, EffectMode, PathSet};
use crate::model::{ModelConfig, ModelError, StructuredModel};
use crate::nn::{lr_schedule, Adam, Matrix, NnError, ParamStore, ScheduleForm, SgdMomentum, Tape};
use crate::reweighter::{solve_weights, CriticGap, SolverError, WeightVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StepSchedule {
    /// `f_steps_per_d_step` fit steps, then one critic step, repeated.
    #[default]
    Interleaved,
    /// A full epoch of fit steps, then the same number of critic steps the
    /// interleaved schedule would take.
    Sequential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub eta0: f64,
    pub schedule: ScheduleForm,
    pub critic_lr: f64,
    pub momentum: f64,
    pub f_steps_per_d_step: usize,
    pub critic_steps_at_w_solve: usize,
    pub t_balance: f64,
    pub seed: u64,
    /// Solve for weights each epoch; off means plain fitting with unit weights.
    pub reweight: bool,
    pub step_schedule: StepSchedule,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 30,
            batch_size: 640,
            eta0: 0.001,
            schedule: ScheduleForm::Decreasing,
            critic_lr: 1e-4,
            momentum: 0.9,
            f_steps_per_d_step: 2,
            critic_steps_at_w_solve: 50,
            t_balance: 1.5,
            seed: 0,
            reweight: true,
            step_schedule: StepSchedule::Interleaved,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TrainError {
    #[error("invalid training configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("no training rows satisfy the conditioning event")]
    EmptySubset,
    #[error("training diverged in epoch {epoch} (non-finite values in {cause}); parameters restored to their state before that epoch")]
    Diverged { epoch: usize, cause: String },
}

/// Elapsed wall time in seconds; the core crate has no clock of its own.
pub trait Clock {
    fn elapsed(&self) -> f64;
}

pub struct NoClock;

impl Clock for NoClock {
    fn elapsed(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub f1_loss: f64,
    pub critic_objective: f64,
    pub gradient_penalty: f64,
    pub effect_estimate: f64,
    pub weight_deviation: f64,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainLog {
    pub epochs: Vec<EpochRecord>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// One weight per training row.
    pub weights: WeightVector,
    pub log: TrainLog,
}

/// Position in `[0, 1]` of fit step `step` (0-based) among `total`.
pub fn progress(step: usize, total: usize) -> f64 {
    if total <= 1 {
        0.0
    } else {
        (step as f64 / (total - 1) as f64).min(1.0)
    }
}

impl TrainConfig {
    pub fn validate(&self, m: usize) -> Result<(), TrainError> {
        let fail = |s: &str| Err(TrainError::Config(String::from(s)));
        if self.epochs == 0 {
            return fail("epochs must be positive");
        }
        if self.batch_size == 0 {
            return fail("batch_size must be positive");
        }
        if self.batch_size > m {
            return fail("batch_size exceeds the number of training rows");
        }
        if self.f_steps_per_d_step == 0 {
            return fail("f_steps_per_d_step must be positive");
        }
        if !(self.eta0 > 0.0 && self.critic_lr > 0.0) {
            return fail("learning rates must be positive");
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return fail("momentum must lie in [0, 1)");
        }
        if !(self.t_balance > 0.0 && self.t_balance.is_finite()) {
            return fail("t_balance must be positive");
        }
        Ok(())
    }
}

/// Train `model` on the encoded training rows `x`. `eval_rows` restricts the
/// critic and the weight solve to a conditioned subset (counterfactual
/// mode); rows outside it keep weight 1.
pub fn train(
    model: &mut StructuredModel,
    x: &Matrix,
    eval_rows: Option<&[usize]>,
    config: &TrainConfig,
    clock: &dyn Clock,
) -> Result<TrainOutcome, TrainError> {
    let m = x.rows();
    config.validate(m)?;
    let all: Vec<usize> = (0..m).collect();
    let eval: Vec<usize> = eval_rows.map_or_else(|| all.clone(), <[usize]>::to_vec);
    if eval.is_empty() {
        return Err(TrainError::EmptySubset);
    }
    let x_eval = x.select_rows(&eval);
    let ctx_eval = model.uses_context().then(|| model.critic_context(&x_eval));

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut critic_rng = ChaCha8Rng::seed_from_u64(config.seed);
    critic_rng.set_stream(1);
    let mut sgd = SgdMomentum::new(config.momentum);
    let mut adam = Adam::new(config.critic_lr);
    let mut w = alloc::vec![1.0; m];

    let n_batches = m.div_ceil(config.batch_size);
    let total_steps = config.epochs * n_batches;
    let d_steps_per_epoch = n_batches / config.f_steps_per_d_step;
    let mut step = 0;
    let mut log = TrainLog::default();
    let mut last_good = model.params().clone();

    for epoch in 0..config.epochs {
        let mut stats = EpochStats::default();
        let critic = CriticData {
            x: &x_eval,
            ctx: ctx_eval.as_ref(),
        };
        let outcome = run_epoch(
            model,
            x,
            &critic,
            &eval,
            &mut w,
            config,
            EpochState {
                rng: &mut rng,
                critic_rng: &mut critic_rng,
                sgd: &mut sgd,
                adam: &mut adam,
                step: &mut step,
                total_steps,
                d_steps_per_epoch,
            },
            &mut stats,
        );
        let effect = match outcome {
            Ok(effect) => effect,
            Err(e) => return Err(diverged(model, &last_good, epoch, e)),
        };
        last_good = model.params().clone();
        let eval_w: Vec<f64> = eval.iter().map(|&i| w[i]).collect();
        log.epochs.push(EpochRecord {
            epoch,
            f1_loss: mean(&stats.f_losses),
            critic_objective: mean(&stats.critic_objective),
            gradient_penalty: mean(&stats.penalties),
            effect_estimate: effect,
            weight_deviation: eval_w.iter().map(|x| (x - 1.0) * (x - 1.0)).sum(),
            wall_time: clock.elapsed(),
        });
    }
    model.mark_trained();
    Ok(TrainOutcome {
        weights: WeightVector {
            w,
            t: config.t_balance,
        },
        log,
    })
}

#[derive(Default)]
struct EpochStats {
    f_losses: Vec<f64>,
    critic_objective: Vec<f64>,
    penalties: Vec<f64>,
}

struct CriticData<'a> {
    x: &'a Matrix,
    ctx: Option<&'a Matrix>,
}

struct EpochState<'a> {
    rng: &'a mut ChaCha8Rng,
    critic_rng: &'a mut ChaCha8Rng,
    sgd: &'a mut SgdMomentum,
    adam: &'a mut Adam,
    step: &'a mut usize,
    total_steps: usize,
    d_steps_per_epoch: usize,
}

/// One epoch; returns the weighted effect estimate on the evaluation rows.
#[allow(clippy::too_many_arguments)]
fn run_epoch(
    model: &mut StructuredModel,
    x: &Matrix,
    critic: &CriticData<'_>,
    eval: &[usize],
    w: &mut [f64],
    config: &TrainConfig,
    st: EpochState<'_>,
    stats: &mut EpochStats,
) -> Result<f64, TrainError> {
    let m = x.rows();
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(st.rng);
    let eval_w = |w: &[f64]| -> Vec<f64> { eval.iter().map(|&i| w[i]).collect() };
    let batch = config.batch_size.min(eval.len());

    let mut since_d = 0;
    for rows in order.chunks(config.batch_size) {
        let lr = lr_schedule(config.eta0, progress(*st.step, st.total_steps), config.schedule);
        stats.f_losses.push(fit_step(model, x, rows, w, st.sgd, lr)?);
        *st.step += 1;
        since_d += 1;
        if config.step_schedule == StepSchedule::Interleaved && since_d == config.f_steps_per_d_step {
            since_d = 0;
            let (o, p) = critic_step(model, critic, &eval_w(w), batch, st.adam, st.critic_rng)?;
            stats.critic_objective.push(o);
            stats.penalties.push(p);
        }
    }
    if config.step_schedule == StepSchedule::Sequential {
        for _ in 0..st.d_steps_per_epoch {
            let (o, p) = critic_step(model, critic, &eval_w(w), batch, st.adam, st.critic_rng)?;
            stats.critic_objective.push(o);
            stats.penalties.push(p);
        }
    }

    let (yp, ym) = model.f2_pair(critic.x)?;
    if config.reweight {
        for _ in 0..config.critic_steps_at_w_solve {
            let (o, p) = critic_step(model, critic, &eval_w(w), batch, st.adam, st.critic_rng)?;
            stats.critic_objective.push(o);
            stats.penalties.push(p);
        }
        let d = model.critic_gap(&yp, &ym, critic.ctx)?;
        let solved = solve_weights(&CriticGap::new(d)?, config.t_balance)?;
        for (&i, &v) in eval.iter().zip(&solved.w) {
            w[i] = v;
        }
    }
    Ok(weighted_gap(&yp, &ym, &eval_w(w)))
}

/// One momentum-SGD step on the weighted observational loss; returns the
/// batch loss before the update.
fn fit_step(model: &mut StructuredModel, x: &Matrix, rows: &[usize], w: &[f64], sgd: &mut SgdMomentum, lr: f64) -> Result<f64, TrainError> {
    let xb = x.select_rows(rows);
    let wb: Vec<f64> = rows.iter().map(|&i| w[i]).collect();
    let mut tape = Tape::new();
    let b = model.bind_nodes(&mut tape, true);
    let xv = tape.constant(xb);
    let loss = model.f1_loss(&mut tape, &b, xv, &wb)?;
    let value = tape.value(loss).item();
    if !value.is_finite() {
        return Err(ModelError::Nn(NnError::NonFiniteGradient { group: String::from("fit loss") }).into());
    }
    let grads = b.gradients(&mut tape, loss).map_err(ModelError::from)?;
    sgd.step(model.params_mut(), &grads, lr).map_err(ModelError::from)?;
    Ok(value)
}

/// One Adam ascent step of the critic on a random batch of evaluation rows;
/// returns (objective, penalty) before the update.
fn critic_step(
    model: &mut StructuredModel,
    critic: &CriticData<'_>,
    w: &[f64],
    batch: usize,
    adam: &mut Adam,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, f64), TrainError> {
    let n = critic.x.rows();
    let rows: Vec<usize> = if batch >= n {
        (0..n).collect()
    } else {
        rand::seq::index::sample(rng, n, batch).into_vec()
    };
    let xb = critic.x.select_rows(&rows);
    let wb: Vec<f64> = rows.iter().map(|&i| w[i]).collect();
    let ctx = critic.ctx.map(|c| c.select_rows(&rows));
    let (yp, ym) = model.f2_pair(&xb)?;
    let u: Vec<f64> = (0..rows.len()).map(|_| rng.random::<f64>()).collect();
    let mut tape = Tape::new();
    let b = model.bind_critic(&mut tape, true);
    let terms = model.critic_terms(&mut tape, &b, &yp, &ym, &wb, &u, ctx.as_ref())?;
    let objective = tape.value(terms.objective).item();
    let penalty = tape.value(terms.penalty).item();
    let loss = tape.scale(terms.objective, -1.0);
    let grads = b.gradients(&mut tape, loss).map_err(ModelError::from)?;
    adam.step(model.params_mut(), &grads).map_err(ModelError::from)?;
    Ok((objective, penalty))
}

/// `Σ ω_k (ŷ⁺_k − ŷ⁻_k)` with `ω = w / Σw`.
pub fn weighted_gap(yplus: &[f64], yminus: &[f64], w: &[f64]) -> f64 {
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    yplus
        .iter()
        .zip(yminus)
        .zip(w)
        .map(|((p, m), w)| w * (p - m))
        .sum::<f64>()
        / total
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

fn diverged(model: &mut StructuredModel, last_good: &ParamStore, epoch: usize, e: TrainError) -> TrainError {
    match e {
        TrainError::Model(ModelError::Nn(NnError::NonFiniteGradient { group })) => {
            *model.params_mut() = last_good.clone();
            TrainError::Diverged { epoch, cause: group }
        }
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProtocolConfig {
    pub repeats: usize,
    pub train_fraction: f64,
    pub seed: u64,
    pub tau: f64,
    pub wasserstein: WassersteinConfig,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            repeats: 5,
            train_fraction: 0.8,
            seed: 0,
            tau: 0.05,
            wasserstein: WassersteinConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProtocolError {
    #[error("repeats must be at least 1")]
    NoRepeats,
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Effects(#[from] EffectsError),
}

/// Everything one repetition produced. Row indices refer to the full dataset.
#[derive(Debug, Clone)]
pub struct Repetition {
    pub index: u64,
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
    /// Positions inside `train_rows` matching the counterfactual condition.
    pub eval_rows: Option<Vec<usize>>,
    pub model: StructuredModel,
    pub outcome: TrainOutcome,
    pub metrics: RepetitionMetrics,
}

/// All metrics for one trained model. Effects and diagnostics use the
/// training rows and `w`; the logistic regression is fit on the weighted
/// training rows and scored on `x_test`.
pub fn evaluate(
    model: &StructuredModel,
    x_train: &Matrix,
    w: &[f64],
    eval_rows: Option<&[usize]>,
    x_test: &Matrix,
    wasserstein: &WassersteinConfig,
    repetition: u64,
) -> Result<RepetitionMetrics, EffectsError> {
    let ones = alloc::vec![1.0; x_train.rows()];
    let accuracy = downstream_accuracy(model.graph(), model.encoding(), x_train, w, x_test)?;
    Ok(RepetitionMetrics {
        repetition,
        effect: mode_effect(model, x_train, w, eval_rows)?,
        effect_unweighted: mode_effect(model, x_train, &ones, eval_rows)?,
        discriminator_gap: discriminator_gap(model, x_train, w, eval_rows)?,
        wasserstein: wasserstein_distance(x_train, &ones, x_train, w, wasserstein)?,
        statistical_parity: statistical_parity(model.graph(), model.encoding(), x_train, w)?,
        accuracy: accuracy.accuracy,
        accuracy_converged: accuracy.converged,
    })
}

/// Split, encode, train and evaluate `protocol.repeats` times. Repetition
/// `r` uses split stream `r` and seeds offset by `r`.
pub fn repeat_protocol(
    graph: &CausalGraph,
    ds: &ColumnarDataset,
    pathset: &PathSet,
    model_config: &ModelConfig,
    train_config: &TrainConfig,
    protocol: &ProtocolConfig,
    clock: &dyn Clock,
) -> Result<(EffectReport, Vec<Repetition>), ProtocolError> {
    if protocol.repeats == 0 {
        return Err(ProtocolError::NoRepeats);
    }
    let mut reps = Vec::with_capacity(protocol.repeats);
    for r in 0..protocol.repeats as u64 {
        let (train_rows, test_rows) = SplitPlan::new(protocol.seed, protocol.train_fraction, r).split(ds.len());
        let encoding = Encoding::fit(graph, ds, &train_rows)?;
        let x_train = encoding.encode_rows(ds, &train_rows)?;
        let x_test = encoding.encode_rows(ds, &test_rows)?;
        let eval_rows = match pathset.mode() {
            EffectMode::Counterfactual => Some(ds.select_rows(&train_rows).rows_matching(graph, pathset.condition())?),
            _ => None,
        };
        let mut model = StructuredModel::new(graph.clone(), encoding, pathset.clone(), model_config.clone(), train_config.seed.wrapping_add(r))?;
        let config = TrainConfig {
            seed: train_config.seed.wrapping_add(r),
            ..train_config.clone()
        };
        let outcome = train(&mut model, &x_train, eval_rows.as_deref(), &config, clock)?;
        let wcfg = WassersteinConfig {
            seed: protocol.wasserstein.seed.wrapping_add(r),
            ..protocol.wasserstein.clone()
        };
        let metrics = evaluate(&model, &x_train, &outcome.weights.w, eval_rows.as_deref(), &x_test, &wcfg, r)?;
        reps.push(Repetition {
            index: r,
            train_rows,
            test_rows,
            eval_rows,
            model,
            outcome,
            metrics,
        });
    }
    let report = EffectReport::aggregate(pathset.mode(), protocol.tau, reps.iter().map(|r| r.metrics.clone()).collect());
    Ok((report, reps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Encoding;
    use crate::graph::{tests::fig2, CausalGraph, NodeSpec, PathSet};
    use crate::model::tests::fig2_data;
    use crate::model::ModelConfig;
    use crate::reweighter::check_feasibility;

    fn small_config() -> TrainConfig {
        TrainConfig {
            epochs: 3,
            batch_size: 64,
            eta0: 0.01,
            critic_steps_at_w_solve: 5,
            seed: 4,
            ..TrainConfig::default()
        }
    }

    fn setup(graph: CausalGraph, n: usize) -> (StructuredModel, Matrix) {
        let ds = fig2_data(n, 8);
        let rows: Vec<usize> = (0..n).collect();
        let enc = Encoding::fit(&graph, &ds, &rows).unwrap();
        let x = enc.encode(&ds).unwrap();
        let ps = PathSet::total(&graph);
        let config = ModelConfig {
            hidden: alloc::vec![8],
            critic_hidden: alloc::vec![8, 8],
            ..ModelConfig::default()
        };
        (StructuredModel::new(graph, enc, ps, config, 1).unwrap(), x)
    }

    #[test]
    fn progress_endpoints() {
        assert_eq!(progress(0, 300), 0.0);
        assert_eq!(progress(299, 300), 1.0);
        assert!((progress(150, 301) - 0.5).abs() < 1e-15);
        assert_eq!(progress(0, 1), 0.0);
    }

    #[test]
    fn validation() {
        let c = TrainConfig::default();
        assert!(c.validate(640).is_ok());
        assert!(matches!(c.validate(100), Err(TrainError::Config(_))));
        let c = TrainConfig { t_balance: 0.0, ..TrainConfig::default() };
        assert!(c.validate(1000).is_err());
    }

    #[test]
    fn deterministic_and_feasible() {
        let (mut a, x) = setup(fig2(), 256);
        let mut b = a.clone();
        let config = small_config();
        let ra = train(&mut a, &x, None, &config, &NoClock).unwrap();
        let rb = train(&mut b, &x, None, &config, &NoClock).unwrap();
        assert_eq!(ra.log, rb.log);
        assert!(ra.weights.w.iter().zip(&rb.weights.w).all(|(p, q)| p.to_bits() == q.to_bits()));
        assert_eq!(a.params(), b.params());
        assert_eq!(ra.log.epochs.len(), 3);
        assert!(check_feasibility(&ra.weights.w, config.t_balance).feasible());
        assert!(a.is_trained());
    }

    #[test]
    fn null_effect_keeps_unit_weights() {
        let g = CausalGraph::new(
            alloc::vec![NodeSpec::continuous("A"), NodeSpec::binary("S"), NodeSpec::continuous("B"), NodeSpec::binary("Y")],
            &[("A", "S"), ("S", "B"), ("A", "Y")],
            "S",
            "Y",
        )
        .unwrap();
        let (mut m, x) = setup(g, 128);
        let out = train(&mut m, &x, None, &small_config(), &NoClock).unwrap();
        assert!(out.weights.w.iter().all(|&w| w == 1.0));
        assert!(out.log.epochs.iter().all(|e| e.effect_estimate == 0.0));
    }

    #[test]
    fn fitting_reduces_loss() {
        let (mut m, x) = setup(fig2(), 256);
        let w = alloc::vec![1.0; x.rows()];
        let before = m.f1_loss_value(&x, &w).unwrap();
        let config = TrainConfig {
            epochs: 20,
            reweight: false,
            ..small_config()
        };
        let out = train(&mut m, &x, None, &config, &NoClock).unwrap();
        assert!(m.f1_loss_value(&x, &w).unwrap() < before);
        assert!(out.weights.w.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn tiny_balance_keeps_weights_near_one() {
        let (mut m, x) = setup(fig2(), 256);
        let t = 1e-6;
        let config = TrainConfig { t_balance: t, ..small_config() };
        let out = train(&mut m, &x, None, &config, &NoClock).unwrap();
        let bound = (t * x.rows() as f64).sqrt() + 1e-9;
        assert!(out.weights.w.iter().all(|w| (w - 1.0).abs() <= bound));
    }

    #[test]
    fn conditioned_subset_reweights_only_subset() {
        let (mut m, x) = setup(fig2(), 256);
        let subset: Vec<usize> = (0..256).filter(|i| i % 3 == 0).collect();
        let out = train(&mut m, &x, Some(&subset), &small_config(), &NoClock).unwrap();
        let inside: Vec<f64> = subset.iter().map(|&i| out.weights.w[i]).collect();
        assert!((inside.iter().sum::<f64>() - subset.len() as f64).abs() < 1e-6);
        assert!((0..256).filter(|i| i % 3 != 0).all(|i| out.weights.w[i] == 1.0));
        assert_eq!(train(&mut m, &x, Some(&[]), &small_config(), &NoClock).unwrap_err(), TrainError::EmptySubset);
    }

    #[test]
    fn sequential_schedule_runs() {
        let (mut m, x) = setup(fig2(), 256);
        let config = TrainConfig {
            step_schedule: StepSchedule::Sequential,
            ..small_config()
        };
        let out = train(&mut m, &x, None, &config, &NoClock).unwrap();
        assert!(out.log.epochs.iter().all(|e| e.critic_objective.is_finite()));
    }

    #[test]
    fn protocol_runs_each_repetition() {
        let g = fig2();
        let ds = fig2_data(300, 3);
        let model = ModelConfig {
            hidden: alloc::vec![8],
            critic_hidden: alloc::vec![8, 8],
            ..ModelConfig::default()
        };
        let protocol = ProtocolConfig {
            repeats: 2,
            wasserstein: WassersteinConfig {
                steps: 20,
                batch_size: 64,
                ..WassersteinConfig::default()
            },
            ..ProtocolConfig::default()
        };
        let (report, reps) = repeat_protocol(&g, &ds, &PathSet::total(&g), &model, &small_config(), &protocol, &NoClock).unwrap();
        assert_eq!(reps.len(), 2);
        assert_eq!(report.effect.values.len(), 2);
        for r in &reps {
            assert_eq!(r.train_rows.len(), 240);
            assert_eq!(r.outcome.weights.w.len(), 240);
            assert!(r.model.is_trained());
        }
        assert_ne!(reps[0].train_rows, reps[1].train_rows);
        let zero = ProtocolConfig { repeats: 0, ..protocol };
        assert_eq!(
            repeat_protocol(&g, &ds, &PathSet::total(&g), &model, &small_config(), &zero, &NoClock).unwrap_err(),
            ProtocolError::NoRepeats
        );
    }
}
