use fairweight_core::effects::WassersteinConfig;
use fairweight_core::graph::PathSet;
use fairweight_core::model::ModelConfig;
use fairweight_core::reweighter::{check_feasibility, solve_weights, CriticGap, WeightVector};
use fairweight_core::synth;
use fairweight_core::trainer::{repeat_protocol, NoClock, ProtocolConfig, TrainConfig};
use proptest::prelude::*;

fn small() -> (ModelConfig, TrainConfig, ProtocolConfig) {
    let model = ModelConfig {
        hidden: vec![8],
        critic_hidden: vec![8, 8],
        ..ModelConfig::default()
    };
    let train = TrainConfig {
        epochs: 3,
        batch_size: 64,
        eta0: 0.05,
        critic_steps_at_w_solve: 5,
        ..TrainConfig::default()
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
    (model, train, protocol)
}

#[test]
fn benchmark_protocol_is_deterministic_and_feasible() {
    let scm = synth::benchmark();
    let g = scm.graph();
    let ds = scm.generate(600, 9);
    let (model, train, protocol) = small();
    let pi = PathSet::total(g);
    let (ra, reps_a) = repeat_protocol(g, &ds, &pi, &model, &train, &protocol, &NoClock).unwrap();
    let (rb, reps_b) = repeat_protocol(g, &ds, &pi, &model, &train, &protocol, &NoClock).unwrap();
    assert_eq!(ra.effect.values.len(), 2);
    for (a, b) in reps_a.iter().zip(&reps_b) {
        assert_eq!(a.train_rows, b.train_rows);
        let bits = |w: &[f64]| w.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.outcome.weights.w), bits(&b.outcome.weights.w));
        assert!(check_feasibility(&a.outcome.weights.w, train.t_balance).feasible());
    }
    assert_eq!(ra.effect.values, rb.effect.values);
    assert!(ra.effect_unweighted.values.iter().all(|v| v.is_finite()));
}

proptest! {
    #[test]
    fn solved_weights_beat_uniform(d in prop::collection::vec(-5.0f64..5.0, 2..60), t in 0.01f64..3.0) {
        let gap = CriticGap::new(d.clone()).unwrap();
        let w = solve_weights(&gap, t).unwrap();
        prop_assert!(check_feasibility(&w.w, t).feasible());
        let uniform = WeightVector::ones(d.len(), t).objective(&d);
        prop_assert!(w.objective(&d) <= uniform + 1e-9 * d.len() as f64);
    }
}
