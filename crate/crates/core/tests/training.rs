use qnn_core::state::sample_haar_state;
use qnn_core::tasks::autoencoder::{build_autoencoder_task, OuterNeuron};
use qnn_core::tasks::teleport::build_teleport_task;
use qnn_core::training::{example_costs, train, GradientMode, TrainConfig};
use qnn_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn a_single_state_is_always_compressible() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for seed in 0..3 {
        let state = sample_haar_state(2, &mut rng).unwrap();
        let task = build_autoencoder_task(vec![state], false, OuterNeuron::General).unwrap();
        let cfg = TrainConfig {
            seed,
            cost_threshold: 1e-8,
            // Near the optimum the cost is quartic in the parameter error, so plain
            // descent slows to ~1/t; heavier momentum and unbiased central
            // differences get below 1e-6 within the default budget.
            gradient_mode: GradientMode::Central,
            momentum: 0.99,
            ..Default::default()
        };
        let out = train(&task, &cfg).unwrap();
        let cost = example_costs(&task, &out.network, task.sampler.examples()).unwrap()[0];
        assert!(cost < 1e-6, "seed {seed}: {cost}");
    }
}

#[test]
fn the_controlled_outer_form_also_compresses_a_product_state() {
    let task = build_autoencoder_task(
        vec![qnn_core::DensityMatrix::basis(2, 0b01).unwrap()],
        false,
        OuterNeuron::Neuron2,
    )
    .unwrap();
    assert_eq!(task.network.param_count(), 72);
    let out = train(&task, &TrainConfig::default()).unwrap();
    assert!(out.converged);
}

#[test]
fn same_seed_gives_identical_traces() {
    let task = build_teleport_task().unwrap();
    let cfg = TrainConfig {
        seed: 42,
        max_iterations: 200,
        ..Default::default()
    };
    let a = train(&task, &cfg).unwrap();
    let b = train(&task, &cfg).unwrap();
    assert_eq!(a.trace, b.trace);
    assert_eq!(a.network, b.network);
    let c = train(&task, &TrainConfig { seed: 43, ..cfg }).unwrap();
    assert_ne!(a.trace, c.trace);
}

#[test]
fn huge_learning_rate_is_reported_as_divergence() {
    let task = build_teleport_task().unwrap();
    let cfg = TrainConfig {
        eta: 1e9,
        momentum: 0.0,
        max_iterations: 50,
        ..Default::default()
    };
    match train(&task, &cfg) {
        // Periodic gates keep the cost bounded, so a wild step can only surface as
        // non-finite parameters; either way the run must not report success.
        Err(abort) => assert!(
            matches!(
                abort.error,
                Error::Diverged { .. } | Error::NonFinite { .. }
            ),
            "{abort}"
        ),
        Ok(out) => assert!(!out.converged),
    }
}

#[test]
fn invalid_config_is_rejected_before_training() {
    let task = build_teleport_task().unwrap();
    let cfg = TrainConfig {
        momentum: 1.5,
        ..Default::default()
    };
    let abort = train(&task, &cfg).unwrap_err();
    assert!(matches!(abort.error, Error::Config(_)));
    assert!(abort.trace.is_empty());
}
