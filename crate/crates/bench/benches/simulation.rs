use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qnn_core::linalg::exp_hermitian;
use qnn_core::state::axis_states;
use qnn_core::tasks::autoencoder::{bell_inputs, build_autoencoder_task, OuterNeuron};
use qnn_core::tasks::landscape::Landscape;
use qnn_core::tasks::teleport::{build_teleport_task, teleport_network, teleport_oracle_params};
use qnn_core::training::{gradient_fd, GradientMode, NetworkObjective};
use qnn_core::unitary::{general_generator, Family, ParamUnitary};

fn gates(c: &mut Criterion) {
    let alpha: Vec<f64> = (0..64).map(|i| (i as f64 * 0.37).sin()).collect();
    let h = general_generator(&alpha, 3).unwrap();
    c.bench_function("exp_hermitian 8x8", |b| {
        b.iter(|| exp_hermitian(black_box(&h)).unwrap())
    });
    let neuron =
        ParamUnitary::new(Family::Neuron3, (0..32).map(|i| i as f64 * 0.1).collect()).unwrap();
    c.bench_function("neuron3 matrix", |b| {
        b.iter(|| black_box(&neuron).matrix().unwrap())
    });
}

fn networks(c: &mut Criterion) {
    let net = teleport_network()
        .unwrap()
        .assign_params(&teleport_oracle_params().unwrap())
        .unwrap();
    let psi = axis_states().swap_remove(4);
    c.bench_function("teleport output state", |b| {
        b.iter(|| net.output_state(black_box(&psi)).unwrap())
    });

    let task = build_teleport_task().unwrap();
    let params = task.network.flatten_params();
    c.bench_function("teleport forward gradient (6 inputs)", |b| {
        b.iter(|| {
            let obj = NetworkObjective::new(
                &task.network,
                &task.probes,
                &task.cost,
                task.sampler.examples(),
            )
            .unwrap();
            gradient_fd(&obj, black_box(&params), 1e-4, GradientMode::Forward).unwrap()
        })
    });

    let ae = build_autoencoder_task(bell_inputs(), true, OuterNeuron::General).unwrap();
    let p = ae.network.flatten_params();
    let one = &ae.sampler.examples()[..1];
    c.bench_function("autoencoder forward gradient (1 input)", |b| {
        b.iter(|| {
            let obj = NetworkObjective::new(&ae.network, &ae.probes, &ae.cost, one).unwrap();
            gradient_fd(&obj, black_box(&p), 1e-4, GradientMode::Forward).unwrap()
        })
    });

    let land = Landscape::new().unwrap();
    c.bench_function("landscape point", |b| {
        b.iter(|| land.cost(black_box(1.0), black_box(2.0)).unwrap())
    });
}

criterion_group!(benches, gates, networks);
criterion_main!(benches);
