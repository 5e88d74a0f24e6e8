//! Two-qubit autoencoder with a one-qubit bottleneck.
//!
//! Wires: q0, q1 carry the input; U₁ (`Neuron3`) compresses them into q2;
//! a fan-out U_F copies the bottleneck information onto q3; the outer neurons
//! U₂ on (q2, q4) and U₃ on (q3, q5) decode into the outputs q4, q5.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{labels, Example, InputSampler, TrainingTask};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::network::{Network, NetworkBuilder, Probe};
use crate::pauli::PauliString;
use crate::state::DensityMatrix;
use crate::training::{descend_full_batch, CostSpec, CostTerm, Site, Target, TrainConfig};
use crate::unitary::{Family, ParamUnitary};

/// Form of the two decoding neurons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterNeuron {
    /// Controlled form. Leaves q4 and q5 in a separable state, so entangled
    /// inputs cannot be reproduced exactly.
    Neuron2,
    /// Unrestricted two-qubit unitary.
    #[default]
    General,
}

impl OuterNeuron {
    fn family(self) -> Family {
        match self {
            OuterNeuron::Neuron2 => Family::Neuron2,
            OuterNeuron::General => Family::GeneralN { qubits: 2 },
        }
    }
}

impl std::str::FromStr for OuterNeuron {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "neuron2" => Ok(Self::Neuron2),
            "general" => Ok(Self::General),
            other => Err(Error::Config(format!("unknown outer neuron {other:?}"))),
        }
    }
}

/// Wire holding the compressed state.
pub const BOTTLENECK: usize = 2;

fn pure(amps: [f64; 4]) -> DensityMatrix {
    let v: Vec<C64> = amps.iter().map(|&a| C64::new(a, 0.0)).collect();
    DensityMatrix::from_pure(&v).expect("normalized")
}

/// (|00⟩ + |11⟩)/√2 and (|00⟩ − |11⟩)/√2.
pub fn bell_inputs() -> Vec<DensityMatrix> {
    let h = FRAC_1_SQRT_2;
    vec![pure([h, 0.0, 0.0, h]), pure([h, 0.0, 0.0, -h])]
}

/// |00⟩ and |01⟩.
pub fn orthogonal_product_inputs() -> Vec<DensityMatrix> {
    vec![pure([1.0, 0.0, 0.0, 0.0]), pure([0.0, 1.0, 0.0, 0.0])]
}

/// |00⟩ and (|00⟩ + |01⟩)/√2.
pub fn non_orthogonal_inputs() -> Vec<DensityMatrix> {
    let h = FRAC_1_SQRT_2;
    vec![pure([1.0, 0.0, 0.0, 0.0]), pure([h, h, 0.0, 0.0])]
}

/// The untrained 6-wire network (all parameters zero).
pub fn autoencoder_network(outer: OuterNeuron) -> Result<Network> {
    NetworkBuilder::new(6)
        .inputs(&[0, 1])
        .outputs(&[4, 5])
        .gate(
            ParamUnitary::zeroed(Family::Neuron3)?,
            &[0, 1, BOTTLENECK],
            1,
        )
        .gate(ParamUnitary::zeroed(Family::FanOut2)?, &[BOTTLENECK, 3], 2)
        .gate(ParamUnitary::zeroed(outer.family())?, &[BOTTLENECK, 4], 3)
        .gate(ParamUnitary::zeroed(outer.family())?, &[3, 5], 3)
        .build()
}

/// Autoencoder task: the output pair should reproduce every expectation of the
/// input pair. With `diagonality_penalty`, the bottleneck's ⟨σ₁⟩ and ⟨σ₂⟩ right
/// after U₁ are also driven to zero.
pub fn build_autoencoder_task(
    inputs: Vec<DensityMatrix>,
    diagonality_penalty: bool,
    outer: OuterNeuron,
) -> Result<TrainingTask> {
    if let Some(bad) = inputs.iter().find(|s| s.num_qubits() != 2) {
        return Err(Error::Dimension(format!(
            "autoencoder inputs are 2-qubit states, got {} qubits",
            bad.num_qubits()
        )));
    }
    let network = autoencoder_network(outer)?;
    let mut cost = CostSpec::match_all_paulis(2);
    let mut probes = Vec::new();
    if diagonality_penalty {
        probes.push(Probe {
            after: 0,
            wires: vec![BOTTLENECK],
        });
        for j in [1, 2] {
            cost.push(CostTerm {
                site: Site::Probe(0),
                pauli: PauliString::single(j),
                target: Target::Value(0.0),
                weight: 1.0,
            })?;
        }
    }
    let examples = inputs.into_iter().map(Example::identity).collect();
    TrainingTask::new(
        "autoencoder",
        network,
        InputSampler::uniform(examples)?,
        cost,
        probes,
        labels(&[
            (0, "input qubit 1 of |in12>"),
            (1, "input qubit 2 of |in12>"),
            (2, "bottleneck (output of U1)"),
            (3, "fan-out dummy"),
            (4, "output qubit 6"),
            (5, "output qubit 8"),
        ]),
    )
}

/// Bottleneck state right after U₁ for each input.
pub fn bottleneck_states(
    network: &Network,
    inputs: &[DensityMatrix],
) -> Result<Vec<DensityMatrix>> {
    let probes = [Probe {
        after: 0,
        wires: vec![BOTTLENECK],
    }];
    let compiled = crate::network::CompiledNetwork::new(network, &probes)?;
    inputs
        .iter()
        .map(|s| Ok(compiled.observe(s)?.probes.swap_remove(0)))
        .collect()
}

/// Lowest mean cost over `task`'s input set found by full-batch descent from
/// `restarts` seeded random starting points. An empirical bound on what any
/// training run can reach.
pub fn multi_restart_bound(task: &TrainingTask, restarts: usize, cfg: &TrainConfig) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let examples = task.sampler.examples();
    let n = task.network.param_count();
    let mut best = f64::INFINITY;
    for _ in 0..restarts {
        let init: Vec<f64> = (0..n)
            .map(|_| rng.random_range(-cfg.init_range..=cfg.init_range))
            .collect();
        let (_, cost) = descend_full_batch(task, examples, &init, cfg)?;
        best = best.min(cost);
    }
    Ok(best)
}
