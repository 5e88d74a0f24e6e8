//! Teleportation discovery.
//!
//! q0 carries |ψ⟩ (Alice), q1 and q2 start in |0⟩. U₁ on (q1, q2) prepares a
//! shared resource, U₂ on (q0, q1) is Alice's rotation, both of Alice's wires are
//! dephased in the Z basis (the classical channel), and U₃, a `Neuron3`
//! controlled by (q0, q1), corrects Bob's wire q2.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use super::{labels, Example, InputSampler, TrainingTask};
use crate::error::Result;
use crate::linalg::{log_unitary, tensor, ComplexMatrix};
use crate::network::{Network, NetworkBuilder};
use crate::state::axis_states;
use crate::training::CostSpec;
use crate::unitary::{
    build_general, fan_out_cnot_params, general_params_from_generator, Family, ParamUnitary,
};

pub const ALICE: usize = 0;
pub const BOB: usize = 2;

fn network(dephase: bool) -> Result<Network> {
    let general = || ParamUnitary::zeroed(Family::GeneralN { qubits: 2 });
    let mut b = NetworkBuilder::new(3)
        .inputs(&[ALICE])
        .outputs(&[BOB])
        .gate(general()?, &[1, 2], 0)
        .gate(general()?, &[0, 1], 1);
    if dephase {
        b = b.dephase(0).dephase(1);
    }
    b.gate(ParamUnitary::zeroed(Family::Neuron3)?, &[0, 1, BOB], 2)
        .build()
}

/// The untrained teleportation network (all parameters zero).
pub fn teleport_network() -> Result<Network> {
    network(true)
}

/// The same gates without the two dephasing channels.
pub fn coherent_teleport_network() -> Result<Network> {
    network(false)
}

/// Training task: inputs drawn uniformly from the six axis states, output on
/// Bob's wire compared to the input on σ₀..σ₃.
pub fn build_teleport_task() -> Result<TrainingTask> {
    let examples = axis_states().into_iter().map(Example::identity).collect();
    TrainingTask::new(
        "teleport",
        teleport_network()?,
        InputSampler::uniform(examples)?,
        CostSpec::match_all_paulis(1),
        Vec::new(),
        labels(&[
            (0, "Alice's input |psi>"),
            (1, "Alice's half of the resource"),
            (2, "Bob's output qubit 6"),
        ]),
    )
}

fn hadamard_first() -> ComplexMatrix {
    let h = FRAC_1_SQRT_2;
    tensor(
        &ComplexMatrix::from_real_rows(&[[h, h], [h, -h]]),
        &ComplexMatrix::identity(2),
    )
}

fn general_params_for(target: &ComplexMatrix) -> Result<Vec<f64>> {
    general_params_from_generator(&log_unitary(target)?, 2)
}

/// Parameters implementing the textbook protocol: U₁ = CNOT·(H⊗𝟙) makes a Bell
/// pair, U₂ = (H⊗𝟙)·CNOT rotates Alice's pair into the Bell basis, and U₃ applies
/// Z^a X^b to Bob's wire for outcome (a, b) on (q0, q1). Ordered like
/// [`Network::flatten_params`].
pub fn teleport_oracle_params() -> Result<Vec<f64>> {
    let cnot = build_general(&fan_out_cnot_params(), 2)?;
    let u1 = general_params_for(&cnot.mul(&hadamard_first()))?;
    let u2 = general_params_for(&hadamard_first().mul(&cnot))?;
    // V = 𝟙; T blocks in control order 00, 01, 10, 11 as exp(i Σ α σ).
    let v = [0.0; 16];
    let t_identity = [0.0; 4];
    let t_x = [-FRAC_PI_2, FRAC_PI_2, 0.0, 0.0];
    let t_z = [-FRAC_PI_2, 0.0, 0.0, FRAC_PI_2];
    // exp(i π/2 σ₂) = iσ₂ = σ₃σ₁
    let t_zx = [0.0, 0.0, FRAC_PI_2, 0.0];
    let mut params = u1;
    params.extend(u2);
    params.extend(v);
    for t in [t_identity, t_x, t_z, t_zx] {
        params.extend(t);
    }
    Ok(params)
}
