//! The experiments: quantum autoencoder, teleportation discovery, the two-parameter
//! cost landscape, and the classical special case.

pub mod autoencoder;
pub mod classical;
pub mod landscape;
pub mod teleport;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{Network, Probe};
use crate::state::DensityMatrix;
use crate::training::CostSpec;

/// One training input and the state whose expectations the output should reproduce.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub input: DensityMatrix,
    pub reference: DensityMatrix,
}

impl Example {
    /// The output should reproduce the input itself.
    pub fn identity(input: DensityMatrix) -> Self {
        Self {
            reference: input.clone(),
            input,
        }
    }
}

/// Picks training examples i.i.d. uniformly from a fixed list.
#[derive(Debug, Clone)]
pub struct InputSampler {
    examples: Vec<Example>,
}

impl InputSampler {
    pub fn uniform(examples: Vec<Example>) -> Result<Self> {
        if examples.is_empty() {
            return Err(Error::Config("input set is empty".into()));
        }
        Ok(Self { examples })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &Example {
        &self.examples[rng.random_range(0..self.examples.len())]
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }
}

/// Maps a register wire to its conventional display label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WireLabel {
    pub wire: usize,
    pub label: String,
}

pub(crate) fn labels(pairs: &[(usize, &str)]) -> Vec<WireLabel> {
    pairs
        .iter()
        .map(|&(wire, label)| WireLabel {
            wire,
            label: label.to_string(),
        })
        .collect()
}

/// A network template with its inputs, cost and reporting metadata.
#[derive(Debug, Clone)]
pub struct TrainingTask {
    pub name: String,
    pub network: Network,
    pub sampler: InputSampler,
    pub cost: CostSpec,
    pub probes: Vec<Probe>,
    pub label_map: Vec<WireLabel>,
}

impl TrainingTask {
    pub fn new(
        name: &str,
        network: Network,
        sampler: InputSampler,
        cost: CostSpec,
        probes: Vec<Probe>,
        label_map: Vec<WireLabel>,
    ) -> Result<Self> {
        let inputs = network.input_wires().len();
        let outputs = network.output_wires().len();
        for ex in sampler.examples() {
            if ex.input.num_qubits() != inputs {
                return Err(Error::Dimension(format!(
                    "{}-qubit example for a network with {inputs} inputs",
                    ex.input.num_qubits()
                )));
            }
            if ex.reference.num_qubits() != outputs {
                return Err(Error::Dimension(format!(
                    "{}-qubit reference for a network with {outputs} outputs",
                    ex.reference.num_qubits()
                )));
            }
        }
        if let Some(k) = cost.max_probe() {
            if k >= probes.len() {
                return Err(Error::Config(format!(
                    "cost refers to probe {k} but only {} exist",
                    probes.len()
                )));
            }
        }
        Ok(Self {
            name: name.to_string(),
            network,
            sampler,
            cost,
            probes,
            label_map,
        })
    }
}
