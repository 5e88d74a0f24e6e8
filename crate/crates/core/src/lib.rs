//! Quantum feedforward neural networks simulated exactly on density matrices.
//!
//! A [`Network`] is a list of parameterized unitaries and Z-dephasing channels on a
//! register of qubits. Wire 0 is the most significant bit everywhere. Training
//! minimizes a Pauli-expectation cost with finite-difference momentum descent.
//!
//! ```
//! use qnn_core::tasks::teleport::{teleport_network, teleport_oracle_params};
//! use qnn_core::state::axis_states;
//!
//! let net = teleport_network()?.assign_params(&teleport_oracle_params()?)?;
//! let plus = &axis_states()[2];
//! let bob = net.output_state(plus)?;
//! assert!(bob.matrix().max_abs_diff(plus.matrix()) < 1e-10);
//! # Ok::<(), qnn_core::Error>(())
//! ```

pub mod error;
pub mod linalg;
pub mod network;
pub mod pauli;
pub mod state;
pub mod tasks;
pub mod training;
pub mod unitary;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use network::{
    CompiledNetwork, Element, GatePlacement, Network, NetworkBuilder, Observed, Probe,
};
pub use pauli::PauliString;
pub use state::DensityMatrix;
pub use tasks::{Example, InputSampler, TrainingTask};
pub use training::{CostSpec, CostTerm, GradientMode, TrainConfig};
pub use unitary::{Family, ParamUnitary};
