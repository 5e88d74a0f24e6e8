//! Run settings: one flat schema shared by every command.
//!
//! Values are resolved as defaults, then the optional TOML file, then flags.

use std::path::Path;

use clap::ValueEnum;
use qnn_core::tasks::autoencoder::{
    bell_inputs, non_orthogonal_inputs, orthogonal_product_inputs, OuterNeuron,
};
use qnn_core::{DensityMatrix, GradientMode, TrainConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum InputSet {
    /// (|00> + |11>)/√2 and (|00> - |11>)/√2
    Bell,
    /// |00> and |01>
    Orthogonal,
    /// |00> and (|00> + |01>)/√2
    NonOrthogonal,
}

impl InputSet {
    pub fn states(self) -> Vec<DensityMatrix> {
        match self {
            InputSet::Bell => bell_inputs(),
            InputSet::Orthogonal => orthogonal_product_inputs(),
            InputSet::NonOrthogonal => non_orthogonal_inputs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub seed: u64,
    pub eta: f64,
    pub epsilon: f64,
    pub momentum: f64,
    pub max_iterations: usize,
    pub cost_threshold: f64,
    pub window: usize,
    pub gradient_mode: GradientMode,
    pub init_range: f64,

    pub inputs: InputSet,
    pub diagonality_penalty: bool,
    pub outer_neuron: OuterNeuron,

    /// Haar-random states used to evaluate teleportation.
    pub eval_samples: usize,
    pub eval_seed: u64,

    pub grid_theta: usize,
    pub grid_phi: usize,
    pub path_theta: f64,
    pub path_phi: f64,
    pub path_eta: f64,
    pub path_momentum: f64,
    pub path_steps: usize,

    /// Random weight sets checked in addition to OR and AND.
    pub random_sets: usize,
}

impl Default for Settings {
    fn default() -> Self {
        let t = TrainConfig::default();
        let p = qnn_core::tasks::landscape::PathConfig::default();
        Self {
            seed: t.seed,
            eta: t.eta,
            epsilon: t.epsilon,
            momentum: t.momentum,
            max_iterations: t.max_iterations,
            cost_threshold: t.cost_threshold,
            window: t.window,
            gradient_mode: t.gradient_mode,
            init_range: t.init_range,
            inputs: InputSet::Bell,
            diagonality_penalty: false,
            outer_neuron: OuterNeuron::default(),
            eval_samples: 1000,
            eval_seed: 2017,
            grid_theta: 101,
            grid_phi: 101,
            path_theta: p.start.0,
            path_phi: p.start.1,
            path_eta: p.eta,
            path_momentum: p.momentum,
            path_steps: p.steps,
            random_sets: 100,
        }
    }
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            eta: self.eta,
            epsilon: self.epsilon,
            momentum: self.momentum,
            max_iterations: self.max_iterations,
            cost_threshold: self.cost_threshold,
            window: self.window,
            seed: self.seed,
            gradient_mode: self.gradient_mode,
            init_range: self.init_range,
        }
    }

    pub fn path_config(&self) -> qnn_core::tasks::landscape::PathConfig {
        qnn_core::tasks::landscape::PathConfig {
            start: (self.path_theta, self.path_phi),
            eta: self.path_eta,
            momentum: self.path_momentum,
            steps: self.path_steps,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        self.train_config().validate().map_err(|e| e.to_string())?;
        if self.eval_samples == 0 {
            return Err("eval_samples must be at least 1".into());
        }
        if self.grid_theta < 2 || self.grid_phi < 2 {
            return Err(format!(
                "grid {}x{} needs at least 2 points per axis",
                self.grid_theta, self.grid_phi
            ));
        }
        if !(0.0..1.0).contains(&self.path_momentum) {
            return Err(format!(
                "path_momentum = {} must lie in [0, 1)",
                self.path_momentum
            ));
        }
        if !(self.path_eta >= 0.0 && self.path_eta.is_finite()) {
            return Err(format!(
                "path_eta = {} must be a non-negative number",
                self.path_eta
            ));
        }
        if !(self.path_theta.is_finite() && self.path_phi.is_finite()) {
            return Err("path start must be finite".into());
        }
        Ok(())
    }
}
