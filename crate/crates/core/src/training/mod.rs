//! Cost evaluation and gradient-descent training of network parameters.

pub mod cost;
pub mod optimizer;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{CompiledNetwork, Network, Probe, Trajectory};
use crate::tasks::{Example, TrainingTask};

pub use cost::{classical_cost, eval_cost, eval_output_cost, CostSpec, CostTerm, Site, Target};
pub use optimizer::{descent_step, gradient_fd, Gradient, GradientMode, Objective};

/// Costs above this are treated as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e6;

/// Gradient-descent hyperparameters. Every run is seeded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub eta: f64,
    pub epsilon: f64,
    pub momentum: f64,
    pub max_iterations: usize,
    /// Stop once the running average of the per-step cost drops below this.
    pub cost_threshold: f64,
    /// Number of steps in the running average.
    pub window: usize,
    pub seed: u64,
    pub gradient_mode: GradientMode,
    /// Initial parameters are drawn uniformly from `[-init_range, init_range]`.
    pub init_range: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            eta: 0.01,
            epsilon: 1e-4,
            momentum: 0.9,
            max_iterations: 20_000,
            cost_threshold: 1e-4,
            window: 50,
            seed: 0,
            gradient_mode: GradientMode::Forward,
            init_range: 1.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return bad(format!("eta = {} must be a non-negative number", self.eta));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon = {} must be positive", self.epsilon));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return bad(format!("momentum = {} must lie in [0, 1)", self.momentum));
        }
        if self.window == 0 {
            return bad("window must be at least 1".into());
        }
        if !(self.cost_threshold >= 0.0 && self.cost_threshold.is_finite()) {
            return bad(format!(
                "cost threshold {} must be non-negative",
                self.cost_threshold
            ));
        }
        if !(self.init_range >= 0.0 && self.init_range.is_finite()) {
            return bad(format!(
                "init range {} must be non-negative",
                self.init_range
            ));
        }
        Ok(())
    }
}

/// Mean cost of a network over a fixed set of examples, with cheap single-coordinate shifts.
pub struct NetworkObjective<'a> {
    compiled: CompiledNetwork,
    cost: &'a CostSpec,
    probes: &'a [Probe],
    samples: Vec<(&'a Example, Trajectory)>,
    base: Vec<f64>,
}

impl<'a> NetworkObjective<'a> {
    pub fn new(
        network: &Network,
        probes: &'a [Probe],
        cost: &'a CostSpec,
        examples: &'a [Example],
    ) -> Result<Self> {
        let compiled = CompiledNetwork::new(network, probes)?;
        let samples = examples
            .iter()
            .map(|ex| Ok((ex, compiled.trajectory(&ex.input)?)))
            .collect::<Result<_>>()?;
        Ok(Self {
            compiled,
            cost,
            probes,
            samples,
            base: network.flatten_params(),
        })
    }

    pub fn params(&self) -> &[f64] {
        &self.base
    }

    /// Cost at the compiled parameters.
    pub fn base_value(&self) -> Result<f64> {
        self.mean(|(ex, traj)| eval_cost(self.cost, traj.observed(), Some(&ex.reference)))
    }

    fn mean(&self, f: impl Fn(&(&'a Example, Trajectory)) -> Result<f64>) -> Result<f64> {
        let mut total = 0.0;
        for s in &self.samples {
            total += f(s)?;
        }
        Ok(total / self.samples.len() as f64)
    }
}

impl Objective for NetworkObjective<'_> {
    fn value(&self, params: &[f64]) -> Result<f64> {
        if params == self.base.as_slice() {
            return self.base_value();
        }
        let net = self.compiled.network().assign_params(params)?;
        let compiled = CompiledNetwork::new(&net, self.probes)?;
        self.mean(|(ex, _)| {
            eval_cost(
                self.cost,
                &compiled.observe(&ex.input)?,
                Some(&ex.reference),
            )
        })
    }

    fn value_shifted(&self, params: &[f64], index: usize, delta: f64) -> Result<f64> {
        if params != self.base.as_slice() {
            let mut p = params.to_vec();
            p[index] += delta;
            return self.value(&p);
        }
        let value = params[index] + delta;
        self.mean(|(ex, traj)| {
            let observed = self.compiled.observe_with_param(traj, index, value)?;
            eval_cost(self.cost, &observed, Some(&ex.reference))
        })
    }
}

/// Per-example costs of `network` on `task`'s cost function.
pub fn example_costs(
    task: &TrainingTask,
    network: &Network,
    examples: &[Example],
) -> Result<Vec<f64>> {
    let compiled = CompiledNetwork::new(network, &task.probes)?;
    examples
        .iter()
        .map(|ex| {
            eval_cost(
                &task.cost,
                &compiled.observe(&ex.input)?,
                Some(&ex.reference),
            )
        })
        .collect()
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub network: Network,
    /// Cost of the sampled example at each iteration, before the update.
    pub trace: Vec<f64>,
    /// True when the running average dropped below the threshold.
    pub converged: bool,
}

impl TrainOutcome {
    /// Mean of the last `window` trace entries.
    pub fn running_average(&self, window: usize) -> Option<f64> {
        running_average(&self.trace, window)
    }
}

/// A run that stopped on an error, with everything recorded up to that point.
#[derive(Debug, Clone)]
pub struct TrainAbort {
    pub error: Error,
    pub trace: Vec<f64>,
    pub network: Box<Network>,
}

impl std::fmt::Display for TrainAbort {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} after {} iterations", self.error, self.trace.len())
    }
}

impl std::error::Error for TrainAbort {}

fn running_average(trace: &[f64], window: usize) -> Option<f64> {
    if trace.len() < window || window == 0 {
        return None;
    }
    let tail = &trace[trace.len() - window..];
    Some(tail.iter().sum::<f64>() / window as f64)
}

/// Draws uniform initial parameters from the seeded generator, then trains.
pub fn train(
    task: &TrainingTask,
    cfg: &TrainConfig,
) -> std::result::Result<TrainOutcome, TrainAbort> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = task.network.param_count();
    let r = cfg.init_range;
    let init: Vec<f64> = (0..n)
        .map(|_| {
            if r > 0.0 {
                rng.random_range(-r..=r)
            } else {
                0.0
            }
        })
        .collect();
    train_from(task, cfg, &init, &mut rng)
}

/// Gradient descent from `init`: each iteration samples one example, takes a
/// finite-difference gradient of its cost and applies one momentum step.
pub fn train_from<R: Rng>(
    task: &TrainingTask,
    cfg: &TrainConfig,
    init: &[f64],
    rng: &mut R,
) -> std::result::Result<TrainOutcome, TrainAbort> {
    let template = &task.network;
    let abort = |error: Error, trace: Vec<f64>, network: Network| TrainAbort {
        error,
        trace,
        network: Box::new(network),
    };
    if let Err(e) = cfg.validate() {
        return Err(abort(e, Vec::new(), template.clone()));
    }
    let mut network = match template.assign_params(init) {
        Ok(n) => n,
        Err(e) => return Err(abort(e, Vec::new(), template.clone())),
    };
    let mut params = init.to_vec();
    let mut velocity = vec![0.0; params.len()];
    let mut trace = Vec::new();
    let mut converged = false;

    for iteration in 0..cfg.max_iterations {
        let example = task.sampler.sample(rng);
        let step = (|| -> Result<(f64, Vec<f64>)> {
            let examples = std::slice::from_ref(example);
            let objective = NetworkObjective::new(&network, &task.probes, &task.cost, examples)?;
            let g = gradient_fd(&objective, &params, cfg.epsilon, cfg.gradient_mode)?;
            let cost = match g.base {
                Some(c) => c,
                None => objective.base_value()?,
            };
            Ok((cost, g.grad))
        })();
        let (cost, grad) = match step {
            Ok(v) => v,
            Err(e) => return Err(abort(e, trace, network)),
        };
        if !cost.is_finite() || cost > DIVERGENCE_LIMIT {
            return Err(abort(Error::Diverged { iteration, cost }, trace, network));
        }
        trace.push(cost);
        if running_average(&trace, cfg.window).is_some_and(|avg| avg < cfg.cost_threshold) {
            converged = true;
            break;
        }
        let (p, v) = descent_step(&params, &grad, cfg.eta, cfg.momentum, &velocity);
        if p.iter().any(|x| !x.is_finite()) {
            return Err(abort(Error::NonFinite { index: None }, trace, network));
        }
        params = p;
        velocity = v;
        network = match network.assign_params(&params) {
            Ok(n) => n,
            Err(e) => return Err(abort(e, trace, network)),
        };
    }

    Ok(TrainOutcome {
        network,
        trace,
        converged,
    })
}

/// Full-batch momentum descent on the mean cost over `examples`. Deterministic given `init`.
pub fn descend_full_batch(
    task: &TrainingTask,
    examples: &[Example],
    init: &[f64],
    cfg: &TrainConfig,
) -> Result<(Network, f64)> {
    cfg.validate()?;
    let mut network = task.network.assign_params(init)?;
    let mut params = init.to_vec();
    let mut velocity = vec![0.0; params.len()];
    for _ in 0..cfg.max_iterations {
        let objective = NetworkObjective::new(&network, &task.probes, &task.cost, examples)?;
        let g = gradient_fd(&objective, &params, cfg.epsilon, cfg.gradient_mode)?;
        (params, velocity) = descent_step(&params, &g.grad, cfg.eta, cfg.momentum, &velocity);
        network = network.assign_params(&params)?;
    }
    let final_cost =
        NetworkObjective::new(&network, &task.probes, &task.cost, examples)?.base_value()?;
    Ok((network, final_cost))
}
