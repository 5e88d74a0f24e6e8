//! Cost landscape of the two-parameter controlled-NOT family on the task
//! |+⟩|0⟩ → |+⟩|0⟩, |−⟩|0⟩ → |−⟩|1⟩.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{labels, Example, InputSampler, TrainingTask};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::network::{CompiledNetwork, Network, NetworkBuilder};
use crate::state::DensityMatrix;
use crate::training::{descent_step, eval_cost, gradient_fd, CostSpec, GradientMode};
use crate::unitary::{Family, ParamUnitary};

fn pure(amps: &[f64]) -> DensityMatrix {
    let v: Vec<C64> = amps.iter().map(|&a| C64::new(a, 0.0)).collect();
    DensityMatrix::from_pure(&v).expect("normalized")
}

/// Inputs on wire 0 with their desired two-wire outputs.
pub fn landscape_examples() -> Vec<Example> {
    let h = FRAC_1_SQRT_2;
    vec![
        Example {
            input: pure(&[h, h]),
            reference: pure(&[h, 0.0, h, 0.0]),
        },
        Example {
            input: pure(&[h, -h]),
            reference: pure(&[0.0, h, 0.0, -h]),
        },
    ]
}

pub fn landscape_network() -> Result<Network> {
    NetworkBuilder::new(2)
        .inputs(&[0])
        .outputs(&[0, 1])
        .gate(ParamUnitary::zeroed(Family::TwoParam)?, &[0, 1], 0)
        .build()
}

pub fn build_landscape_task() -> Result<TrainingTask> {
    TrainingTask::new(
        "landscape",
        landscape_network()?,
        InputSampler::uniform(landscape_examples())?,
        CostSpec::match_local_paulis(2),
        Vec::new(),
        labels(&[(0, "input qubit, carries |+> or |->"), (1, "dummy qubit")]),
    )
}

/// Summed cost over both task inputs at `(θ, φ)`.
#[derive(Debug, Clone)]
pub struct Landscape {
    task: TrainingTask,
}

impl Landscape {
    pub fn new() -> Result<Self> {
        Ok(Self {
            task: build_landscape_task()?,
        })
    }

    pub fn task(&self) -> &TrainingTask {
        &self.task
    }

    pub fn cost(&self, theta: f64, phi: f64) -> Result<f64> {
        let net = self.task.network.assign_params(&[theta, phi])?;
        let compiled = CompiledNetwork::new(&net, &[])?;
        let mut total = 0.0;
        for ex in self.task.sampler.examples() {
            total += eval_cost(
                &self.task.cost,
                &compiled.observe(&ex.input)?,
                Some(&ex.reference),
            )?;
        }
        Ok(total)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub theta: f64,
    pub phi: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathPoint {
    pub step: usize,
    pub theta: f64,
    pub phi: f64,
    pub cost: f64,
}

/// Descent settings for the path drawn over the landscape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathConfig {
    pub start: (f64, f64),
    pub eta: f64,
    pub momentum: f64,
    pub epsilon: f64,
    pub steps: usize,
    /// Stop early once the cost drops below this.
    pub stop_below: f64,
}

impl Default for PathConfig {
    fn default() -> Self {
        Self {
            start: (2.5, 2.5),
            eta: 0.05,
            momentum: 0.5,
            epsilon: 1e-6,
            steps: 2000,
            stop_below: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeScan {
    /// Row-major: θ varies slowest.
    pub grid: Vec<GridPoint>,
    pub path: Vec<PathPoint>,
}

impl LandscapeScan {
    pub fn minimum(&self) -> Option<GridPoint> {
        self.grid
            .iter()
            .copied()
            .min_by(|a, b| a.cost.total_cmp(&b.cost))
    }
}

/// Evaluates the cost on an evenly spaced grid over θ ∈ [0, π], φ ∈ [0, 2π]
/// (both endpoints included) and records a momentum-descent path.
pub fn landscape_scan(
    grid_theta: usize,
    grid_phi: usize,
    path: &PathConfig,
) -> Result<LandscapeScan> {
    if grid_theta < 2 || grid_phi < 2 {
        return Err(Error::Config(format!(
            "grid {grid_theta}x{grid_phi} needs at least 2 points per axis"
        )));
    }
    let land = Landscape::new()?;
    let points: Vec<(f64, f64)> = (0..grid_theta)
        .flat_map(|i| {
            let theta = PI * i as f64 / (grid_theta - 1) as f64;
            (0..grid_phi).map(move |j| (theta, 2.0 * PI * j as f64 / (grid_phi - 1) as f64))
        })
        .collect();
    let grid = points
        .par_iter()
        .map(|&(theta, phi)| {
            Ok(GridPoint {
                theta,
                phi,
                cost: land.cost(theta, phi)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LandscapeScan {
        grid,
        path: descent_path(&land, path)?,
    })
}

/// Momentum descent from `cfg.start`; records the point before every step and the final point.
pub fn descent_path(land: &Landscape, cfg: &PathConfig) -> Result<Vec<PathPoint>> {
    let objective = |w: &[f64]| land.cost(w[0], w[1]).unwrap_or(f64::NAN);
    let mut w = vec![cfg.start.0, cfg.start.1];
    let mut v = vec![0.0; 2];
    let mut path = Vec::new();
    for step in 0..=cfg.steps {
        let cost = land.cost(w[0], w[1])?;
        path.push(PathPoint {
            step,
            theta: w[0],
            phi: w[1],
            cost,
        });
        if step == cfg.steps || cost < cfg.stop_below {
            break;
        }
        let g = gradient_fd(&objective, &w, cfg.epsilon, GradientMode::Central)?;
        (w, v) = descent_step(&w, &g.grad, cfg.eta, cfg.momentum, &v);
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::tensor;
    use crate::pauli::PauliString;
    use crate::unitary::build_two_param;

    /// Dense oracle: U (ρ_in ⊗ |0⟩⟨0|) U†, then the six local expectation gaps.
    fn oracle_cost(theta: f64, phi: f64) -> f64 {
        let u = build_two_param(theta, phi);
        landscape_examples()
            .iter()
            .map(|ex| {
                let joint = tensor(ex.input.matrix(), DensityMatrix::zero(1).matrix());
                let out = u.mul(&joint).mul(&u.adjoint());
                let mut c = 0.0;
                for w in 0..2 {
                    for j in 1..=3 {
                        let p = PauliString::local(2, w, j).matrix();
                        let a = p.mul(&out).trace().re;
                        let d = ex
                            .reference
                            .expectation(&PauliString::local(2, w, j))
                            .unwrap();
                        c += (a - d).powi(2);
                    }
                }
                c
            })
            .sum()
    }

    #[test]
    fn analytic_minimum_is_zero() {
        let land = Landscape::new().unwrap();
        assert!(land.cost(PI / 2.0, 0.0).unwrap().abs() < 1e-12);
        assert!(land.cost(PI / 2.0, 2.0 * PI).unwrap().abs() < 1e-12);
    }

    #[test]
    fn matches_dense_oracle() {
        let land = Landscape::new().unwrap();
        for (t, p) in [(0.0, 0.0), (0.3, 1.1), (2.5, 2.5), (PI, 4.0), (1.2, 6.0)] {
            assert!((land.cost(t, p).unwrap() - oracle_cost(t, p)).abs() < 1e-12);
        }
        // θ = 0 is CNOT, which entangles |+⟩|0⟩: both marginals go fully mixed.
        // Gaps: σ₁ on wire 0 for each input, σ₃ on wire 1 for each input.
        assert!((land.cost(0.0, 0.0).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn scan_is_periodic_in_phi() {
        let scan = landscape_scan(
            11,
            21,
            &PathConfig {
                steps: 0,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(scan.grid.len(), 11 * 21);
        for i in 0..11 {
            let first = scan.grid[i * 21];
            let last = scan.grid[i * 21 + 20];
            assert_eq!(first.phi, 0.0);
            assert!((last.phi - 2.0 * PI).abs() < 1e-15);
            assert!((first.cost - last.cost).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_degenerate_grid() {
        assert!(landscape_scan(1, 5, &PathConfig::default()).is_err());
    }

    #[test]
    fn path_descends_to_zero() {
        let land = Landscape::new().unwrap();
        let path = descent_path(&land, &PathConfig::default()).unwrap();
        assert_eq!(path[0].theta, 2.5);
        assert!(path.last().unwrap().cost < 1e-4, "{:?}", path.last());
    }
}
