//! Finite-difference gradients and momentum gradient descent.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMode {
    /// `(C(w + ε) − C(w)) / ε`
    #[default]
    Forward,
    /// `(C(w + ε) − C(w − ε)) / 2ε`
    Central,
}

impl std::str::FromStr for GradientMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forward" => Ok(Self::Forward),
            "central" => Ok(Self::Central),
            other => Err(Error::Config(format!("unknown gradient mode {other:?}"))),
        }
    }
}

/// A scalar function of a parameter vector.
///
/// `value_shifted` lets implementations reuse work when only one coordinate moves;
/// the default copies the vector.
pub trait Objective: Sync {
    fn value(&self, params: &[f64]) -> Result<f64>;

    fn value_shifted(&self, params: &[f64], index: usize, delta: f64) -> Result<f64> {
        let mut p = params.to_vec();
        p[index] += delta;
        self.value(&p)
    }
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn value(&self, params: &[f64]) -> Result<f64> {
        Ok(self(params))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub grad: Vec<f64>,
    /// `C(w)`, available in forward mode.
    pub base: Option<f64>,
    /// Number of objective evaluations performed.
    pub evaluations: usize,
}

/// Component-wise finite-difference gradient. Forward mode evaluates the objective
/// `1 + P` times, central mode `2P` times. Evaluations run in parallel; results are
/// combined in index order so the output does not depend on the thread count.
pub fn gradient_fd<O: Objective + ?Sized>(
    objective: &O,
    params: &[f64],
    epsilon: f64,
    mode: GradientMode,
) -> Result<Gradient> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Config(format!(
            "finite-difference step {epsilon} must be positive"
        )));
    }
    let finite = |v: f64, index: Option<usize>| {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { index })
        }
    };
    let p = params.len();
    match mode {
        GradientMode::Forward => {
            let base = finite(objective.value(params)?, None)?;
            let grad = (0..p)
                .into_par_iter()
                .map(|i| {
                    let shifted = finite(objective.value_shifted(params, i, epsilon)?, Some(i))?;
                    Ok((shifted - base) / epsilon)
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(Gradient {
                grad,
                base: Some(base),
                evaluations: p + 1,
            })
        }
        GradientMode::Central => {
            let grad = (0..p)
                .into_par_iter()
                .map(|i| {
                    let up = finite(objective.value_shifted(params, i, epsilon)?, Some(i))?;
                    let down = finite(objective.value_shifted(params, i, -epsilon)?, Some(i))?;
                    Ok((up - down) / (2.0 * epsilon))
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(Gradient {
                grad,
                base: None,
                evaluations: 2 * p,
            })
        }
    }
}

/// One momentum step: `v' = μ v − η g`, `w' = w + v'`.
pub fn descent_step(
    params: &[f64],
    grad: &[f64],
    eta: f64,
    momentum: f64,
    velocity: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(params.len(), grad.len());
    assert_eq!(params.len(), velocity.len());
    let velocity: Vec<f64> = velocity
        .iter()
        .zip(grad)
        .map(|(&v, &g)| momentum * v - eta * g)
        .collect();
    let params = params.iter().zip(&velocity).map(|(&w, &v)| w + v).collect();
    (params, velocity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn norm_sq(w: &[f64]) -> f64 {
        w.iter().map(|x| x * x).sum()
    }

    #[test]
    fn constant_objective_has_zero_gradient() {
        let g = gradient_fd(
            &|_: &[f64]| 3.0,
            &[0.1, 0.2, 0.3],
            1e-4,
            GradientMode::Forward,
        )
        .unwrap();
        assert_eq!(g.grad, vec![0.0; 3]);
        assert_eq!(g.base, Some(3.0));
    }

    #[test]
    fn forward_difference_on_quadratic() {
        let eps = 1e-3;
        let g = gradient_fd(&norm_sq, &[1.0, 0.0], eps, GradientMode::Forward).unwrap();
        // ((1+ε)² − 1)/ε = 2 + ε, (ε² − 0)/ε = ε
        assert!((g.grad[0] - (2.0 + eps)).abs() < 1e-9);
        assert!((g.grad[1] - eps).abs() < 1e-9);
    }

    #[test]
    fn central_difference_is_exact_on_quadratic() {
        let w = [1.0, -0.5, 2.0];
        let g = gradient_fd(&norm_sq, &w, 1e-3, GradientMode::Central).unwrap();
        for (gi, wi) in g.grad.iter().zip(w) {
            assert!((gi - 2.0 * wi).abs() <= 1e-10);
        }
    }

    #[test]
    fn evaluation_counts() {
        let calls = AtomicUsize::new(0);
        let f = |w: &[f64]| {
            calls.fetch_add(1, Ordering::SeqCst);
            norm_sq(w)
        };
        let g = gradient_fd(&f, &[0.0; 5], 1e-4, GradientMode::Forward).unwrap();
        assert_eq!((g.evaluations, calls.swap(0, Ordering::SeqCst)), (6, 6));
        let g = gradient_fd(&f, &[0.0; 5], 1e-4, GradientMode::Central).unwrap();
        assert_eq!((g.evaluations, calls.load(Ordering::SeqCst)), (10, 10));
    }

    #[test]
    fn non_finite_cost_aborts() {
        let f = |w: &[f64]| if w[1] > 0.0 { f64::NAN } else { 0.0 };
        let err = gradient_fd(&f, &[0.0, 0.0], 1e-4, GradientMode::Forward).unwrap_err();
        assert_eq!(err, Error::NonFinite { index: Some(1) });
        assert!(gradient_fd(&f, &[0.0], 0.0, GradientMode::Forward).is_err());
    }

    #[test]
    fn descent_step_rules() {
        let (p, v) = descent_step(&[1.0, 2.0], &[5.0, -5.0], 0.0, 0.0, &[0.0, 0.0]);
        assert_eq!((p, v), (vec![1.0, 2.0], vec![0.0, 0.0]));
        let (p, _) = descent_step(&[1.0, 2.0], &[5.0, -5.0], 0.1, 0.0, &[3.0, 3.0]);
        assert_eq!(p, vec![0.5, 2.5]);
        let (p, v) = descent_step(&[0.0], &[1.0], 0.1, 0.5, &[1.0]);
        assert_eq!(v, vec![0.4]);
        assert_eq!(p, vec![0.4]);
    }

    #[test]
    fn plain_descent_is_monotone_on_convex_quadratic() {
        let f = |w: &[f64]| 3.0 * w[0] * w[0] + 0.5 * w[1] * w[1] + w[0] * w[1];
        let mut w = vec![2.0, -1.5];
        let mut v = vec![0.0; 2];
        let mut last = f(&w);
        for _ in 0..100 {
            let g = gradient_fd(&f, &w, 1e-6, GradientMode::Central).unwrap();
            (w, v) = descent_step(&w, &g.grad, 0.05, 0.0, &v);
            let c = f(&w);
            assert!(c <= last + 1e-15);
            last = c;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn gradient_mode_parses() {
        assert_eq!(
            "central".parse::<GradientMode>().unwrap(),
            GradientMode::Central
        );
        assert!("backward".parse::<GradientMode>().is_err());
    }
}
