//! Command execution and artifact writing.
//!
//! Artifacts contain no timestamps or host details, so a rerun with the same
//! settings reproduces every file byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use qnn_core::state::sample_haar_state;
use qnn_core::tasks::autoencoder::{bottleneck_states, build_autoencoder_task};
use qnn_core::tasks::classical::{classical_equivalence_check, WeightSet};
use qnn_core::tasks::landscape::{build_landscape_task, landscape_scan};
use qnn_core::tasks::teleport::{build_teleport_task, teleport_oracle_params};
use qnn_core::tasks::{Example, TrainingTask, WireLabel};
use qnn_core::training::{example_costs, mean_std, train};
use qnn_core::{Network, PauliString};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Settings;

#[derive(Debug, Clone, Copy)]
pub enum Task {
    Autoencoder,
    Teleport,
    Landscape,
    Classical,
    Oracle,
}

impl Task {
    fn command(self) -> &'static str {
        match self {
            Task::Autoencoder => "train-autoencoder",
            Task::Teleport => "train-teleport",
            Task::Landscape => "landscape",
            Task::Classical => "classical-check",
            Task::Oracle => "verify-oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Diverged = 2,
    CheckFailed = 3,
}

pub struct Outcome {
    pub status: Status,
    pub message: String,
}

#[derive(Serialize)]
struct Summary<'a> {
    command: &'a str,
    task: &'a str,
    version: &'a str,
    status: &'a str,
    seed: u64,
    config: &'a Settings,
    label_map: &'a [WireLabel],
    results: Value,
}

struct Writer<'a> {
    dir: &'a Path,
    settings: &'a Settings,
    command: &'a str,
}

impl Writer<'_> {
    fn file(&self, name: &str, contents: &str) -> Result<(), String> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
    }

    fn summary(
        &self,
        task: &str,
        status: &str,
        labels: &[WireLabel],
        results: Value,
    ) -> Result<(), String> {
        let s = Summary {
            command: self.command,
            task,
            version: env!("CARGO_PKG_VERSION"),
            status,
            seed: self.settings.seed,
            config: self.settings,
            label_map: labels,
            results,
        };
        let mut text = serde_json::to_string_pretty(&s).map_err(|e| e.to_string())?;
        text.push('\n');
        self.file("summary.json", &text)
    }

    fn trace(&self, trace: &[f64]) -> Result<(), String> {
        let mut csv = String::from("iteration,cost\n");
        for (i, c) in trace.iter().enumerate() {
            writeln!(csv, "{i},{c}").unwrap();
        }
        self.file("trace.csv", &csv)
    }

    fn network(&self, net: &Network) -> Result<(), String> {
        let mut text = net.to_json();
        text.push('\n');
        self.file("network.json", &text)
    }
}

pub fn execute(task: Task, settings: &Settings, out: &Path) -> Result<Outcome, String> {
    fs::create_dir_all(out).map_err(|e| format!("cannot create {}: {e}", out.display()))?;
    let w = Writer {
        dir: out,
        settings,
        command: task.command(),
    };
    match task {
        Task::Autoencoder => autoencoder(&w),
        Task::Teleport => teleport(&w),
        Task::Landscape => landscape(&w),
        Task::Classical => classical(&w),
        Task::Oracle => oracle(&w),
    }
}

fn haar_set(settings: &Settings) -> Result<Vec<Example>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(settings.eval_seed);
    (0..settings.eval_samples)
        .map(|_| {
            Ok(Example::identity(
                sample_haar_state(1, &mut rng).map_err(|e| e.to_string())?,
            ))
        })
        .collect()
}

fn stats(costs: &[f64]) -> Value {
    let (mean, std) = mean_std(costs);
    let max = costs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    json!({ "samples": costs.len(), "mean": mean, "std": std, "max": max })
}

/// Trains `task`, writes trace, checkpoint and summary, then calls `evaluate` on success.
fn train_and_report(
    w: &Writer,
    task: &TrainingTask,
    evaluate: impl FnOnce(&Network) -> Result<(Value, String), String>,
) -> Result<Outcome, String> {
    let cfg = w.settings.train_config();
    match train(task, &cfg) {
        Ok(out) => {
            w.trace(&out.trace)?;
            w.network(&out.network)?;
            let (mut results, message) = evaluate(&out.network)?;
            results["iterations"] = json!(out.trace.len());
            results["converged"] = json!(out.converged);
            results["final_running_average"] = json!(out.running_average(cfg.window));
            let status = if out.converged {
                "converged"
            } else {
                "budget_exhausted"
            };
            w.summary(&task.name, status, &task.label_map, results)?;
            Ok(Outcome {
                status: Status::Success,
                message: format!("{status} after {} iterations; {message}", out.trace.len()),
            })
        }
        Err(abort) => {
            w.trace(&abort.trace)?;
            w.network(&abort.network)?;
            let results =
                json!({ "error": abort.error.to_string(), "iterations": abort.trace.len() });
            w.summary(&task.name, "diverged", &task.label_map, results)?;
            Ok(Outcome {
                status: Status::Diverged,
                message: format!("training stopped: {abort}"),
            })
        }
    }
}

fn autoencoder(w: &Writer) -> Result<Outcome, String> {
    let s = w.settings;
    let inputs = s.inputs.states();
    let task = build_autoencoder_task(inputs.clone(), s.diagonality_penalty, s.outer_neuron)
        .map_err(|e| e.to_string())?;
    train_and_report(w, &task, |net| {
        let costs =
            example_costs(&task, net, task.sampler.examples()).map_err(|e| e.to_string())?;
        let bottleneck: Vec<Value> = bottleneck_states(net, &inputs)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|b| {
                let e = |j| b.expectation(&PauliString::single(j)).unwrap();
                json!({ "sigma1": e(1), "sigma2": e(2), "sigma3": e(3) })
            })
            .collect();
        let st = stats(&costs);
        let message = format!("mean cost over inputs {:e}", st["mean"].as_f64().unwrap());
        Ok((
            json!({ "input_costs": costs, "cost": st, "bottleneck": bottleneck }),
            message,
        ))
    })
}

fn teleport(w: &Writer) -> Result<Outcome, String> {
    let task = build_teleport_task().map_err(|e| e.to_string())?;
    let haar = haar_set(w.settings)?;
    train_and_report(w, &task, |net| {
        let axis = example_costs(&task, net, task.sampler.examples()).map_err(|e| e.to_string())?;
        let costs = example_costs(&task, net, &haar).map_err(|e| e.to_string())?;
        let st = stats(&costs);
        let message = format!(
            "Haar mean cost {:e} (std {:e})",
            st["mean"].as_f64().unwrap(),
            st["std"].as_f64().unwrap()
        );
        Ok((
            json!({ "axis_costs": axis, "haar": st, "eval_seed": w.settings.eval_seed }),
            message,
        ))
    })
}

fn landscape(w: &Writer) -> Result<Outcome, String> {
    let s = w.settings;
    let task = build_landscape_task().map_err(|e| e.to_string())?;
    let scan =
        landscape_scan(s.grid_theta, s.grid_phi, &s.path_config()).map_err(|e| e.to_string())?;
    let mut grid = String::from("theta,phi,cost\n");
    for p in &scan.grid {
        writeln!(grid, "{},{},{}", p.theta, p.phi, p.cost).unwrap();
    }
    w.file("grid.csv", &grid)?;
    let mut path = String::from("step,theta,phi,cost\n");
    for p in &scan.path {
        writeln!(path, "{},{},{},{}", p.step, p.theta, p.phi, p.cost).unwrap();
    }
    w.file("path.csv", &path)?;
    let min = scan.minimum().expect("grid is non-empty");
    let end = *scan.path.last().expect("path has its start point");
    w.summary(
        &task.name,
        "completed",
        &task.label_map,
        json!({ "grid_points": scan.grid.len(), "minimum": min, "path_end": end }),
    )?;
    Ok(Outcome {
        status: Status::Success,
        message: format!(
            "grid minimum {:e} at theta {} phi {}; path ends with cost {:e} after {} steps",
            min.cost, min.theta, min.phi, end.cost, end.step
        ),
    })
}

fn classical(w: &Writer) -> Result<Outcome, String> {
    let s = w.settings;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut sets = vec![WeightSet::or(), WeightSet::and()];
    sets.extend((0..s.random_sets).map(|_| {
        WeightSet::new(
            vec![rng.random_range(-2.0..=2.0), rng.random_range(-2.0..=2.0)],
            0.5,
        )
    }));
    let report = classical_equivalence_check(&sets).map_err(|e| e.to_string())?;
    let mut csv = String::from("set,w1,w2,threshold,x1,x2,classical,quantum\n");
    for (k, r) in report.sets.iter().enumerate() {
        for row in &r.rows {
            let bit = |b: bool| b as u8;
            let quantum = row
                .quantum
                .map_or("invalid".to_string(), |q| bit(q).to_string());
            writeln!(
                csv,
                "{k},{},{},{},{},{},{},{quantum}",
                r.weights.weights[0],
                r.weights.weights[1],
                r.weights.threshold,
                bit(row.inputs[0]),
                bit(row.inputs[1]),
                bit(row.classical)
            )
            .unwrap();
        }
    }
    w.file("truth_tables.csv", &csv)?;
    let failures = report.failures();
    let passed = report.passed();
    w.summary(
        "classical",
        if passed { "passed" } else { "failed" },
        &[],
        json!({ "weight_sets": sets.len(), "passed": passed, "mismatches": failures }),
    )?;
    Ok(Outcome {
        status: if passed {
            Status::Success
        } else {
            Status::CheckFailed
        },
        message: if passed {
            format!(
                "all {} weight sets match their Heaviside truth tables",
                sets.len()
            )
        } else {
            format!(
                "{} mismatching rows:\n{}",
                failures.len(),
                failures.join("\n")
            )
        },
    })
}

/// Largest cost the oracle may have on any input.
const ORACLE_TOLERANCE: f64 = 1e-9;

fn oracle(w: &Writer) -> Result<Outcome, String> {
    let task = build_teleport_task().map_err(|e| e.to_string())?;
    let params = teleport_oracle_params().map_err(|e| e.to_string())?;
    let net = task
        .network
        .assign_params(&params)
        .map_err(|e| e.to_string())?;
    let axis = example_costs(&task, &net, task.sampler.examples()).map_err(|e| e.to_string())?;
    let haar = example_costs(&task, &net, &haar_set(w.settings)?).map_err(|e| e.to_string())?;
    let worst = axis.iter().chain(&haar).cloned().fold(0.0, f64::max);
    let passed = worst <= ORACLE_TOLERANCE;
    w.network(&net)?;
    w.summary(
        &task.name,
        if passed { "passed" } else { "failed" },
        &task.label_map,
        json!({
            "axis_costs": axis,
            "haar": stats(&haar),
            "eval_seed": w.settings.eval_seed,
            "tolerance": ORACLE_TOLERANCE,
            "passed": passed,
        }),
    )?;
    Ok(Outcome {
        status: if passed {
            Status::Success
        } else {
            Status::CheckFailed
        },
        message: format!(
            "largest oracle cost {worst:e} over {} inputs",
            axis.len() + haar.len()
        ),
    })
}
