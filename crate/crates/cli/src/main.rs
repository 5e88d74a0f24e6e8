//! `qnn`: runs the quantum neural network experiments and writes their artifacts.
//!
//! Exit status: 0 success, 1 usage or validation error, 2 training diverged,
//! 3 a verification check failed.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qnn_core::tasks::autoencoder::OuterNeuron;
use qnn_core::GradientMode;

use config::{InputSet, Settings};

#[derive(Debug, Parser)]
#[command(
    name = "qnn",
    version,
    about = "Train and inspect quantum feedforward neural networks"
)]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train the two-qubit autoencoder with a one-qubit bottleneck.
    TrainAutoencoder {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        train: TrainFlags,
        #[arg(long, value_enum)]
        inputs: Option<InputSet>,
        /// Also drive the bottleneck's <σ1> and <σ2> to zero.
        #[arg(long, num_args = 0..=1, default_missing_value = "true")]
        diagonality_penalty: Option<bool>,
        /// Decoding neurons: `general` or `neuron2`.
        #[arg(long)]
        outer_neuron: Option<OuterNeuron>,
    },
    /// Train the teleportation network on the six axis states.
    TrainTeleport {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        train: TrainFlags,
        #[command(flatten)]
        eval: EvalFlags,
    },
    /// Scan the two-parameter cost landscape and trace a descent path.
    Landscape {
        #[command(flatten)]
        common: Common,
        /// Grid size as THETAxPHI, e.g. 101x101.
        #[arg(long, value_parser = parse_grid)]
        grid: Option<(usize, usize)>,
        /// Descent start as THETA,PHI.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        start: Option<(f64, f64)>,
        #[arg(long)]
        path_eta: Option<f64>,
        #[arg(long)]
        path_momentum: Option<f64>,
        #[arg(long)]
        path_steps: Option<usize>,
    },
    /// Compare Heaviside neurons with their permutation-matrix counterparts.
    ClassicalCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        random_sets: Option<usize>,
    },
    /// Check the hand-built teleportation parameters on Haar-random states.
    VerifyOracle {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        eval: EvalFlags,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// TOML file with settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for artifacts.
    #[arg(long, env = "QNN_OUT_DIR", default_value = "qnn-out")]
    out: PathBuf,
    /// Worker threads for gradient and scan evaluation. Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct TrainFlags {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    momentum: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    cost_threshold: Option<f64>,
    #[arg(long)]
    window: Option<usize>,
    /// `forward` or `central`.
    #[arg(long)]
    gradient_mode: Option<GradientMode>,
    #[arg(long)]
    init_range: Option<f64>,
}

#[derive(Debug, Args)]
struct EvalFlags {
    #[arg(long)]
    eval_samples: Option<usize>,
    #[arg(long)]
    eval_seed: Option<u64>,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or("expected THETAxPHI")?;
    Ok((
        a.trim().parse().map_err(|e| format!("{e}"))?,
        b.trim().parse().map_err(|e| format!("{e}"))?,
    ))
}

fn parse_point(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected THETA,PHI")?;
    Ok((
        a.trim().parse().map_err(|e| format!("{e}"))?,
        b.trim().parse().map_err(|e| format!("{e}"))?,
    ))
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl TrainFlags {
    fn apply(self, s: &mut Settings) {
        set(&mut s.seed, self.seed);
        set(&mut s.eta, self.eta);
        set(&mut s.epsilon, self.epsilon);
        set(&mut s.momentum, self.momentum);
        set(&mut s.max_iterations, self.max_iterations);
        set(&mut s.cost_threshold, self.cost_threshold);
        set(&mut s.window, self.window);
        set(&mut s.gradient_mode, self.gradient_mode);
        set(&mut s.init_range, self.init_range);
    }
}

impl EvalFlags {
    fn apply(self, s: &mut Settings) {
        set(&mut s.eval_samples, self.eval_samples);
        set(&mut s.eval_seed, self.eval_seed);
    }
}

type Apply = Box<dyn FnOnce(&mut Settings)>;

/// Resolves settings and returns the task runner with its output directory.
fn resolve(command: Command) -> Result<(run::Task, Common, Settings), String> {
    let (task, common, apply): (run::Task, Common, Apply) = match command {
        Command::TrainAutoencoder {
            common,
            train,
            inputs,
            diagonality_penalty,
            outer_neuron,
        } => (
            run::Task::Autoencoder,
            common,
            Box::new(move |s| {
                train.apply(s);
                set(&mut s.inputs, inputs);
                set(&mut s.diagonality_penalty, diagonality_penalty);
                set(&mut s.outer_neuron, outer_neuron);
            }),
        ),
        Command::TrainTeleport {
            common,
            train,
            eval,
        } => (
            run::Task::Teleport,
            common,
            Box::new(move |s| {
                train.apply(s);
                eval.apply(s);
            }),
        ),
        Command::Landscape {
            common,
            grid,
            start,
            path_eta,
            path_momentum,
            path_steps,
        } => (
            run::Task::Landscape,
            common,
            Box::new(move |s| {
                if let Some((t, p)) = grid {
                    s.grid_theta = t;
                    s.grid_phi = p;
                }
                if let Some((t, p)) = start {
                    s.path_theta = t;
                    s.path_phi = p;
                }
                set(&mut s.path_eta, path_eta);
                set(&mut s.path_momentum, path_momentum);
                set(&mut s.path_steps, path_steps);
            }),
        ),
        Command::ClassicalCheck {
            common,
            seed,
            random_sets,
        } => (
            run::Task::Classical,
            common,
            Box::new(move |s| {
                set(&mut s.seed, seed);
                set(&mut s.random_sets, random_sets);
            }),
        ),
        Command::VerifyOracle { common, eval } => {
            (run::Task::Oracle, common, Box::new(move |s| eval.apply(s)))
        }
    };
    let mut settings = Settings::load(common.config.as_deref())?;
    apply(&mut settings);
    settings.validate()?;
    Ok((task, common, settings))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (task, common, settings) = match resolve(cli.command) {
        Ok(r) => r,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    if let Some(n) = common.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match run::execute(task, &settings, &common.out) {
        Ok(outcome) => {
            println!("{}", outcome.message);
            ExitCode::from(outcome.status as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
