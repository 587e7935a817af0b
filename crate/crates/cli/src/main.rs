//! `momentum`: command-line front end for the momentum analysis pipeline.
//!
//! Exit status: 0 on success, 1 on a domain error, 2 on a usage error.

mod commands;
mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use settings::{read_config, Settings, UsageError};

#[derive(Parser)]
#[command(name = "momentum", version, about = "Point-by-point momentum analysis", propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Point-by-point CSV file
    #[arg(long)]
    input: Option<PathBuf>,
    /// Match to analyze; `all` pools every match [default: last match in the file]
    #[arg(long)]
    match_id: Option<String>,
    /// Output directory [default: out]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed [default: 1]
    #[arg(long)]
    seed: Option<u64>,
    /// key=value configuration file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct StreakOpts {
    /// Streak lengths >= cap share the last row [default: 7]
    #[arg(long)]
    cap: Option<usize>,
    /// Monte-Carlo replicates for the exact test [default: 100000]
    #[arg(long)]
    replicates: Option<u64>,
}

#[derive(Args, Clone)]
struct CusumOpts {
    /// CUSUM drift d [default: 0.05 x sd(M)]
    #[arg(long)]
    drift: Option<f64>,
    /// CUSUM threshold h; disables the tuner
    #[arg(long)]
    threshold: Option<f64>,
    /// Change-point count the threshold tuner aims for [default: 40]
    #[arg(long)]
    target_changepoints: Option<usize>,
}

#[derive(Args, Clone)]
struct TrainOpts {
    /// Input layer: Base, Base+M, Base+M+CP or Base+M+CP+V [default: Base+M+CP+V; evaluate: all four]
    #[arg(long)]
    scenario: Option<String>,
    /// Training share of the stratified split [default: 0.8]
    #[arg(long)]
    split: Option<f64>,
    /// Gradient-descent epochs after PSO [default: 500]
    #[arg(long)]
    epochs: Option<usize>,
    /// PSO swarm size [default: 30]
    #[arg(long)]
    swarm: Option<usize>,
    /// PSO iterations [default: 100]
    #[arg(long)]
    iterations: Option<usize>,
    /// Hidden tanh units [default: 8]
    #[arg(long)]
    hidden: Option<usize>,
    /// Gradient-descent learning rate [default: 0.05]
    #[arg(long)]
    learning_rate: Option<f64>,
    /// Number of split seeds, starting at --seed (evaluate) [default: 5]
    #[arg(long)]
    seeds: Option<usize>,
}

#[derive(Args, Clone)]
struct ShapOpts {
    /// Background rows for the Shapley value function [default: 100]
    #[arg(long)]
    background: Option<usize>,
    /// Trained network JSON to explain [default: train one]
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct SynthOpts {
    /// null, momentum or annotated [default: annotated]
    #[arg(long)]
    kind: Option<String>,
    /// Base win probability (null/momentum) [default: 0.5]
    #[arg(long)]
    p: Option<f64>,
    /// Added win probability after a win (momentum) [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    boost_wins: Option<f64>,
    /// Added win probability after a loss (momentum) [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    boost_losses: Option<f64>,
    /// Points per match [default: 235]
    #[arg(long)]
    points: Option<usize>,
    /// Number of matches [default: 31]
    #[arg(long)]
    matches: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the CSV and write derived features x1..x16 per match
    Ingest {
        #[command(flatten)]
        common: Common,
    },
    /// Streak contingency table, chi-square and exact tests, conditional probabilities
    TestMomentum {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        streak: StreakOpts,
    },
    /// Stepwise logistic selection of x1..x16 by AUC
    SelectFeatures {
        #[command(flatten)]
        common: Common,
    },
    /// Entropy weights and the momentum series M_t
    Momentum {
        #[command(flatten)]
        common: Common,
    },
    /// CUSUM change points on M_t
    Changepoints {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        cusum: CusumOpts,
    },
    /// Shift intensity V_t from the change points
    Shift {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        cusum: CusumOpts,
    },
    /// Train a PSO-seeded network for one input scenario
    Train {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        cusum: CusumOpts,
        #[command(flatten)]
        train: TrainOpts,
    },
    /// Compare input scenarios over several split seeds
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        cusum: CusumOpts,
        #[command(flatten)]
        train: TrainOpts,
    },
    /// Exact Shapley attribution on the test rows
    Shap {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        cusum: CusumOpts,
        #[command(flatten)]
        train: TrainOpts,
        #[command(flatten)]
        shap: ShapOpts,
    },
    /// Generate synthetic matches as CSV
    Synth {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        synth: SynthOpts,
    },
    /// Full pipeline for one match with every artifact and a plotting stub
    Report {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        streak: StreakOpts,
        #[command(flatten)]
        cusum: CusumOpts,
        #[command(flatten)]
        train: TrainOpts,
        #[command(flatten)]
        shap: ShapOpts,
    },
}

type Pairs = Vec<(&'static str, Option<String>)>;

fn s<T: ToString>(v: &Option<T>) -> Option<String> {
    v.as_ref().map(ToString::to_string)
}

fn p(v: &Option<PathBuf>) -> Option<String> {
    v.as_ref().map(|x| x.display().to_string())
}

impl Common {
    fn pairs(&self) -> Pairs {
        vec![("input", p(&self.input)), ("match-id", s(&self.match_id)), ("out", p(&self.out)), ("seed", s(&self.seed))]
    }
}

impl StreakOpts {
    fn pairs(&self) -> Pairs {
        vec![("cap", s(&self.cap)), ("replicates", s(&self.replicates))]
    }
}

impl CusumOpts {
    fn pairs(&self) -> Pairs {
        vec![
            ("drift", s(&self.drift)),
            ("threshold", s(&self.threshold)),
            ("target-changepoints", s(&self.target_changepoints)),
        ]
    }
}

impl TrainOpts {
    fn pairs(&self) -> Pairs {
        vec![
            ("scenario", s(&self.scenario)),
            ("split", s(&self.split)),
            ("epochs", s(&self.epochs)),
            ("swarm", s(&self.swarm)),
            ("iterations", s(&self.iterations)),
            ("hidden", s(&self.hidden)),
            ("learning-rate", s(&self.learning_rate)),
            ("seeds", s(&self.seeds)),
        ]
    }
}

impl ShapOpts {
    fn pairs(&self) -> Pairs {
        vec![("background", s(&self.background)), ("model", p(&self.model))]
    }
}

impl SynthOpts {
    fn pairs(&self) -> Pairs {
        vec![
            ("kind", s(&self.kind)),
            ("p", s(&self.p)),
            ("boost-wins", s(&self.boost_wins)),
            ("boost-losses", s(&self.boost_losses)),
            ("points", s(&self.points)),
            ("matches", s(&self.matches)),
        ]
    }
}

fn settings(common: &Common, groups: Vec<Pairs>) -> Result<Settings, UsageError> {
    let file = match &common.config {
        Some(path) => read_config(path)?,
        None => Default::default(),
    };
    let mut flags = common.pairs();
    flags.extend(groups.into_iter().flatten());
    Ok(Settings::new(flags, file))
}

fn dispatch(cmd: &Command) -> Result<serde_json::Value, commands::CliError> {
    use commands as c;
    match cmd {
        Command::Ingest { common } => c::ingest(&settings(common, vec![])?),
        Command::TestMomentum { common, streak } => c::test_momentum(&settings(common, vec![streak.pairs()])?),
        Command::SelectFeatures { common } => c::select_features(&settings(common, vec![])?),
        Command::Momentum { common } => c::momentum(&settings(common, vec![])?),
        Command::Changepoints { common, cusum } => c::changepoints(&settings(common, vec![cusum.pairs()])?),
        Command::Shift { common, cusum } => c::shift(&settings(common, vec![cusum.pairs()])?),
        Command::Train { common, cusum, train } => c::train(&settings(common, vec![cusum.pairs(), train.pairs()])?),
        Command::Evaluate { common, cusum, train } => {
            c::evaluate(&settings(common, vec![cusum.pairs(), train.pairs()])?)
        }
        Command::Shap { common, cusum, train, shap } => {
            c::shap(&settings(common, vec![cusum.pairs(), train.pairs(), shap.pairs()])?)
        }
        Command::Synth { common, synth } => c::synth(&settings(common, vec![synth.pairs()])?),
        Command::Report { common, streak, cusum, train, shap } => c::report(&settings(
            common,
            vec![streak.pairs(), cusum.pairs(), train.pairs(), shap.pairs()],
        )?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli.command) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(commands::CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(commands::CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
