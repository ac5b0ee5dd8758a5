use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fairweight::commands::{self, ModelSource};
use fairweight::config::{Manifest, Overrides, RunConfig};
use fairweight::{Error, WallClock};

#[derive(Parser)]
#[command(name = "fairweight", version, about = "Reweight tabular data so that a causal effect of a sensitive attribute vanishes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// total, path_specific, direct, indirect, all, or counterfactual.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    t_balance: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    repeats: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Learn sample weights and report effects before and after.
    Reweigh {
        #[command(flatten)]
        common: Common,
        /// Repeat the run recorded in a manifest instead of reading --config.
        #[arg(long, conflicts_with = "config")]
        manifest: Option<PathBuf>,
    },
    /// Estimate effects under given (or unit) weights.
    Effects {
        #[command(flatten)]
        common: Common,
        /// Weight file covering every dataset row.
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long, required_unless_present = "fit", conflicts_with = "fit")]
        checkpoint: Option<PathBuf>,
        /// Fit the structural model on all rows without reweighting.
        #[arg(long)]
        fit: bool,
    },
    /// Sample a dataset from an SCM document and record oracle effects.
    GenSynth {
        #[arg(long)]
        scm: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Downstream logistic-regression accuracy under given weights.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        weights: Option<PathBuf>,
    },
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            mode: self.mode.clone(),
            t_balance: self.t_balance,
            tau: self.tau,
            out: self.out.clone(),
            repeats: self.repeats,
        }
    }

    fn load(&self) -> Result<RunConfig, Error> {
        let path = self.config.as_ref().ok_or_else(|| Error::Config("--config is required".into()))?;
        let mut cfg = RunConfig::load(path)?;
        self.overrides().apply(&mut cfg)?;
        Ok(cfg)
    }
}

fn verdict(fair: bool) -> u8 {
    if fair {
        0
    } else {
        1
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    let clock = WallClock::start();
    match cli.command {
        Command::Reweigh { common, manifest } => {
            let cfg = match manifest {
                Some(path) => {
                    let mut cfg = Manifest::load(&path)?.replay_config()?;
                    common.overrides().apply(&mut cfg)?;
                    cfg
                }
                None => common.load()?,
            };
            let report = commands::reweigh(&cfg, &clock)?;
            print!("{}", report.table());
            Ok(verdict(report.fair))
        }
        Command::Effects {
            common,
            weights,
            checkpoint,
            fit,
        } => {
            let cfg = common.load()?;
            let source = match (checkpoint, fit) {
                (Some(p), _) => ModelSource::Checkpoint(p),
                (None, _) => ModelSource::Fit,
            };
            let report = commands::effects(&cfg, weights.as_deref(), &source, &clock)?;
            print!("{}", report.table());
            Ok(verdict(report.fair))
        }
        Command::GenSynth { scm, out, n, seed } => {
            let sidecar = commands::gen_synth(&scm, &out, n, seed)?;
            println!(
                "wrote {} rows to {}; oracle TE {:.4} (se {:.5})",
                sidecar.n,
                out.display(),
                sidecar.total_effect.value,
                sidecar.total_effect.standard_error
            );
            Ok(0)
        }
        Command::Evaluate { common, weights } => {
            let cfg = common.load()?;
            let acc = commands::evaluate(&cfg, weights.as_deref())?;
            println!("LR accuracy {:.4} ({:.4}) over {} splits", acc.mean, acc.std, acc.values.len());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
