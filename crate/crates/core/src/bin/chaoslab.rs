use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chaoslab::lab::{self, Experiment, ExperimentConfig};
use chaoslab::LabError;

#[derive(Parser)]
#[command(name = "chaoslab", version, about = "Numerical experiments on Lorenz-type systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in figure configurations.
    Recipes {
        /// Write each recipe as <name>.json into this directory.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Run an experiment: integrate, sweep, divergence, estat, jumps, longrun, slice or order.
    #[command(external_subcommand)]
    Run(Vec<String>),
}

#[derive(Parser)]
#[command(name = "chaoslab <experiment>", no_binary_name = true)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("chaoslab: {msg}");
    ExitCode::from(1)
}

fn list_recipes(emit: Option<PathBuf>) -> ExitCode {
    for r in lab::recipes() {
        println!("{:<8} {:<10} {}", r.name, r.config.experiment.name(), r.description);
        if let Some(dir) = &emit {
            if let Err(e) = std::fs::create_dir_all(dir)
                .and_then(|_| std::fs::write(dir.join(r.file_name()), r.config.canonical_string() + "\n"))
            {
                eprintln!("chaoslab: {}: {e}", dir.display());
                return ExitCode::from(2);
            }
        }
    }
    ExitCode::SUCCESS
}

fn run_experiment(args: Vec<String>) -> ExitCode {
    let Some((name, rest)) = args.split_first() else {
        return usage("missing experiment");
    };
    let experiment: Experiment = match name.parse() {
        Ok(e) => e,
        Err(e) => return usage(e),
    };
    let run_args = match RunArgs::try_parse_from(rest) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let mut config = match ExperimentConfig::from_file(&run_args.config) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    if config.experiment != experiment {
        return usage(format!(
            "config describes '{}', not '{}'",
            config.experiment.name(),
            experiment.name()
        ));
    }
    if let Some(out) = run_args.out {
        config.output_dir = out;
    }
    match lab::run(&config) {
        Ok(manifest) => {
            if let Some(err) = &manifest.error {
                eprintln!("chaoslab: {err}");
            }
            for b in &manifest.blow_ups {
                eprintln!("chaoslab: {} blew up at t = {} ({})", b.run, b.t, b.reason);
            }
            println!(
                "{} outputs in {}",
                manifest.outputs.len() + 1,
                config.output_dir.display()
            );
            ExitCode::from(manifest.exit_code() as u8)
        }
        Err(e @ LabError::Config(_)) => usage(e),
        Err(e) => {
            eprintln!("chaoslab: {e}");
            ExitCode::from(2)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Recipes { emit } => list_recipes(emit),
        Command::Run(args) => run_experiment(args),
    }
}
