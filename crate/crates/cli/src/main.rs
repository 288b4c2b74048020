use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod run;

use run::Failure;

#[derive(Debug, Parser)]
#[command(name = "fspec-miner", version, about = "Mine framework API specifications from MiniLang programs")]
struct Cli {
    /// Directory that receives the artifacts and the run manifest.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RecommendMode {
    /// Suggest the next call of an unfinished usage.
    Next,
    /// Compare the usage with the learned specification and propose fixes.
    Fix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalMode {
    Next,
    Missed,
    Swapped,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a MiniLang file and dump its intermediate representation.
    Parse { file: PathBuf },
    /// Slice a unit into one API usage graph per entrypoint.
    Paug {
        unit: PathBuf,
        #[arg(long)]
        framework: PathBuf,
    },
    /// Extract the framework's field dependencies from its sources.
    Ifd {
        /// Framework source directory; defaults to the manifest's `source`.
        src: Option<PathBuf>,
        #[arg(long)]
        framework: PathBuf,
    },
    /// Check every usage of a unit against the framework dependencies.
    Validate {
        unit: PathBuf,
        #[arg(long)]
        framework: PathBuf,
        /// Precomputed dependency model; otherwise derived from the framework sources.
        #[arg(long)]
        ifd: Option<PathBuf>,
    },
    /// Build the GRAAMs of a unit's sound usages.
    Graam {
        unit: PathBuf,
        #[arg(long)]
        framework: PathBuf,
        #[arg(long)]
        ifd: Option<PathBuf>,
    },
    /// Merge GRAAMs into a framework specification.
    Infer {
        /// A directory of `*.graams.json` artifacts, or a corpus with
        /// `framework.toml` and `units/`.
        dir: PathBuf,
        #[arg(long)]
        framework: Option<PathBuf>,
        /// Also write the specification as Graphviz.
        #[arg(long)]
        dot: bool,
    },
    /// Specification size after each merged GRAAM.
    Curve {
        dir: PathBuf,
        #[arg(long)]
        framework: Option<PathBuf>,
    },
    /// Recommend calls for the usages of a unit.
    Recommend {
        unit: PathBuf,
        #[arg(long)]
        fspec: PathBuf,
        #[arg(long)]
        framework: PathBuf,
        #[arg(long)]
        ifd: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, value_enum, default_value = "fix")]
        mode: RecommendMode,
    },
    /// Top-k accuracy of the recommender on mutated usages of a corpus.
    Eval {
        #[arg(long, value_enum)]
        mode: EvalMode,
        #[arg(long)]
        corpus: PathBuf,
        /// Defaults to `framework.toml` inside the corpus.
        #[arg(long)]
        framework: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// Share of each usage group held out for testing.
        #[arg(long, default_value_t = 0.2)]
        test_fraction: f64,
        /// Test on the training usages themselves.
        #[arg(long)]
        closed_world: bool,
    },
    /// Generate a synthetic corpus.
    Synth {
        #[arg(long)]
        corpus: String,
        #[arg(long, default_value_t = 10)]
        copies: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run::configure_threads().and_then(|threads| dispatch(cli, threads));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli, threads: usize) -> Result<(), Failure> {
    let mut ctx = run::Run::new(&cli.out, threads)?;
    match cli.command {
        Command::Parse { file } => commands::parse(&mut ctx, &file),
        Command::Paug { unit, framework } => commands::paug(&mut ctx, &unit, &framework),
        Command::Ifd { src, framework } => commands::ifd(&mut ctx, src.as_deref(), &framework),
        Command::Validate { unit, framework, ifd } => commands::validate(&mut ctx, &unit, &framework, ifd.as_deref()),
        Command::Graam { unit, framework, ifd } => commands::graam(&mut ctx, &unit, &framework, ifd.as_deref()),
        Command::Infer { dir, framework, dot } => commands::infer(&mut ctx, &dir, framework.as_deref(), dot),
        Command::Curve { dir, framework } => commands::curve(&mut ctx, &dir, framework.as_deref()),
        Command::Recommend { unit, fspec, framework, ifd, k, mode } => {
            commands::recommend(&mut ctx, &unit, &fspec, &framework, ifd.as_deref(), k, mode)
        }
        Command::Eval { mode, corpus, framework, seed, k, test_fraction, closed_world } => commands::eval(
            &mut ctx,
            commands::EvalArgs { mode, corpus, framework, seed, k, test_fraction, closed_world },
        ),
        Command::Synth { corpus, copies, seed } => commands::synth(&mut ctx, &corpus, copies, seed),
    }
}
