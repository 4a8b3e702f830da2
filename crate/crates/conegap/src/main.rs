use clap::{Args, Parser, Subcommand};
use conegap::{parse_threads, run, Command, Config, RunError, THREADS_ENV};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "conegap",
    version,
    about = "Transfer-operator experiments on a projected horseshoe"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Leading eigenvalue, eigenfunction, eigenmeasure and refinement table.
    Spectrum(RunArgs),
    /// Cone condition and empirical contraction of the projective metric.
    Cone(RunArgs),
    /// Correlation series, Monte-Carlo cross-check and decay fit.
    Correlations(RunArgs),
    /// Variance series and normalized Birkhoff sums with a KS test.
    Clt(RunArgs),
    /// Admissible word counts of the subshift.
    Entropy(RunArgs),
    /// Itinerary of one orbit.
    Orbit(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `run.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn execute(cmd: Command, args: RunArgs) -> Result<Vec<PathBuf>, RunError> {
    let mut cfg = Config::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.run.seed = seed;
    }
    if let Some(out) = args.out {
        cfg.output.dir = out;
    }
    run(cmd, &cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match parse_threads(std::env::var(THREADS_ENV).ok().as_deref()) {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("error: {e}");
                return ExitCode::from(4);
            }
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let (cmd, args) = match cli.command {
        Cmd::Spectrum(a) => (Command::Spectrum, a),
        Cmd::Cone(a) => (Command::Cone, a),
        Cmd::Correlations(a) => (Command::Correlations, a),
        Cmd::Clt(a) => (Command::Clt, a),
        Cmd::Entropy(a) => (Command::Entropy, a),
        Cmd::Orbit(a) => (Command::Orbit, a),
    };
    match execute(cmd, args) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
