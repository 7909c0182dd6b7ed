//! Batch experiment runner for the random-cluster and Ising samplers.
//!
//! Exit codes: 0 success, 1 check failure, 2 configuration or IO error.

mod commands;
mod verify;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "fkmc",
    about = "Random-cluster and Ising sampling experiments",
    long_about = "Seeded, reproducible sampling runs with machine-readable reports.\n\
                  Replica r draws from stream r of a ChaCha8 generator seeded with --seed,\n\
                  so outputs are byte-identical across runs and thread counts."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the random-cluster model with the field dynamics
    SampleRc(SampleArgs),
    /// Sample the graph-form Ising model (field dynamics plus component lift)
    SampleIsingGraph(SampleArgs),
    /// Sample the matrix-form Ising model with restricted Gaussian dynamics
    SampleIsingMatrix(MatrixArgs),
    /// Run the built-in property checks on bundled fixtures
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleMode {
    /// Proof-driven parameters (saturates at realistic sizes)
    Paper,
    /// User-supplied round counts (defaults suit desk-scale graphs)
    Practical,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InnerArg {
    Parallel,
    Exact,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiserArg {
    /// Exact Gaussian draw through the Cholesky factor
    Exact,
    /// Unadjusted Langevin iteration
    Langevin,
}

#[derive(Args)]
pub struct SampleArgs {
    /// Edge-list file: first line "n m", then m lines "u v"
    #[arg(long)]
    pub graph: PathBuf,
    /// Model parameters as JSON
    #[arg(long)]
    pub params: PathBuf,
    /// Accuracy target in (0, 1)
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub replicas: usize,
    #[arg(long, value_enum, default_value_t = ScheduleMode::Practical)]
    pub schedule: ScheduleMode,
    /// Practical-schedule theta
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
    /// Practical-schedule outer iteration count T_FD
    #[arg(long, default_value_t = 8)]
    pub tfd: u64,
    /// Practical-schedule inner Glauber step count T_GD
    #[arg(long, default_value_t = 500)]
    pub tgd: u64,
    /// Practical-schedule round budget T_PA
    #[arg(long, default_value_t = 20)]
    pub tpa: u64,
    /// Practical-schedule brute-force threshold N0
    #[arg(long, default_value_t = 0.0)]
    pub n0: f64,
    #[arg(long, value_enum, default_value_t = InnerArg::Parallel)]
    pub inner: InnerArg,
    /// Worker threads (default: all available)
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output path prefix: writes <out>.report.json and <out>.samples.csv
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct MatrixArgs {
    /// Matrix Ising model as JSON: {"J": [[..]], "h": [..], "eta": x}
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub replicas: usize,
    #[arg(long, value_enum, default_value_t = NoiserArg::Exact)]
    pub noiser: NoiserArg,
    /// Langevin step count (default: sized from eta and eps)
    #[arg(long)]
    pub langevin_steps: Option<usize>,
    /// Langevin step size (default: eta / 4)
    #[arg(long)]
    pub langevin_step_size: Option<f64>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub threads: Option<usize>,
    /// Optional path for the JSON check report
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn init_threads(threads: Option<usize>) -> Result<usize, fkmc::Error> {
    let count = threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()));
    if count == 0 {
        return Err(fkmc::Error::InvalidParameter(
            "--threads must be >= 1".into(),
        ));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(count)
        .build_global()
        .map_err(|e| fkmc::Error::InvalidParameter(format!("thread pool: {e}")))?;
    Ok(count)
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::SampleRc(args) => init_threads(args.threads)
            .and_then(|threads| commands::sample_rc(&args, threads)),
        Command::SampleIsingGraph(args) => init_threads(args.threads)
            .and_then(|threads| commands::sample_ising_graph(&args, threads)),
        Command::SampleIsingMatrix(args) => init_threads(args.threads)
            .and_then(|threads| commands::sample_ising_matrix(&args, threads)),
        Command::Verify(args) => {
            init_threads(args.threads).and_then(|_| verify::run(args.out.as_deref()))
        }
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}
