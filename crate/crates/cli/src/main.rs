//! `pauligeo`: classify Pauli maps and compute volumes of their regions.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::CliError;

#[derive(Debug, Parser)]
#[command(name = "pauligeo", version, about = "Geometry of qubit Pauli maps and channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VolumeMethod {
    Exact,
    Mc,
    Fr,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SamplingArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = pauli_geometry::mc::DEFAULT_CHUNK_SIZE)]
    pub chunk_size: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Region membership, Kraus weights and Choi spectrum of (λ1, λ2, λ3).
    Classify {
        #[arg(allow_negative_numbers = true)]
        l1: f64,
        #[arg(allow_negative_numbers = true)]
        l2: f64,
        #[arg(allow_negative_numbers = true)]
        l3: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Volume of a region expression such as `CPT,TLG`.
    Volume {
        #[arg(long)]
        region: String,
        #[arg(long, value_enum, default_value_t = VolumeMethod::Exact)]
        method: VolumeMethod,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Every reported volume and ratio, with exact and Monte Carlo columns.
    Table {
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact vertex/facet mesh of a polytopal region, as JSON.
    Mesh {
        #[arg(long)]
        region: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Uniform samples from a region as CSV rows `l1,l2,l3`.
    Sample {
        #[arg(long)]
        region: String,
        #[arg(short = 'n', long = "count")]
        count: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = pauli_geometry::mc::DEFAULT_CHUNK_SIZE)]
        chunk_size: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evolve a rate schedule, or construct rates reaching a target channel.
    Evolve {
        /// JSON list of `{"duration": number, "rates": [g1, g2, g3]}`.
        #[arg(long, conflicts_with = "target", required_unless_present = "target")]
        schedule: Option<PathBuf>,
        /// Single evaluation time.
        #[arg(long, short = 't', conflicts_with = "steps")]
        time: Option<f64>,
        /// Number of equally spaced times over the whole schedule.
        #[arg(long)]
        steps: Option<usize>,
        /// Target eigenvalues for the constant-rate construction.
        #[arg(long, num_args = 3, value_names = ["L1", "L2", "L3"], allow_negative_numbers = true)]
        target: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1.0)]
        t_star: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Classify { l1, l2, l3, output } => commands::classify([l1, l2, l3], &output),
        Command::Volume {
            region,
            method,
            sampling,
            output,
        } => commands::volume(&region, method, &sampling, &output),
        Command::Table { sampling, output } => commands::table(&sampling, &output),
        Command::Mesh { region, out } => commands::mesh(&region, out.as_deref()),
        Command::Sample {
            region,
            count,
            seed,
            chunk_size,
            out,
        } => commands::sample(&region, count, seed, chunk_size, out.as_deref()),
        Command::Evolve {
            schedule,
            time,
            steps,
            target,
            t_star,
            output,
        } => match target {
            Some(target) => commands::evolve_target(&target, t_star, &output),
            None => commands::evolve_schedule(
                schedule.as_deref().expect("clap requires --schedule without --target"),
                time,
                steps,
                &output,
            ),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
