mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "graphon-clt", version, about = "Centred subgraph statistics of graphon random graphs")]
struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed; required by every command that samples.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads. Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(clap::Args, Debug, Clone, Default)]
pub struct GraphInput {
    /// Edge-list file (`n=.. scheme=.. seed=..` header, then `v w y`).
    #[arg(long)]
    pub edges: Option<PathBuf>,
    /// Label file (`v u` per line).
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Vertex count when sampling instead of reading a graph.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw one graph; writes the edge list and the labels.
    Sample {
        #[arg(long)]
        n: Option<usize>,
        /// Label output file; defaults to `<out>.labels` when --out is set.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Homomorphism, injective and graphon densities of patterns.
    Density {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long = "pattern")]
        patterns: Vec<String>,
    },
    /// The statistic vector W for one graph.
    Stat {
        #[command(flatten)]
        input: GraphInput,
    },
    /// Exact covariance at size n, followed by its limit.
    Cov {
        #[arg(long)]
        n: Option<usize>,
    },
    /// Orthogonal decomposition of an injective density.
    Decompose {
        #[arg(long)]
        pattern: Option<String>,
        /// Vertex count for Monte Carlo variance estimates.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        replications: Option<usize>,
    },
    /// Exact Stein-identity residuals.
    SteinCheck {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        max_degree: Option<u32>,
    },
    /// Fourth moment of the second-chaos functional.
    Chaos4 {
        #[arg(long, value_delimiter = ',')]
        n_grid: Vec<usize>,
        #[arg(long)]
        replications: Option<usize>,
    },
    /// Goodness-of-fit tests against a probability matrix.
    Gof {
        #[arg(long)]
        edges: Option<PathBuf>,
        /// Dense CSV matrix or graphon JSON evaluated on the lattice.
        #[arg(long)]
        probabilities: Option<PathBuf>,
        #[arg(long = "pattern")]
        patterns: Vec<String>,
    },
    /// Monte Carlo CLT experiment over the n-grid.
    Clt {
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Finite-n covariance against its limit over the n-grid.
    Converge {
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

pub struct Globals {
    pub config: RunConfig,
    pub config_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

fn run(cli: Cli) -> graphon_clt::Result<()> {
    let (config, config_dir) = match &cli.config {
        Some(path) => (RunConfig::load(path)?, path.parent().map(PathBuf::from)),
        None => (RunConfig::default(), None),
    };
    let g = Globals { seed: cli.seed.or(config.seed), config, config_dir, out: cli.out.clone() };
    match cli.command {
        Command::Sample { n, labels } => commands::sample(&g, n, labels),
        Command::Density { input, patterns } => commands::density(&g, &input, &patterns),
        Command::Stat { input } => commands::stat(&g, &input),
        Command::Cov { n } => commands::cov(&g, n),
        Command::Decompose { pattern, n, replications } => commands::decompose(&g, pattern, n, replications),
        Command::SteinCheck { n, max_degree } => commands::stein_check(&g, n, max_degree),
        Command::Chaos4 { n_grid, replications } => commands::chaos4(&g, n_grid, replications),
        Command::Gof { edges, probabilities, patterns } => commands::gof(&g, edges, probabilities, &patterns),
        Command::Clt { format } => commands::clt(&g, format),
        Command::Converge { format } => commands::converge(&g, format),
    }
}

fn exit_code(e: &graphon_clt::Error) -> u8 {
    if e.is_feasibility() {
        3
    } else if e.is_validation() {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = match cli.threads {
        Some(0) => Err(graphon_clt::Error::Invalid("--threads must be at least 1".into())),
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(|| run(cli)),
            Err(e) => Err(graphon_clt::Error::Io(std::io::Error::other(e))),
        },
        None => run(cli),
    };
    match result {
        Ok(()) => {
            eprintln!("elapsed: {:.3} s", start.elapsed().as_secs_f64());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
