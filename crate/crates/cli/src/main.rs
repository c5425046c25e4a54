use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use graphif::harness::Method;
use graphif::{Error, ErrorClass};
use serde::de::DeserializeOwned;

mod commands;
mod config;

use config::GraphKind;

#[derive(Debug, Parser)]
#[command(name = "graphif", version, about = "Iterative filtering decompositions of signals on graphs")]
struct Cli {
    /// JSON run configuration; flags given on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random draw of the command.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Suppress the summary on standard output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write points, signal and ground-truth components of a synthetic example.
    Generate(GenerateArgs),
    /// Build a graph from scattered points and bind a signal to it.
    Ingest(IngestArgs),
    /// Decompose a signal into IMFs and a residual.
    Decompose(RunArgs),
    /// Export the graph Fourier spectrum of a signal with a kernel.
    Spectrum(RunArgs),
    /// Time precomputation and sifting over a ladder of sizes.
    Benchmark(BenchmarkArgs),
    /// Compare long sifting runs with the closed-form limit.
    LimitCheck(LimitCheckArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// 1: chirps on the circle; 2: plane waves on the square.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    example: u8,
    #[arg(short, long, default_value_t = 512)]
    n: usize,
    /// Example 1 only: equispaced angles instead of random ones.
    #[arg(long)]
    equispaced: bool,
}

#[derive(Debug, Args)]
struct IngestArgs {
    /// CSV `id,t` (timestamps) or `id,x,y` (planar coordinates).
    #[arg(long)]
    points: PathBuf,
    /// CSV `id,value`.
    #[arg(long)]
    signal: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    graph: GraphKind,
    #[arg(long, default_value_t = 2)]
    neighbors: usize,
}

#[derive(Debug, Args, Default)]
struct RunArgs {
    /// gft_if, db_if or fif.
    #[arg(long, value_parser = parse_method)]
    method: Option<Method>,
    #[arg(long)]
    points: Option<PathBuf>,
    #[arg(long)]
    signal: Option<PathBuf>,
    #[arg(long, value_enum)]
    graph: Option<GraphKind>,
    /// `i,j,weight` file for an edge-list graph.
    #[arg(long)]
    edges: Option<PathBuf>,
    #[arg(long)]
    neighbors: Option<usize>,
    #[arg(long)]
    nu: Option<f64>,
    /// Spectral cutoff per IMF (comma separated); automatic when absent.
    #[arg(long, value_delimiter = ',')]
    cutoff: Option<Vec<f64>>,
    /// row_stochastic or symmetrized.
    #[arg(long, value_parser = parse_enum::<graphif::decomposers::WindowMode>)]
    mode: Option<graphif::decomposers::WindowMode>,
    /// auto, dense or sparse.
    #[arg(long, value_parser = parse_enum::<graphif::decomposers::Storage>)]
    storage: Option<graphif::decomposers::Storage>,
    /// extrema_spacing or bounding_box.
    #[arg(long, value_parser = parse_enum::<graphif::decomposers::PlanarWindowRule>)]
    planar_rule: Option<graphif::decomposers::PlanarWindowRule>,
    #[arg(long)]
    extent: Option<f64>,
    /// Run exactly this many inner iterations per IMF.
    #[arg(long, conflicts_with = "delta")]
    fixed_iterations: Option<usize>,
    /// Relative-change threshold of the inner loop.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    max_imfs: Option<usize>,
    /// Row-major distance matrix CSV for db_if.
    #[arg(long, conflicts_with = "shortest_path")]
    distances: Option<PathBuf>,
    /// Use graph shortest paths (dijkstra or floyd_warshall) as db_if distances.
    #[arg(long, value_parser = parse_enum::<graphif::distances::ShortestPathMethod>)]
    shortest_path: Option<graphif::distances::ShortestPathMethod>,
}

#[derive(Debug, Args)]
struct BenchmarkArgs {
    #[arg(long, value_delimiter = ',', default_value = "128,512,2048")]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', value_parser = parse_method, default_value = "gft_if,db_if,fif")]
    methods: Vec<Method>,
    /// Inner iterations per IMF.
    #[arg(long, default_value_t = 10)]
    m: usize,
    /// IMFs per run.
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long)]
    no_warmup: bool,
    #[arg(long, default_value_t = 8192)]
    memory_limit_mb: u64,
}

#[derive(Debug, Args)]
struct LimitCheckArgs {
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 10_000)]
    iterations: usize,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_enum<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.replace('-', "_"))).map_err(|e| e.to_string())
}

fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::InvalidInput => 2,
        ErrorClass::Numeric => 3,
        ErrorClass::Io => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let report = serde_json::json!({
                "error": e.kind(),
                "class": match e.class() {
                    ErrorClass::InvalidInput => "invalid_input",
                    ErrorClass::Numeric => "numeric",
                    ErrorClass::Io => "io",
                },
                "message": e.to_string(),
            });
            eprintln!("{report}");
            ExitCode::from(exit_code(&e))
        }
    }
}
