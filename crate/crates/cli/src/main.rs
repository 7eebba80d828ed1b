mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Overrides, PipelineConfig};

/// Transit maps from GTFS feeds: line graph extraction, line ordering and SVG rendering.
#[derive(Debug, Parser)]
#[command(name = "transitmap", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Build the line graph of a GTFS feed
    Extract {
        gtfs_dir: PathBuf,
        #[arg(short, long, value_name = "GRAPH_JSON")]
        out: PathBuf,
    },
    /// Compute a line ordering for a line graph
    Optimize {
        graph: PathBuf,
        #[arg(short, long, value_name = "ORDERING_JSON")]
        out: PathBuf,
    },
    /// Draw an ordered line graph as SVG
    Render {
        graph: PathBuf,
        ordering: PathBuf,
        #[arg(short, long, value_name = "SVG")]
        out: PathBuf,
    },
    /// Extract, optimize and render in one go
    Full {
        gtfs_dir: PathBuf,
        #[arg(short, long, value_name = "SVG")]
        out: PathBuf,
        /// Also write the line graph here
        #[arg(long, value_name = "GRAPH_JSON")]
        graph_out: Option<PathBuf>,
        /// Also write the ordering here
        #[arg(long, value_name = "ORDERING_JSON")]
        ordering_out: Option<PathBuf>,
    },
    /// Write a synthetic GTFS feed with the dimensions of a preset city
    Synth {
        /// freiburg, stuttgart or new-york
        preset: String,
        #[arg(short, long, value_name = "DIR")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the generating line graph here
        #[arg(long, value_name = "GRAPH_JSON")]
        graph_out: Option<PathBuf>,
        #[arg(long, default_value_t = 48.0, allow_negative_numbers = true)]
        lat: f64,
        #[arg(long, default_value_t = 7.8, allow_negative_numbers = true)]
        lon: f64,
    },
}

fn run(cli: Cli) -> Result<(), error::CliError> {
    let cfg = PipelineConfig::resolve(&cli.overrides)?;
    match cli.cmd {
        Cmd::Extract { gtfs_dir, out } => commands::extract(&cfg, &gtfs_dir, &out).map(|_| ()),
        Cmd::Optimize { graph, out } => commands::optimize(&cfg, &graph, &out),
        Cmd::Render { graph, ordering, out } => commands::render(&cfg, &graph, &ordering, &out),
        Cmd::Full { gtfs_dir, out, graph_out, ordering_out } => {
            commands::full(&cfg, &gtfs_dir, &out, graph_out.as_deref(), ordering_out.as_deref())
        }
        Cmd::Synth { preset, out, seed, graph_out, lat, lon } => {
            commands::synth(&preset, seed, &out, graph_out.as_deref(), lat, lon)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
