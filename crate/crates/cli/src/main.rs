use std::path::PathBuf;

use alcurve_cli::commands::{self, ServeOptions};
use alcurve_core::strategy::StrategyKind;
use anyhow::Result;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "alcurve", version, about = "Active learning for path classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a multi-trial experiment and write curves.csv, queries.csv and summary.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Generate the synthetic dataset as a sample-graph document.
    Generate {
        /// `default` or a TOML file of generator parameters.
        #[arg(long, default_value = "default")]
        synthetic: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "synthetic.json")]
        out: PathBuf,
    },
    /// Serve annotation sessions over HTTP.
    Serve {
        /// Default graph for sessions created without one.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, default_value = "dps")]
        strategy: StrategyKind,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory for session journals; sessions are kept in memory only when omitted.
        #[arg(long)]
        data_dir: Option<PathBuf>,
    },
    /// Bin the feature vectors of logged queries into a heat-map.
    Heatmap {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long, default_value = "dps")]
        strategy: StrategyKind,
        #[arg(long, default_value_t = 20)]
        cells: usize,
        #[arg(long, default_value = "heatmap.json")]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Run { config, out } => {
            let result = commands::run(&config, &out)?;
            print!("{}", commands::format_summary(&result));
            println!("results written to {}", out.display());
        }
        Command::Generate { synthetic, seed, out } => {
            let sg = commands::generate(&synthetic, seed, &out)?;
            println!("{} samples, {} edges -> {}", sg.len(), sg.edge_count(), out.display());
        }
        Command::Serve { graph, strategy, k, budget, seed, port, data_dir } => {
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(commands::serve(ServeOptions { graph, strategy, k, budget, seed, port, data_dir }))?;
        }
        Command::Heatmap { graph, queries, strategy, cells, out } => {
            commands::heatmap(&graph, &queries, strategy, cells, &out)?;
            println!("heat-map written to {}", out.display());
        }
    }
    Ok(())
}
