use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use alcurve_core::harness::{export_results, read_queries, run_experiment, AggregateResult, ExperimentConfig};
use alcurve_core::session::{SessionConfig, SessionGraph, SessionStore};
use alcurve_core::strategy::{StrategyConfig, StrategyKind};
use alcurve_core::synthetic::{accumulate_heatmap, generate_synthetic, GridSpec, SyntheticConfig};
use alcurve_core::SampleGraph;
use anyhow::{Context, Result};

use crate::server::{router, AppState};

/// Runs an experiment config and writes the result tables into `out`.
pub fn run(config: &Path, out: &Path) -> Result<AggregateResult> {
    let cfg = ExperimentConfig::load(config).with_context(|| format!("loading {}", config.display()))?;
    let started = std::time::Instant::now();
    let result = run_experiment(&cfg, config.parent())?;
    log::info!("experiment finished in {:.1?}", started.elapsed());
    export_results(&result, out)?;
    Ok(result)
}

pub fn format_summary(result: &AggregateResult) -> String {
    let mut s = format!("full baseline: {:.4}\n", result.full_baseline);
    s.push_str("strategy  final_mean  final_variance\n");
    for r in &result.strategies {
        s.push_str(&format!("{:<8}  {:<10.4}  {:.6}\n", r.strategy.as_str(), r.final_mean, r.final_variance));
    }
    s
}

/// `source` is `default` or a TOML file of generator parameters.
pub fn synthetic_config(source: &str, seed: Option<u64>) -> Result<SyntheticConfig> {
    let mut cfg = if source == "default" {
        SyntheticConfig::default()
    } else {
        let text = fs::read_to_string(source).with_context(|| format!("reading {source}"))?;
        toml::from_str(&text).with_context(|| format!("parsing {source}"))?
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

pub fn generate(source: &str, seed: Option<u64>, out: &Path) -> Result<SampleGraph> {
    let sg = generate_synthetic(&synthetic_config(source, seed)?)?;
    sg.save(out)?;
    Ok(sg)
}

/// Bins the features of one strategy's logged queries.
pub fn heatmap(graph: &Path, queries: &Path, strategy: StrategyKind, cells: usize, out: &Path) -> Result<()> {
    let sg = SampleGraph::load(graph)?;
    let records = read_queries(queries)?;
    let half = (0..sg.len())
        .flat_map(|i| sg.features(i).iter().take(2).map(|v| v.abs()))
        .fold(0.0, f64::max);
    let queried = records
        .iter()
        .filter(|r| r.strategy == strategy)
        .flat_map(|r| r.indices.iter().map(|&i| sg.features(i)));
    accumulate_heatmap(queried, GridSpec::square(half, cells))?.save(out)?;
    Ok(())
}

pub struct ServeOptions {
    pub graph: Option<PathBuf>,
    pub strategy: StrategyKind,
    pub k: usize,
    pub budget: usize,
    pub seed: u64,
    pub port: u16,
    pub data_dir: Option<PathBuf>,
}

pub async fn serve(opts: ServeOptions) -> Result<()> {
    let graph = match &opts.graph {
        Some(p) => Some(SessionGraph::load(p).with_context(|| format!("loading {}", p.display()))?),
        None => None,
    };
    let store = match &opts.data_dir {
        Some(d) => SessionStore::open(d)?,
        None => SessionStore::in_memory(),
    };
    let config = SessionConfig {
        strategy: StrategyConfig {
            k: opts.k,
            ..StrategyConfig::new(opts.strategy)
        },
        budget: opts.budget,
        seed: opts.seed,
        ..Default::default()
    };
    config.validate()?;
    let app = router(Arc::new(AppState::new(store, graph, config)));
    let addr = SocketAddr::from(([127, 0, 0, 1], opts.port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
