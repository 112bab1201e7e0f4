use std::process::Command;

use alcurve_core::harness::{read_curves, read_summary};
use alcurve_core::synthetic::HeatMap;
use alcurve_core::SampleGraph;

fn alcurve() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_alcurve"));
    c.env("RUST_LOG", "warn");
    c
}

#[test]
fn generate_run_and_heatmap() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("params.toml");
    std::fs::write(&params, "n_points = 120\nseed = 4\n").unwrap();
    let graph = dir.path().join("graph.json");
    let out = alcurve()
        .args(["generate", "--synthetic"])
        .arg(&params)
        .arg("--out")
        .arg(&graph)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(SampleGraph::load(&graph).unwrap().len(), 120);

    let config = dir.path().join("experiment.toml");
    std::fs::write(
        &config,
        "strategies = [\"rs\", \"dps\"]\ntrials = 2\nbudget = 16\n\n[dataset]\nkind = \"sample_graph\"\npath = \"graph.json\"\n",
    )
    .unwrap();
    let results = dir.path().join("results");
    let out = alcurve()
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&results)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("full baseline"), "{stdout}");
    let curves = read_curves(results.join("curves.csv")).unwrap();
    assert_eq!(curves.len(), 2 * 5);
    assert_eq!(read_summary(results.join("summary.json")).unwrap().variance.len(), 2);

    let heat = dir.path().join("heat.json");
    let out = alcurve()
        .args(["heatmap", "--graph"])
        .arg(&graph)
        .arg("--queries")
        .arg(results.join("queries.csv"))
        .args(["--strategy", "dps", "--cells", "8", "--out"])
        .arg(&heat)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let h = HeatMap::from_json(&std::fs::read_to_string(&heat).unwrap()).unwrap();
    // Two trials of four pair queries.
    assert_eq!(h.total(), 16);
}

#[test]
fn rejects_bad_input() {
    let out = alcurve().args(["run", "--config", "/nonexistent.toml"]).output().unwrap();
    assert!(!out.status.success());
    let out = alcurve().args(["serve", "--strategy", "bogus"]).output().unwrap();
    assert!(!out.status.success());
}
