//! Simulated active-learning experiments: oracle, trial loop, multi-trial
//! aggregation, metrics and result export.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{score_to_probability, train_boosted, BoostConfig, BoostedModel, CommitteeConfig};
use crate::error::{Error, Result};
use crate::graph::{from_spatial_graph, LabelSet, SampleGraph, SpatialGraph};
use crate::propagation::PropagationConfig;
use crate::strategy::{QueryBatch, Selector, StrategyConfig, StrategyKind, MAX_BATCH};
use crate::synthetic::{generate_synthetic, SyntheticConfig};

/// Seed-set redraws tried before giving up on a degenerate dataset.
const MAX_SEED_RETRIES: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Accuracy,
    Voc,
}

impl Metric {
    pub fn evaluate(self, probabilities: &[f64], labels: &[bool]) -> Result<f64> {
        match self {
            Metric::Accuracy => accuracy(probabilities, labels),
            Metric::Voc => voc_score(probabilities, labels),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetConfig {
    Synthetic(SyntheticConfig),
    /// A sample-graph document with ground-truth labels.
    SampleGraph { path: PathBuf },
    /// A spatial-graph document whose edges carry ground-truth labels.
    SpatialGraph { path: PathBuf },
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig::Synthetic(SyntheticConfig::default())
    }
}

impl DatasetConfig {
    /// Loads the dataset; relative paths resolve against `base`.
    pub fn load(&self, base: Option<&Path>) -> Result<SampleGraph> {
        let resolve = |p: &Path| match base {
            Some(b) if p.is_relative() => b.join(p),
            _ => p.to_path_buf(),
        };
        match self {
            DatasetConfig::Synthetic(cfg) => generate_synthetic(cfg),
            DatasetConfig::SampleGraph { path } => SampleGraph::load(resolve(path)),
            DatasetConfig::SpatialGraph { path } => from_spatial_graph(&SpatialGraph::load(resolve(path))?),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub dataset: DatasetConfig,
    pub strategies: Vec<StrategyKind>,
    pub seed_per_class: usize,
    pub k: usize,
    pub budget: usize,
    pub trials: usize,
    pub metric: Metric,
    pub master_seed: u64,
    /// Fraction of each class held out for evaluation.
    pub eval_fraction: f64,
    pub classifier: BoostConfig,
    pub propagation: PropagationConfig,
    pub density_sigma: Option<f64>,
    pub committee: CommitteeConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: DatasetConfig::default(),
            strategies: StrategyKind::ALL.to_vec(),
            seed_per_class: 4,
            k: 2,
            budget: 100,
            trials: 30,
            metric: Metric::Accuracy,
            master_seed: 0,
            eval_fraction: 0.3,
            classifier: BoostConfig::default(),
            propagation: PropagationConfig::default(),
            density_sigma: None,
            committee: CommitteeConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.seed_per_class == 0 {
            return Err(Error::config("seed set needs at least one sample per class"));
        }
        if self.budget < 2 * self.seed_per_class {
            return Err(Error::config("budget must cover the seed set"));
        }
        if self.trials == 0 {
            return Err(Error::config("at least one trial is required"));
        }
        if self.strategies.is_empty() {
            return Err(Error::config("no strategies to run"));
        }
        if !(0.0..1.0).contains(&self.eval_fraction) {
            return Err(Error::config("eval fraction must be in [0, 1)"));
        }
        if !(1..=MAX_BATCH).contains(&self.k) {
            return Err(Error::config(format!("batch length k must be in 1..={MAX_BATCH}")));
        }
        self.classifier.validate()?;
        self.strategy_config(StrategyKind::Dps).validate()
    }

    pub fn strategy_config(&self, kind: StrategyKind) -> StrategyConfig {
        StrategyConfig {
            kind,
            k: self.k,
            propagation: self.propagation,
            density_sigma: self.density_sigma,
            committee: self.committee.clone(),
            seed: self.master_seed,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }
}

/// Returns ground-truth labels and counts annotation effort, one unit per
/// labeled sample.
#[derive(Debug)]
pub struct SimulatedOracle<'a> {
    sg: &'a SampleGraph,
    effort: usize,
}

impl<'a> SimulatedOracle<'a> {
    pub fn new(sg: &'a SampleGraph) -> Self {
        Self { sg, effort: 0 }
    }

    pub fn label(&mut self, index: usize) -> Result<bool> {
        if index >= self.sg.len() {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.sg.len(),
            });
        }
        let y = self.sg.sample(index).gt_label.ok_or(Error::MissingGroundTruth(index))?;
        self.effort += 1;
        Ok(y)
    }

    pub fn effort(&self) -> usize {
        self.effort
    }
}

/// One-shot oracle call.
pub fn simulated_oracle(sg: &SampleGraph, index: usize) -> Result<bool> {
    SimulatedOracle::new(sg).label(index)
}

fn check_lengths(probabilities: &[f64], labels: &[bool]) -> Result<()> {
    if probabilities.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            got: probabilities.len(),
        });
    }
    Ok(())
}

/// Fraction of correct predictions, predicting 1 when `p >= 0.5`; 0 for no
/// samples.
pub fn accuracy(probabilities: &[f64], labels: &[bool]) -> Result<f64> {
    check_lengths(probabilities, labels)?;
    if labels.is_empty() {
        return Ok(0.0);
    }
    let correct = probabilities.iter().zip(labels).filter(|(&p, &y)| (p >= 0.5) == y).count();
    Ok(correct as f64 / labels.len() as f64)
}

/// `TP / (TP + FP + FN)`, 0 when the denominator is 0.
pub fn voc_score(probabilities: &[f64], labels: &[bool]) -> Result<f64> {
    check_lengths(probabilities, labels)?;
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (&p, &y) in probabilities.iter().zip(labels) {
        match (p >= 0.5, y) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let denom = tp + fp + fn_;
    Ok(if denom == 0 { 0.0 } else { tp as f64 / denom as f64 })
}

/// A dataset split into a query pool and a held-out evaluation set.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub graph: SampleGraph,
    /// Pool samples as an induced subgraph; `pool_index[i]` is the dataset
    /// index of pool sample `i`.
    pub pool: SampleGraph,
    pub pool_index: Vec<usize>,
    pub eval_index: Vec<usize>,
    pub eval_labels: Vec<bool>,
}

impl Dataset {
    /// Stratified split: `eval_fraction` of each class, rounded, is held out.
    pub fn split(graph: SampleGraph, eval_fraction: f64, seed: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&eval_fraction) {
            return Err(Error::config("eval fraction must be in [0, 1)"));
        }
        let labels = graph.gt_labels()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut held = vec![false; graph.len()];
        for class in [false, true] {
            let mut members: Vec<usize> = (0..graph.len()).filter(|&i| labels[i] == class).collect();
            members.shuffle(&mut rng);
            let n_eval = (eval_fraction * members.len() as f64).round() as usize;
            for &i in &members[..n_eval] {
                held[i] = true;
            }
        }
        let pool_index: Vec<usize> = (0..graph.len()).filter(|&i| !held[i]).collect();
        let eval_index: Vec<usize> = (0..graph.len()).filter(|&i| held[i]).collect();
        let eval_labels = eval_index.iter().map(|&i| labels[i]).collect();
        let pool = graph.induced(&pool_index)?;
        Ok(Self {
            graph,
            pool,
            pool_index,
            eval_index,
            eval_labels,
        })
    }

    pub fn eval_probabilities(&self, model: &BoostedModel) -> Vec<f64> {
        self.eval_index
            .iter()
            .map(|&i| score_to_probability(model.score(self.graph.features(i))))
            .collect()
    }

    pub fn evaluate(&self, model: &BoostedModel, metric: Metric) -> Result<f64> {
        metric.evaluate(&self.eval_probabilities(model), &self.eval_labels)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub labels: usize,
    pub metric: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningCurve {
    pub strategy: StrategyKind,
    pub trial_seed: u64,
    pub points: Vec<CurvePoint>,
    /// The loop ran out of candidates before the budget was reached.
    pub truncated: bool,
}

impl LearningCurve {
    pub fn final_metric(&self) -> Option<f64> {
        self.points.last().map(|p| p.metric)
    }

    pub fn metric_at(&self, labels: usize) -> Option<f64> {
        self.points.iter().find(|p| p.labels == labels).map(|p| p.metric)
    }
}

/// One logged query; indices refer to the full dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub strategy: StrategyKind,
    pub trial: usize,
    pub iteration: usize,
    #[serde(with = "index_list")]
    pub indices: Vec<usize>,
    pub entropy: Option<f64>,
    pub sigma_g: Option<f64>,
    pub sigma_l: Option<f64>,
    pub sigma_i: Option<f64>,
    pub mu: Option<f64>,
}

impl QueryRecord {
    fn new(strategy: StrategyKind, trial: usize, iteration: usize, batch: &QueryBatch, pool_index: &[usize]) -> Self {
        let c = batch.components;
        let d = c.and_then(|c| c.density);
        Self {
            strategy,
            trial,
            iteration,
            indices: batch.indices.iter().map(|&i| pool_index[i]).collect(),
            entropy: c.map(|c| c.entropy),
            sigma_g: d.map(|d| d.sigma_g),
            sigma_l: d.map(|d| d.sigma_l),
            sigma_i: d.map(|d| d.sigma_i),
            mu: d.map(|d| d.mu),
        }
    }
}

/// Index lists as `a;b;c` in tables.
mod index_list {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[usize], s: S) -> Result<S::Ok, S::Error> {
        let text: Vec<String> = v.iter().map(usize::to_string).collect();
        s.serialize_str(&text.join(";"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<usize>, D::Error> {
        let text = String::deserialize(d)?;
        if text.is_empty() {
            return Ok(Vec::new());
        }
        text.split(';').map(|t| t.parse().map_err(D::Error::custom)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub curve: LearningCurve,
    pub queries: Vec<QueryRecord>,
    /// Oracle calls, seed set included.
    pub effort: usize,
    pub seed_retries: u64,
}

fn seed_set(pool: &SampleGraph, per_class: usize, trial_seed: u64) -> Result<(LabelSet, u64)> {
    let labels = pool.gt_labels()?;
    let by_class: Vec<Vec<usize>> = [false, true]
        .iter()
        .map(|&c| (0..pool.len()).filter(|&i| labels[i] == c).collect())
        .collect();
    if by_class.iter().any(|m| m.len() < per_class) {
        return Err(Error::config(format!(
            "pool needs at least {per_class} samples of each class"
        )));
    }
    for retry in 0..MAX_SEED_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        rng.set_stream(retry);
        let mut chosen: Vec<usize> = by_class
            .iter()
            .flat_map(|m| m.choose_multiple(&mut rng, per_class).copied().collect::<Vec<_>>())
            .collect();
        let first = pool.features(chosen[0]);
        if chosen.iter().all(|&i| pool.features(i) == first) {
            log::info!("seed set for trial seed {trial_seed} has identical features, redrawing");
            continue;
        }
        chosen.sort_unstable();
        let set = LabelSet::from_pairs(pool.len(), chosen.iter().map(|&i| (i, labels[i])))?;
        return Ok((set, retry));
    }
    Err(Error::DegenerateModel("every seed-set draw had identical features".into()))
}

fn train(pool: &SampleGraph, labels: &LabelSet, cfg: &BoostConfig, seed: u64) -> Result<BoostedModel> {
    let (x, y): (Vec<&[f64]>, Vec<bool>) = labels.iter().map(|(i, y)| (pool.features(i), y)).unzip();
    train_boosted(&x, &y, cfg, seed)
}

/// Runs one active-learning trial with a prepared selector.
pub fn run_trial_with(
    data: &Dataset,
    cfg: &ExperimentConfig,
    selector: &Selector,
    trial: usize,
    trial_seed: u64,
) -> Result<TrialResult> {
    let pool = &data.pool;
    let kind = selector.kind();
    let mut oracle = SimulatedOracle::new(pool);
    let (seeds, seed_retries) = seed_set(pool, cfg.seed_per_class, trial_seed)?;
    let mut labels = LabelSet::new(pool.len());
    for &i in seeds.indices() {
        labels.insert(i, oracle.label(i)?)?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    rng.set_stream(MAX_SEED_RETRIES);
    let mut model = train(pool, &labels, &cfg.classifier, rng.random())?;
    let mut curve = LearningCurve {
        strategy: kind,
        trial_seed,
        points: vec![CurvePoint {
            labels: labels.len(),
            metric: data.evaluate(&model, cfg.metric)?,
        }],
        truncated: false,
    };
    let mut queries = Vec::new();
    let mut iteration = 0;
    while labels.len() + cfg.k <= cfg.budget {
        let Some(batch) = selector.select(pool, &labels, Some(&model), &mut rng)? else {
            curve.truncated = true;
            break;
        };
        iteration += 1;
        for &i in &batch.indices {
            labels.insert(i, oracle.label(i)?)?;
        }
        queries.push(QueryRecord::new(kind, trial, iteration, &batch, &data.pool_index));
        model = train(pool, &labels, &cfg.classifier, rng.random())?;
        curve.points.push(CurvePoint {
            labels: labels.len(),
            metric: data.evaluate(&model, cfg.metric)?,
        });
    }
    Ok(TrialResult {
        curve,
        queries,
        effort: oracle.effort(),
        seed_retries,
    })
}

/// Runs one trial of `strategy`, building its selector.
pub fn run_trial(data: &Dataset, cfg: &ExperimentConfig, strategy: StrategyKind, trial_seed: u64) -> Result<TrialResult> {
    cfg.validate()?;
    let selector = Selector::new(&data.pool, cfg.strategy_config(strategy))?;
    run_trial_with(data, cfg, &selector, 0, trial_seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanPoint {
    pub labels: usize,
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyResult {
    pub strategy: StrategyKind,
    /// Mean over trials at every label count reached by all trials.
    pub mean_curve: Vec<MeanPoint>,
    pub final_mean: f64,
    /// Population variance of the final metric across trials.
    pub final_variance: f64,
    pub truncated_trials: usize,
    pub curves: Vec<LearningCurve>,
}

impl StrategyResult {
    pub fn mean_at(&self, labels: usize) -> Option<f64> {
        self.mean_curve.iter().find(|p| p.labels == labels).map(|p| p.mean)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateResult {
    pub metric: Metric,
    pub full_baseline: f64,
    pub pool_size: usize,
    pub eval_index: Vec<usize>,
    pub strategies: Vec<StrategyResult>,
    pub queries: Vec<QueryRecord>,
}

impl AggregateResult {
    pub fn strategy(&self, kind: StrategyKind) -> Option<&StrategyResult> {
        self.strategies.iter().find(|s| s.strategy == kind)
    }
}

fn mean_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.max(0.0))
}

fn aggregate(strategy: StrategyKind, curves: Vec<LearningCurve>) -> StrategyResult {
    let mut by_labels: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for c in &curves {
        for p in &c.points {
            by_labels.entry(p.labels).or_default().push(p.metric);
        }
    }
    let mean_curve = by_labels
        .into_iter()
        .filter(|(_, v)| v.len() == curves.len())
        .map(|(labels, v)| {
            let (mean, variance) = mean_var(&v);
            MeanPoint { labels, mean, variance }
        })
        .collect();
    let finals: Vec<f64> = curves.iter().filter_map(LearningCurve::final_metric).collect();
    let (final_mean, final_variance) = mean_var(&finals);
    StrategyResult {
        strategy,
        mean_curve,
        final_mean,
        final_variance,
        truncated_trials: curves.iter().filter(|c| c.truncated).count(),
        curves,
    }
}

/// Classifier trained on every pool label, evaluated on the held-out split.
pub fn full_baseline(data: &Dataset, cfg: &ExperimentConfig) -> Result<f64> {
    let all = LabelSet::from_pairs(data.pool.len(), data.pool.gt_labels()?.into_iter().enumerate())?;
    let model = train(&data.pool, &all, &cfg.classifier, cfg.master_seed)?;
    data.evaluate(&model, cfg.metric)
}

/// Runs every strategy for `cfg.trials` trials with seeds `master_seed + t`.
pub fn run_experiment_on(data: &Dataset, cfg: &ExperimentConfig) -> Result<AggregateResult> {
    cfg.validate()?;
    let selectors = cfg
        .strategies
        .iter()
        .map(|&s| Selector::new(&data.pool, cfg.strategy_config(s)))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..selectors.len())
        .flat_map(|s| (0..cfg.trials).map(move |t| (s, t)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(s, t)| run_trial_with(data, cfg, &selectors[s], t, cfg.master_seed.wrapping_add(t as u64)))
        .collect::<Result<Vec<_>>>()?;

    let mut strategies = Vec::with_capacity(selectors.len());
    let mut queries = Vec::new();
    let mut results = results.into_iter();
    for sel in &selectors {
        let mut curves = Vec::with_capacity(cfg.trials);
        for r in results.by_ref().take(cfg.trials) {
            queries.extend(r.queries);
            curves.push(r.curve);
        }
        strategies.push(aggregate(sel.kind(), curves));
    }
    Ok(AggregateResult {
        metric: cfg.metric,
        full_baseline: full_baseline(data, cfg)?,
        pool_size: data.pool.len(),
        eval_index: data.eval_index.clone(),
        strategies,
        queries,
    })
}

/// Loads the dataset, splits it with the master seed and runs the experiment.
pub fn run_experiment(cfg: &ExperimentConfig, base: Option<&Path>) -> Result<AggregateResult> {
    cfg.validate()?;
    let data = Dataset::split(cfg.dataset.load(base)?, cfg.eval_fraction, cfg.master_seed)?;
    run_experiment_on(&data, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub strategy: StrategyKind,
    pub labels: usize,
    pub mean_metric: f64,
    pub var_metric: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceEntry {
    pub strategy: StrategyKind,
    pub final_mean: f64,
    pub final_variance: f64,
    pub trials: usize,
    pub truncated_trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub metric: Metric,
    pub full_baseline: f64,
    pub pool_size: usize,
    pub eval_size: usize,
    pub eval_index: Vec<usize>,
    pub variance: Vec<VarianceEntry>,
}

impl AggregateResult {
    pub fn curve_rows(&self) -> Vec<CurveRow> {
        self.strategies
            .iter()
            .flat_map(|s| {
                s.mean_curve.iter().map(move |p| CurveRow {
                    strategy: s.strategy,
                    labels: p.labels,
                    mean_metric: p.mean,
                    var_metric: p.variance,
                })
            })
            .collect()
    }

    pub fn summary(&self) -> Summary {
        Summary {
            metric: self.metric,
            full_baseline: self.full_baseline,
            pool_size: self.pool_size,
            eval_size: self.eval_index.len(),
            eval_index: self.eval_index.clone(),
            variance: self
                .strategies
                .iter()
                .map(|s| VarianceEntry {
                    strategy: s.strategy,
                    final_mean: s.final_mean,
                    final_variance: s.final_variance,
                    trials: s.curves.len(),
                    truncated_trials: s.truncated_trials,
                })
                .collect(),
        }
    }
}

fn write_table<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn read_table<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

pub const CURVES_FILE: &str = "curves.csv";
pub const QUERIES_FILE: &str = "queries.csv";
pub const SUMMARY_FILE: &str = "summary.json";

const CURVE_HEADER: [&str; 4] = ["strategy", "labels", "mean_metric", "var_metric"];
const QUERY_HEADER: [&str; 9] = [
    "strategy", "trial", "iteration", "indices", "entropy", "sigma_g", "sigma_l", "sigma_i", "mu",
];

/// Writes `curves.csv`, `queries.csv` and `summary.json` into `dir`.
pub fn export_results(result: &AggregateResult, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    write_table(&dir.join(CURVES_FILE), &CURVE_HEADER, &result.curve_rows())?;
    write_table(&dir.join(QUERIES_FILE), &QUERY_HEADER, &result.queries)?;
    let mut f = File::create(dir.join(SUMMARY_FILE))?;
    serde_json::to_writer_pretty(&mut f, &result.summary())?;
    f.write_all(b"\n")?;
    Ok(())
}

pub fn read_curves(path: impl AsRef<Path>) -> Result<Vec<CurveRow>> {
    read_table(path.as_ref())
}

pub fn read_queries(path: impl AsRef<Path>) -> Result<Vec<QueryRecord>> {
    read_table(path.as_ref())
}

pub fn read_summary(path: impl AsRef<Path>) -> Result<Summary> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}
