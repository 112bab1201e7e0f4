//! Interactive annotation sessions.
//!
//! A session owns the label set of one annotator on one graph. Each round it
//! serves a batch, accepts labels for exactly that batch, retrains and selects
//! the next batch. Until both classes have been labeled there is no
//! classifier, so batches are drawn at random.
//!
//! Sessions are journaled as JSON lines: a header with the graph and config,
//! then one record per submitted batch. Replaying the journal reproduces the
//! session exactly, since every random draw comes from the session seed.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classifier::{score_to_probability, train_boosted, BoostConfig, BoostedModel};
use crate::error::{Error, Result};
use crate::graph::{from_spatial_graph, label01, LabelSet, SampleGraph, SpatialGraph};
use crate::strategy::{QueryBatch, Selector, StrategyConfig};

pub const EXPORT_FORMAT: &str = "alcurve-session";
pub const EXPORT_VERSION: u32 = 1;
const JOURNAL_EXTENSION: &str = "jsonl";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SessionConfig {
    pub strategy: StrategyConfig,
    pub classifier: BoostConfig,
    /// Total number of labels after which the session completes.
    pub budget: usize,
    pub seed: u64,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            strategy: StrategyConfig::default(),
            classifier: BoostConfig::default(),
            budget: 100,
            seed: 0,
        }
    }
}

impl SessionConfig {
    pub fn validate(&self) -> Result<()> {
        self.strategy.validate()?;
        self.classifier.validate()?;
        if self.budget < self.strategy.k {
            return Err(Error::config("budget is smaller than one batch"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    AwaitingLabels,
    Training,
    Complete,
}

/// The graph a session annotates; spatial graphs keep their geometry for
/// display.
#[derive(Debug, Clone)]
pub struct SessionGraph {
    pub samples: SampleGraph,
    pub spatial: Option<SpatialGraph>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum GraphDocument {
    Spatial(SpatialGraph),
    Samples(crate::graph::SampleGraphDoc),
}

impl SessionGraph {
    pub fn from_samples(samples: SampleGraph) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyGraph);
        }
        Ok(Self { samples, spatial: None })
    }

    pub fn from_spatial(spatial: SpatialGraph) -> Result<Self> {
        Ok(Self {
            samples: from_spatial_graph(&spatial)?,
            spatial: Some(spatial),
        })
    }

    /// Accepts either a spatial-graph or a sample-graph document.
    pub fn from_json(text: &str) -> Result<Self> {
        match serde_json::from_str::<GraphDocument>(text)
            .map_err(|e| Error::Parse(format!("not a spatial or sample graph document: {e}")))?
        {
            GraphDocument::Spatial(g) => {
                g.validate()?;
                Self::from_spatial(g)
            }
            GraphDocument::Samples(doc) => Self::from_samples(SampleGraph::from_document(doc)?),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    fn to_value(&self) -> Result<serde_json::Value> {
        Ok(match &self.spatial {
            Some(g) => serde_json::to_value(g)?,
            None => serde_json::to_value(self.samples.to_document())?,
        })
    }
}

/// A label for one sample, written as 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub index: usize,
    #[serde(with = "label01")]
    pub label: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryLogEntry {
    pub iteration: usize,
    pub batch: QueryBatch,
    pub labels: Vec<LabeledSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum JournalRecord {
    Header {
        version: u32,
        id: String,
        config: SessionConfig,
        graph: serde_json::Value,
    },
    Labels {
        iteration: usize,
        labels: Vec<LabeledSample>,
    },
}

/// What a client needs to show the pending batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryView {
    pub session: String,
    pub iteration: usize,
    pub status: SessionStatus,
    pub indices: Vec<usize>,
    pub items: Vec<QueryItem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<crate::strategy::ScoreComponents>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryItem {
    pub index: usize,
    pub id: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polyline: Option<Vec<Vec<f64>>>,
    /// Classifier probability of the positive class, once a model exists.
    pub probability: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatusView {
    pub session: String,
    pub status: SessionStatus,
    pub iteration: usize,
    pub labeled: usize,
    pub positives: usize,
    pub negatives: usize,
    pub budget: usize,
    pub samples: usize,
    pub has_model: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphView {
    pub session: String,
    pub samples: Vec<GraphSample>,
    pub adjacency: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<crate::graph::SpatialNode>>,
    pub current_batch: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSample {
    pub index: usize,
    pub id: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polyline: Option<Vec<Vec<f64>>>,
    pub probability: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "label01::opt")]
    pub label: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionExport {
    pub format: String,
    pub version: u32,
    pub id: String,
    pub config: SessionConfig,
    pub status: SessionStatus,
    pub iteration: usize,
    pub labels: Vec<LabeledSample>,
    /// The current classifier in its versioned document form.
    pub model: Option<serde_json::Value>,
    pub query_log: Vec<QueryLogEntry>,
    pub pending: Option<QueryBatch>,
}

impl SessionExport {
    pub fn from_json(text: &str) -> Result<Self> {
        let e: SessionExport = serde_json::from_str(text)?;
        if e.format != EXPORT_FORMAT {
            return Err(Error::Parse(format!("not a session export: {}", e.format)));
        }
        if e.version != EXPORT_VERSION {
            return Err(Error::UnsupportedVersion {
                found: e.version,
                expected: EXPORT_VERSION,
            });
        }
        Ok(e)
    }
}

/// Result of one retrain-and-select step.
#[derive(Debug, Clone)]
pub struct Advance {
    model: Option<BoostedModel>,
    batch: Option<QueryBatch>,
    rng: ChaCha8Rng,
}

/// Labels recorded and awaiting the retrain that finishes a submission.
#[derive(Debug, Clone)]
pub struct PendingStep {
    graph: Arc<SessionGraph>,
    selector: Arc<Selector>,
    config: SessionConfig,
    labels: LabelSet,
    rng: ChaCha8Rng,
}

impl PendingStep {
    pub fn run(self) -> Result<Advance> {
        advance(&self.graph.samples, &self.selector, &self.config, &self.labels, self.rng)
    }
}

fn advance(
    sg: &SampleGraph,
    selector: &Selector,
    cfg: &SessionConfig,
    labels: &LabelSet,
    mut rng: ChaCha8Rng,
) -> Result<Advance> {
    let model = if labels.count(true) > 0 && labels.count(false) > 0 {
        let (x, y): (Vec<&[f64]>, Vec<bool>) = labels.iter().map(|(i, y)| (sg.features(i), y)).unzip();
        Some(train_boosted(&x, &y, &cfg.classifier, rng.random())?)
    } else {
        None
    };
    let batch = if labels.len() + cfg.strategy.k > cfg.budget {
        None
    } else {
        selector.select(sg, labels, model.as_ref(), &mut rng)?
    };
    Ok(Advance { model, batch, rng })
}

#[derive(Debug)]
pub struct Session {
    id: String,
    graph: Arc<SessionGraph>,
    config: SessionConfig,
    selector: Arc<Selector>,
    labels: LabelSet,
    model: Option<BoostedModel>,
    probabilities: Option<Vec<f64>>,
    current: Option<QueryBatch>,
    iteration: usize,
    status: SessionStatus,
    rng: ChaCha8Rng,
    log: Vec<QueryLogEntry>,
    journal: Option<PathBuf>,
}

impl Session {
    /// A new session with its first (random) batch selected.
    pub fn new(id: impl Into<String>, graph: Arc<SessionGraph>, config: SessionConfig) -> Result<Self> {
        config.validate()?;
        let sg = &graph.samples;
        if sg.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let selector = Arc::new(Selector::new(sg, config.strategy.clone())?);
        let labels = LabelSet::new(sg.len());
        let step = advance(sg, &selector, &config, &labels, ChaCha8Rng::seed_from_u64(config.seed))?;
        let mut s = Self {
            id: id.into(),
            graph,
            config,
            selector,
            labels,
            model: None,
            probabilities: None,
            current: None,
            iteration: 0,
            status: SessionStatus::AwaitingLabels,
            rng: ChaCha8Rng::seed_from_u64(0),
            log: Vec::new(),
            journal: None,
        };
        s.install(step);
        Ok(s)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn graph(&self) -> &SessionGraph {
        &self.graph
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn model(&self) -> Option<&BoostedModel> {
        self.model.as_ref()
    }

    pub fn current_batch(&self) -> Option<&QueryBatch> {
        self.current.as_ref()
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn status(&self) -> SessionStatus {
        self.status
    }

    pub fn query_log(&self) -> &[QueryLogEntry] {
        &self.log
    }

    fn install(&mut self, step: Advance) {
        self.probabilities = step.model.as_ref().map(|m| {
            (0..self.graph.samples.len())
                .map(|i| score_to_probability(m.score(self.graph.samples.features(i))))
                .collect()
        });
        self.model = step.model;
        self.rng = step.rng;
        self.status = if step.batch.is_some() {
            SessionStatus::AwaitingLabels
        } else {
            SessionStatus::Complete
        };
        self.current = step.batch;
    }

    /// Validates and records labels for the pending batch, and marks the
    /// session as training. The returned step must be run and passed to
    /// [`finish`](Self::finish).
    pub fn begin_submit(&mut self, labels: &[LabeledSample]) -> Result<PendingStep> {
        match self.status {
            SessionStatus::AwaitingLabels => {}
            SessionStatus::Training => return Err(Error::InvalidState("training".into())),
            SessionStatus::Complete => return Err(Error::InvalidState("complete".into())),
        }
        let batch = self.current.as_ref().expect("awaiting labels implies a batch");
        let mut got: Vec<usize> = labels.iter().map(|l| l.index).collect();
        got.sort_unstable();
        if got != batch.indices {
            if let Some(l) = labels.iter().find(|l| self.labels.contains(l.index)) {
                return Err(Error::DuplicateLabel(l.index));
            }
            return Err(Error::BatchMismatch {
                expected: batch.indices.clone(),
                got,
            });
        }
        let mut sorted = labels.to_vec();
        sorted.sort_unstable_by_key(|l| l.index);
        if let Some(path) = &self.journal {
            append_record(
                path,
                &JournalRecord::Labels {
                    iteration: self.iteration,
                    labels: sorted.clone(),
                },
            )?;
        }
        for l in &sorted {
            self.labels.insert(l.index, l.label)?;
        }
        self.log.push(QueryLogEntry {
            iteration: self.iteration,
            batch: self.current.take().expect("checked above"),
            labels: sorted,
        });
        self.iteration += 1;
        self.status = SessionStatus::Training;
        Ok(PendingStep {
            graph: Arc::clone(&self.graph),
            selector: Arc::clone(&self.selector),
            config: self.config.clone(),
            labels: self.labels.clone(),
            rng: self.rng.clone(),
        })
    }

    /// Installs the retrained model and next batch.
    pub fn finish(&mut self, step: Result<Advance>) -> Result<()> {
        match step {
            Ok(step) => {
                self.install(step);
                Ok(())
            }
            Err(e) => {
                // The labels are journaled; the session can still be restored.
                self.status = SessionStatus::Complete;
                Err(e)
            }
        }
    }

    /// Submits labels and retrains synchronously.
    pub fn submit(&mut self, labels: &[LabeledSample]) -> Result<()> {
        let step = self.begin_submit(labels)?;
        self.finish(step.run())
    }

    fn sample_probability(&self, i: usize) -> Option<f64> {
        self.probabilities.as_ref().map(|p| p[i])
    }

    fn polyline(&self, i: usize) -> Option<Vec<Vec<f64>>> {
        self.graph.spatial.as_ref().map(|g| g.edges[i].polyline.clone())
    }

    pub fn query_view(&self) -> QueryView {
        let (indices, score, components) = match &self.current {
            Some(b) => (b.indices.clone(), Some(b.score), b.components),
            None => (Vec::new(), None, None),
        };
        let items = indices
            .iter()
            .map(|&i| QueryItem {
                index: i,
                id: self.graph.samples.sample(i).id,
                position: self.graph.samples.sample(i).position.clone(),
                polyline: self.polyline(i),
                probability: self.sample_probability(i),
            })
            .collect();
        QueryView {
            session: self.id.clone(),
            iteration: self.iteration,
            status: self.status,
            indices,
            items,
            score,
            components,
        }
    }

    pub fn status_view(&self) -> StatusView {
        StatusView {
            session: self.id.clone(),
            status: self.status,
            iteration: self.iteration,
            labeled: self.labels.len(),
            positives: self.labels.count(true),
            negatives: self.labels.count(false),
            budget: self.config.budget,
            samples: self.graph.samples.len(),
            has_model: self.model.is_some(),
        }
    }

    pub fn graph_view(&self) -> GraphView {
        let sg = &self.graph.samples;
        GraphView {
            session: self.id.clone(),
            samples: (0..sg.len())
                .map(|i| GraphSample {
                    index: i,
                    id: sg.sample(i).id,
                    position: sg.sample(i).position.clone(),
                    polyline: self.polyline(i),
                    probability: self.sample_probability(i),
                    label: self.labels.get(i),
                })
                .collect(),
            adjacency: sg.edges().map(|(a, b)| [a, b]).collect(),
            nodes: self.graph.spatial.as_ref().map(|g| g.nodes.clone()),
            current_batch: self.current.as_ref().map(|b| b.indices.clone()).unwrap_or_default(),
        }
    }

    pub fn export(&self) -> Result<SessionExport> {
        let model = match &self.model {
            Some(m) => Some(serde_json::from_str(&m.to_json()?)?),
            None => None,
        };
        Ok(SessionExport {
            format: EXPORT_FORMAT.into(),
            version: EXPORT_VERSION,
            id: self.id.clone(),
            config: self.config.clone(),
            status: self.status,
            iteration: self.iteration,
            labels: self.labels.iter().map(|(index, label)| LabeledSample { index, label }).collect(),
            model,
            query_log: self.log.clone(),
            pending: self.current.clone(),
        })
    }

    /// Rebuilds a session from an export by replaying its query log.
    pub fn restore(graph: Arc<SessionGraph>, export: &SessionExport) -> Result<Self> {
        let mut s = Self::new(export.id.clone(), graph, export.config.clone())?;
        s.replay(export.query_log.iter().map(|e| (e.iteration, e.labels.as_slice())))?;
        if s.current != export.pending {
            return Err(Error::Parse("replayed session diverges from the export".into()));
        }
        Ok(s)
    }

    fn replay<'a, I>(&mut self, entries: I) -> Result<()>
    where
        I: IntoIterator<Item = (usize, &'a [LabeledSample])>,
    {
        for (iteration, labels) in entries {
            if iteration != self.iteration {
                return Err(Error::Parse(format!(
                    "log entry for iteration {iteration} where {} was expected",
                    self.iteration
                )));
            }
            self.submit(labels)?;
        }
        Ok(())
    }

    /// Starts journaling to `path`, writing the header.
    fn start_journal(&mut self, path: PathBuf) -> Result<()> {
        let header = JournalRecord::Header {
            version: EXPORT_VERSION,
            id: self.id.clone(),
            config: self.config.clone(),
            graph: self.graph.to_value()?,
        };
        let mut f = File::create(&path)?;
        writeln!(f, "{}", serde_json::to_string(&header)?)?;
        f.sync_data()?;
        self.journal = Some(path);
        Ok(())
    }

    /// Loads a journal; a truncated final line is ignored.
    pub fn from_journal(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let reader = BufReader::new(File::open(path)?);
        let mut lines: Vec<String> = reader.lines().collect::<std::io::Result<_>>()?;
        lines.retain(|l| !l.trim().is_empty());
        let Some(first) = lines.first() else {
            return Err(Error::Parse(format!("{} is empty", path.display())));
        };
        let JournalRecord::Header { version, id, config, graph } = serde_json::from_str(first)? else {
            return Err(Error::Parse("journal does not start with a header".into()));
        };
        if version != EXPORT_VERSION {
            return Err(Error::UnsupportedVersion {
                found: version,
                expected: EXPORT_VERSION,
            });
        }
        let graph = Arc::new(SessionGraph::from_json(&graph.to_string())?);
        let mut records = Vec::new();
        let last = lines.len() - 1;
        for (n, line) in lines.iter().enumerate().skip(1) {
            match serde_json::from_str::<JournalRecord>(line) {
                Ok(JournalRecord::Labels { iteration, labels }) => records.push((iteration, labels)),
                Ok(JournalRecord::Header { .. }) => return Err(Error::Parse("repeated journal header".into())),
                Err(e) if n == last => {
                    log::warn!("ignoring truncated last record of {}: {e}", path.display());
                }
                Err(e) => return Err(e.into()),
            }
        }
        let mut s = Self::new(id, graph, config)?;
        s.replay(records.iter().map(|(i, l)| (*i, l.as_slice())))?;
        s.journal = Some(path.to_path_buf());
        Ok(s)
    }
}

fn append_record(path: &Path, record: &JournalRecord) -> Result<()> {
    let mut f = OpenOptions::new().append(true).open(path)?;
    writeln!(f, "{}", serde_json::to_string(record)?)?;
    f.sync_data()?;
    Ok(())
}

/// Concurrent collection of sessions, optionally persisted to a directory.
///
/// Each session has its own lock, so submissions to one session are
/// serialized while other sessions proceed independently. Retraining runs
/// outside the lock with the session marked as training.
#[derive(Debug, Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    dir: Option<PathBuf>,
}

impl SessionStore {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens a persistent store, restoring every journal found in `dir`.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        let mut sessions = HashMap::new();
        let mut paths: Vec<PathBuf> = fs::read_dir(&dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == JOURNAL_EXTENSION))
            .collect();
        paths.sort();
        for p in paths {
            let s = Session::from_journal(&p)?;
            log::info!("restored session {} at iteration {}", s.id(), s.iteration());
            sessions.insert(s.id().to_string(), Arc::new(Mutex::new(s)));
        }
        Ok(Self {
            sessions: RwLock::new(sessions),
            dir: Some(dir),
        })
    }

    pub fn create(&self, graph: SessionGraph, config: SessionConfig) -> Result<String> {
        let id = uuid::Uuid::new_v4().to_string();
        let mut s = Session::new(id.clone(), Arc::new(graph), config)?;
        if let Some(dir) = &self.dir {
            s.start_journal(dir.join(format!("{id}.{JOURNAL_EXTENSION}")))?;
        }
        self.sessions
            .write()
            .expect("session map lock")
            .insert(id.clone(), Arc::new(Mutex::new(s)));
        Ok(id)
    }

    pub fn get(&self, id: &str) -> Result<Arc<Mutex<Session>>> {
        self.sessions
            .read()
            .expect("session map lock")
            .get(id)
            .cloned()
            .ok_or_else(|| Error::UnknownSession(id.to_string()))
    }

    pub fn ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.sessions.read().expect("session map lock").keys().cloned().collect();
        ids.sort();
        ids
    }

    pub fn with<T>(&self, id: &str, f: impl FnOnce(&Session) -> T) -> Result<T> {
        let s = self.get(id)?;
        let guard = s.lock().expect("session lock");
        Ok(f(&guard))
    }

    /// Records labels, retrains without holding the session lock, and
    /// installs the next batch.
    pub fn submit(&self, id: &str, labels: &[LabeledSample]) -> Result<StatusView> {
        let s = self.get(id)?;
        let step = s.lock().expect("session lock").begin_submit(labels)?;
        let outcome = step.run();
        let mut guard = s.lock().expect("session lock");
        guard.finish(outcome)?;
        Ok(guard.status_view())
    }
}
