//! Batch query strategies.
//!
//! All selectors take the candidate batches produced by
//! [`candidate_batches`](crate::graph::candidate_batches) and return the
//! argmax of their score; ties go to the lexicographically smallest index
//! tuple, independent of candidate order.

mod density;

pub use density::{density_measures, mu, DensityMeasures};

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use self::density::DensityCache;
use crate::classifier::{
    score_to_probability, train_committee, vote_disagreement, BoostedModel, Committee, CommitteeConfig,
};
use crate::error::{Error, Result};
use crate::graph::{candidate_batches_with_fallback, LabelSet, SampleGraph};
use crate::propagation::{
    build_affinity, entropy, propagated_entropy, AffinityMatrix, ProbabilityTable, PropagationConfig,
    Propagator, Support,
};

/// Largest batch length for which exhaustive enumeration is allowed.
pub const MAX_BATCH: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    Rs,
    Us,
    Qbc,
    Pps,
    Dps,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 5] = [
        StrategyKind::Rs,
        StrategyKind::Us,
        StrategyKind::Qbc,
        StrategyKind::Pps,
        StrategyKind::Dps,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyKind::Rs => "rs",
            StrategyKind::Us => "us",
            StrategyKind::Qbc => "qbc",
            StrategyKind::Pps => "pps",
            StrategyKind::Dps => "dps",
        }
    }

    fn needs_propagation(self) -> bool {
        matches!(self, StrategyKind::Pps | StrategyKind::Dps)
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rs" | "random" => Ok(StrategyKind::Rs),
            "us" | "uncertainty" => Ok(StrategyKind::Us),
            "qbc" | "committee" => Ok(StrategyKind::Qbc),
            "pps" => Ok(StrategyKind::Pps),
            "dps" => Ok(StrategyKind::Dps),
            other => Err(Error::config(format!("unknown strategy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StrategyConfig {
    pub kind: StrategyKind,
    pub k: usize,
    pub propagation: PropagationConfig,
    /// Bandwidth of the global affinity; defaults to the propagation one.
    pub density_sigma: Option<f64>,
    pub committee: CommitteeConfig,
    pub seed: u64,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        Self {
            kind: StrategyKind::Dps,
            k: 2,
            propagation: PropagationConfig::default(),
            density_sigma: None,
            committee: CommitteeConfig::default(),
            seed: 0,
        }
    }
}

impl StrategyConfig {
    pub fn new(kind: StrategyKind) -> Self {
        Self {
            kind,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_BATCH).contains(&self.k) {
            return Err(Error::config(format!("batch length k must be in 1..={MAX_BATCH}")));
        }
        self.propagation.validate()?;
        if let Some(s) = self.density_sigma {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::config("density sigma must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreComponents {
    /// Summed (propagated) entropy over the batch.
    pub entropy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<DensityComponents>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityComponents {
    pub sigma_g: f64,
    pub sigma_l: f64,
    pub sigma_i: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryBatch {
    pub indices: Vec<usize>,
    pub score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<ScoreComponents>,
    /// Set when fewer than `k` samples were queried because no connected
    /// `k`-batch remained.
    #[serde(default)]
    pub reduced: bool,
}

impl QueryBatch {
    fn scored(indices: &[usize], score: f64) -> Self {
        Self {
            indices: indices.to_vec(),
            score,
            components: None,
            reduced: false,
        }
    }
}

/// Index of the best candidate under the tie rule.
fn argmax_by<F>(candidates: &[Vec<usize>], score: F) -> Option<(usize, f64)>
where
    F: Fn(&[usize]) -> f64 + Sync,
{
    candidates
        .par_iter()
        .enumerate()
        .map(|(i, c)| (i, score(c)))
        .reduce_with(|a, b| {
            if b.1 > a.1 || (b.1 == a.1 && candidates[b.0] < candidates[a.0]) {
                b
            } else {
                a
            }
        })
}

fn require_nonempty(candidates: &[Vec<usize>]) -> Result<()> {
    if candidates.is_empty() {
        return Err(Error::config("no candidate batches to select from"));
    }
    Ok(())
}

/// Highest summed per-sample score.
pub fn select_by_sum(candidates: &[Vec<usize>], per_sample: &[f64]) -> Result<QueryBatch> {
    require_nonempty(candidates)?;
    let (best, score) = argmax_by(candidates, |c| c.iter().map(|&i| per_sample[i]).sum())
        .expect("nonempty candidates");
    Ok(QueryBatch::scored(&candidates[best], score))
}

pub fn select_rs<R: Rng + ?Sized>(candidates: &[Vec<usize>], rng: &mut R) -> Result<QueryBatch> {
    require_nonempty(candidates)?;
    let pick = rng.random_range(0..candidates.len());
    Ok(QueryBatch::scored(&candidates[pick], 0.0))
}

/// Uncertainty sampling on classifier probabilities `p(y=1)`.
pub fn select_us(candidates: &[Vec<usize>], positive: &[f64]) -> Result<QueryBatch> {
    let h: Vec<f64> = positive.iter().map(|&p| entropy(p)).collect();
    let mut batch = select_by_sum(candidates, &h)?;
    batch.components = Some(entropy_only(batch.score));
    Ok(batch)
}

/// Query-by-committee on summed vote entropy.
pub fn select_qbc(candidates: &[Vec<usize>], committee: &Committee, sg: &SampleGraph) -> Result<QueryBatch> {
    let d: Vec<f64> = (0..sg.len()).map(|i| vote_disagreement(committee, sg.features(i))).collect();
    select_by_sum(candidates, &d)
}

/// Propagated-entropy sampling.
pub fn select_pps(candidates: &[Vec<usize>], propagated: &ProbabilityTable, labels: &LabelSet) -> Result<QueryBatch> {
    let h = propagated_entropy(propagated, labels);
    let mut batch = select_by_sum(candidates, &h)?;
    batch.components = Some(entropy_only(batch.score));
    Ok(batch)
}

/// Density-weighted propagated entropy: `mu(E) * sum_E H`.
pub fn select_dps(
    candidates: &[Vec<usize>],
    propagated: &ProbabilityTable,
    labels: &LabelSet,
    global: &AffinityMatrix,
) -> Result<QueryBatch> {
    require_nonempty(candidates)?;
    let h = propagated_entropy(propagated, labels);
    let cache = DensityCache::new(global, labels)?;
    let (best, score) = argmax_by(candidates, |c| {
        let m = cache.measures(c);
        m.mu() * c.iter().map(|&i| h[i]).sum::<f64>()
    })
    .expect("nonempty candidates");
    let chosen = &candidates[best];
    let m = cache.measures(chosen);
    let mut batch = QueryBatch::scored(chosen, score);
    batch.components = Some(ScoreComponents {
        entropy: chosen.iter().map(|&i| h[i]).sum(),
        density: Some(DensityComponents {
            sigma_g: m.sigma_g,
            sigma_l: m.sigma_l,
            sigma_i: m.sigma_i,
            mu: m.mu(),
        }),
    });
    Ok(batch)
}

fn entropy_only(h: f64) -> ScoreComponents {
    ScoreComponents { entropy: h, density: None }
}

/// Positive-class probabilities of `model` for every sample.
pub fn classifier_probabilities(model: &BoostedModel, sg: &SampleGraph) -> Vec<f64> {
    (0..sg.len())
        .map(|i| score_to_probability(model.score(sg.features(i))))
        .collect()
}

/// A configured strategy bound to one graph, holding the affinity operators
/// that do not change between rounds.
#[derive(Debug, Clone)]
pub struct Selector {
    cfg: StrategyConfig,
    propagator: Option<Propagator>,
    global: Option<AffinityMatrix>,
}

impl Selector {
    pub fn new(sg: &SampleGraph, cfg: StrategyConfig) -> Result<Self> {
        cfg.validate()?;
        let propagator = if cfg.kind.needs_propagation() {
            Some(Propagator::new(sg, &cfg.propagation)?)
        } else {
            None
        };
        let global = if cfg.kind == StrategyKind::Dps {
            let sigma = match (cfg.density_sigma, &propagator) {
                (Some(s), _) => s,
                (None, Some(p)) => p.sigma(),
                (None, None) => cfg.propagation.resolve_sigma(sg),
            };
            Some(build_affinity(sg, sigma, Support::Global)?)
        } else {
            None
        };
        Ok(Self {
            cfg,
            propagator,
            global,
        })
    }

    pub fn config(&self) -> &StrategyConfig {
        &self.cfg
    }

    pub fn kind(&self) -> StrategyKind {
        self.cfg.kind
    }

    /// Next batch to annotate, or `None` when every sample is labeled.
    ///
    /// Without a trained model (no classifier yet) the batch is random.
    pub fn select<R: Rng + ?Sized>(
        &self,
        sg: &SampleGraph,
        labels: &LabelSet,
        model: Option<&BoostedModel>,
        rng: &mut R,
    ) -> Result<Option<QueryBatch>> {
        let (candidates, size) = candidate_batches_with_fallback(sg, self.cfg.k, labels);
        if candidates.is_empty() {
            return Ok(None);
        }
        let mut batch = match (self.cfg.kind, model) {
            (StrategyKind::Rs, _) | (_, None) => select_rs(&candidates, rng)?,
            (StrategyKind::Us, Some(m)) => select_us(&candidates, &classifier_probabilities(m, sg))?,
            (StrategyKind::Qbc, Some(_)) => {
                let (x, y): (Vec<&[f64]>, Vec<bool>) = labels.iter().map(|(i, y)| (sg.features(i), y)).unzip();
                let committee = train_committee(&x, &y, &self.cfg.committee, rng.random())?;
                select_qbc(&candidates, &committee, sg)?
            }
            (StrategyKind::Pps, Some(m)) => {
                let p = self.propagate(sg, m, labels)?;
                select_pps(&candidates, &p, labels)?
            }
            (StrategyKind::Dps, Some(m)) => {
                let p = self.propagate(sg, m, labels)?;
                let global = self.global.as_ref().expect("built for dps");
                select_dps(&candidates, &p, labels, global)?
            }
        };
        batch.reduced = size < self.cfg.k;
        Ok(Some(batch))
    }

    /// Propagated probabilities for the current model, when this strategy
    /// propagates.
    pub fn propagate(&self, sg: &SampleGraph, model: &BoostedModel, labels: &LabelSet) -> Result<ProbabilityTable> {
        let propagator = match &self.propagator {
            Some(p) => p.clone(),
            None => Propagator::new(sg, &self.cfg.propagation)?,
        };
        propagator.run(&classifier_probabilities(model, sg), labels)
    }
}
