use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::{GrowParams, Grower, Presorted, Tree};
use super::{check_training_set, score_to_probability};
use crate::error::{Error, Result};

/// Leaf values are clipped to this range.
pub const LEAF_CLIP: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoostConfig {
    pub n_learners: usize,
    pub max_depth: usize,
    pub shrinkage: f64,
    pub row_subsample: f64,
    /// Features examined per split; capped at the feature dimension.
    pub features_per_split: usize,
}

impl Default for BoostConfig {
    fn default() -> Self {
        Self {
            n_learners: 50,
            max_depth: 2,
            shrinkage: 0.06,
            row_subsample: 0.5,
            features_per_split: 50,
        }
    }
}

impl BoostConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_learners == 0 {
            return Err(Error::config("n_learners must be >= 1"));
        }
        if !(self.shrinkage > 0.0 && self.shrinkage <= 1.0) {
            return Err(Error::config("shrinkage must lie in (0, 1]"));
        }
        if !(self.row_subsample > 0.0 && self.row_subsample <= 1.0) {
            return Err(Error::config("row_subsample must lie in (0, 1]"));
        }
        if self.features_per_split == 0 {
            return Err(Error::config("features_per_split must be >= 1"));
        }
        Ok(())
    }
}

/// Stagewise additive model over regression trees; produces the score `F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostedModel {
    pub n_features: usize,
    pub base_score: f64,
    pub shrinkage: f64,
    pub trees: Vec<Tree>,
}

const MODEL_FORMAT: &str = "alcurve-boosted";
const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    format: String,
    version: u32,
    #[serde(flatten)]
    model: BoostedModel,
}

impl BoostedModel {
    pub fn predict_score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: x.len(),
            });
        }
        Ok(self.score(x))
    }

    /// Score without the dimension check.
    pub fn score(&self, x: &[f64]) -> f64 {
        self.base_score + self.shrinkage * self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }

    /// `p(y = 1 | x)` through the logistic correction.
    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        self.predict_score(x).map(score_to_probability)
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = ModelDoc {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            model: self.clone(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDoc = serde_json::from_str(text)?;
        if doc.format != MODEL_FORMAT {
            return Err(Error::Parse(format!("not a boosted model: {}", doc.format)));
        }
        if doc.version != MODEL_VERSION {
            return Err(Error::UnsupportedVersion {
                found: doc.version,
                expected: MODEL_VERSION,
            });
        }
        let m = doc.model;
        if m.trees.iter().any(|t| t.max_feature().is_some_and(|f| f >= m.n_features)) {
            return Err(Error::Parse("split feature out of range".into()));
        }
        Ok(m)
    }
}

/// Mean exponential loss `exp(-y F)` with `y` in {-1, +1}.
pub fn exponential_loss<R: AsRef<[f64]>>(model: &BoostedModel, x: &[R], y: &[bool]) -> f64 {
    let total: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, &yi)| (-sign(yi) * model.score(xi.as_ref())).exp())
        .sum();
    total / x.len() as f64
}

fn sign(y: bool) -> f64 {
    if y {
        1.0
    } else {
        -1.0
    }
}

/// Gradient boosting with exponential loss.
///
/// Each stage fits a least-squares tree to the negative gradient
/// `y exp(-y F)` on a fresh row subsample, then sets each leaf by one Newton
/// step `sum(y w) / sum(w)` with `w = exp(-y F)`.
pub fn train_boosted<R: AsRef<[f64]>>(
    x: &[R],
    y: &[bool],
    cfg: &BoostConfig,
    seed: u64,
) -> Result<BoostedModel> {
    cfg.validate()?;
    let d = check_training_set(x, y)?;
    let n = x.len();
    let n_pos = y.iter().filter(|&&v| v).count();
    let base_score = 0.5 * (n_pos as f64 / (n - n_pos) as f64).ln();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let presorted = Presorted::new(x, d);
    let ys: Vec<f64> = y.iter().map(|&v| sign(v)).collect();
    let mut score = vec![base_score; n];
    let n_rows = ((cfg.row_subsample * n as f64).ceil() as usize).clamp(1, n);

    let mut trees = Vec::with_capacity(cfg.n_learners);
    let mut weight = vec![0.0; n];
    let mut residual = vec![0.0; n];
    let mut hessian = vec![0.0; n];
    for _ in 0..cfg.n_learners {
        for i in 0..n {
            hessian[i] = (-ys[i] * score[i]).exp();
            residual[i] = ys[i] * hessian[i];
        }
        weight.iter_mut().for_each(|w| *w = 0.0);
        if n_rows == n {
            weight.iter_mut().for_each(|w| *w = 1.0);
        } else {
            for i in rand::seq::index::sample(&mut rng, n, n_rows) {
                weight[i] = 1.0;
            }
        }

        let params = GrowParams {
            max_depth: cfg.max_depth,
            features_per_split: cfg.features_per_split.min(d),
            min_weight_split: 2.0,
        };
        let tree = Grower::new(x, &presorted, &weight, &residual, params).grow(&mut rng, |rows| {
            let num: f64 = rows.iter().map(|&i| residual[i]).sum();
            let den: f64 = rows.iter().map(|&i| hessian[i]).sum();
            if den > 0.0 {
                (num / den).clamp(-LEAF_CLIP, LEAF_CLIP)
            } else {
                0.0
            }
        });
        for (s, xi) in score.iter_mut().zip(x) {
            *s += cfg.shrinkage * tree.predict(xi.as_ref());
        }
        trees.push(tree);
    }

    Ok(BoostedModel {
        n_features: d,
        base_score,
        shrinkage: cfg.shrinkage,
        trees,
    })
}
