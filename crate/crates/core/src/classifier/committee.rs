use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::check_training_set;
use super::tree::{GrowParams, Grower, Presorted, Tree};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CommitteeConfig {
    pub n_members: usize,
    /// `None` grows each tree until its leaves are pure.
    pub max_depth: Option<usize>,
}

impl Default for CommitteeConfig {
    fn default() -> Self {
        Self {
            n_members: 25,
            max_depth: None,
        }
    }
}

/// Bagged classification trees; each member casts one vote per sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Committee {
    pub n_features: usize,
    pub members: Vec<Tree>,
}

impl Committee {
    pub fn votes(&self, x: &[f64]) -> usize {
        self.members.iter().filter(|t| t.predict(x) >= 0.5).count()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Trains `cfg.n_members` trees, each on a bootstrap resample with
/// `ceil(sqrt(d))` candidate features per split.
pub fn train_committee<R: AsRef<[f64]>>(
    x: &[R],
    y: &[bool],
    cfg: &CommitteeConfig,
    seed: u64,
) -> Result<Committee> {
    if cfg.n_members == 0 {
        return Err(Error::config("committee needs at least one member"));
    }
    let d = check_training_set(x, y)?;
    let n = x.len();
    let presorted = Presorted::new(x, d);
    let target: Vec<f64> = y.iter().map(|&v| f64::from(u8::from(v))).collect();
    let per_split = ((d as f64).sqrt().ceil() as usize).max(1);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut members = Vec::with_capacity(cfg.n_members);
    let mut weight = vec![0.0; n];
    for _ in 0..cfg.n_members {
        weight.iter_mut().for_each(|w| *w = 0.0);
        for _ in 0..n {
            weight[rng.random_range(0..n)] += 1.0;
        }
        let params = GrowParams {
            max_depth: cfg.max_depth.unwrap_or(usize::MAX),
            features_per_split: per_split,
            min_weight_split: 2.0,
        };
        let tree = Grower::new(x, &presorted, &weight, &target, params).grow(&mut rng, |rows| {
            let w: f64 = rows.iter().map(|&i| weight[i]).sum();
            let pos: f64 = rows.iter().map(|&i| weight[i] * target[i]).sum();
            if w > 0.0 && pos * 2.0 >= w {
                1.0
            } else {
                0.0
            }
        });
        members.push(tree);
    }
    Ok(Committee {
        n_features: d,
        members,
    })
}

/// Vote entropy of the committee on `x`; in `[0, ln 2]`.
pub fn vote_disagreement(c: &Committee, x: &[f64]) -> f64 {
    if c.is_empty() {
        return 0.0;
    }
    let total = c.len() as f64;
    let pos = c.votes(x) as f64;
    [pos, total - pos]
        .into_iter()
        .filter(|&v| v > 0.0)
        .map(|v| {
            let f = v / total;
            -f * f.ln()
        })
        .sum()
}
