use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::LabelSet;
use crate::propagation::{AffinityMatrix, Support};

/// Global, labeled and intra-batch similarity of a batch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityMeasures {
    pub sigma_g: f64,
    pub sigma_l: f64,
    pub sigma_i: f64,
}

impl DensityMeasures {
    /// `(sigma_g - sigma_l - sigma_i) / sigma_g`.
    pub fn mu(&self) -> f64 {
        (self.sigma_g - self.sigma_l - self.sigma_i) / self.sigma_g
    }
}

fn require_global(w: &AffinityMatrix) -> Result<()> {
    if w.support() != Support::Global {
        return Err(Error::config("density measures need a global affinity matrix"));
    }
    Ok(())
}

pub fn density_measures(batch: &[usize], labeled: &LabelSet, w: &AffinityMatrix) -> Result<DensityMeasures> {
    require_global(w)?;
    if batch.is_empty() {
        return Err(Error::config("density measures of an empty batch"));
    }
    if let Some(&bad) = batch.iter().find(|&&i| i >= w.n()) {
        return Err(Error::IndexOutOfRange { index: bad, len: w.n() });
    }
    let mut m = DensityMeasures {
        sigma_g: 0.0,
        sigma_l: 0.0,
        sigma_i: 0.0,
    };
    for &i in batch {
        m.sigma_g += w.row_sum(i);
        m.sigma_l += labeled.indices().iter().map(|&l| w.get(i, l)).sum::<f64>();
        m.sigma_i += batch.iter().filter(|&&j| j != i).map(|&j| w.get(i, j)).sum::<f64>();
    }
    Ok(m)
}

/// Diversity/representativeness weight of a batch; at most 1.
pub fn mu(batch: &[usize], labeled: &LabelSet, w: &AffinityMatrix) -> Result<f64> {
    density_measures(batch, labeled, w).map(|m| m.mu())
}

/// Per-sample partial sums reused across all candidate batches of one
/// selection round.
pub(crate) struct DensityCache<'a> {
    w: &'a AffinityMatrix,
    global: Vec<f64>,
    to_labeled: Vec<f64>,
}

impl<'a> DensityCache<'a> {
    pub fn new(w: &'a AffinityMatrix, labeled: &LabelSet) -> Result<Self> {
        require_global(w)?;
        let n = w.n();
        let global = (0..n).map(|i| w.row_sum(i)).collect();
        let to_labeled = (0..n)
            .map(|i| labeled.indices().iter().map(|&l| w.get(i, l)).sum())
            .collect();
        Ok(Self { w, global, to_labeled })
    }

    pub fn measures(&self, batch: &[usize]) -> DensityMeasures {
        let mut m = DensityMeasures {
            sigma_g: 0.0,
            sigma_l: 0.0,
            sigma_i: 0.0,
        };
        for (a, &i) in batch.iter().enumerate() {
            m.sigma_g += self.global[i];
            m.sigma_l += self.to_labeled[i];
            for &j in &batch[a + 1..] {
                m.sigma_i += 2.0 * self.w.get(i, j);
            }
        }
        m
    }
}
