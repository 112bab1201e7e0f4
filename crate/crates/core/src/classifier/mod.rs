//! Path classifiers: gradient-boosted trees with exponential loss, and a
//! bagged-tree committee for query-by-committee.

mod boost;
mod committee;
mod tree;

pub use boost::{exponential_loss, train_boosted, BoostConfig, BoostedModel, LEAF_CLIP};
pub use committee::{train_committee, vote_disagreement, Committee, CommitteeConfig};
pub use tree::{Node, Tree};

use crate::error::{Error, Result};

/// Logistic correction of a boosting score: `1 / (1 + exp(-2F))`.
pub fn score_to_probability(score: f64) -> f64 {
    1.0 / (1.0 + (-2.0 * score).exp())
}

/// Validates a training set and returns its feature dimension.
fn check_training_set<R: AsRef<[f64]>>(x: &[R], y: &[bool]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let Some(first) = x.first() else {
        return Err(Error::DegenerateModel("no training samples".into()));
    };
    let d = first.as_ref().len();
    if d == 0 {
        return Err(Error::DegenerateModel("zero-dimensional features".into()));
    }
    for row in x {
        let row = row.as_ref();
        if row.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: row.len(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateModel("non-finite feature value".into()));
        }
    }
    if !(y.iter().any(|&v| v) && y.iter().any(|&v| !v)) {
        return Err(Error::DegenerateModel("training labels contain a single class".into()));
    }
    Ok(d)
}
