//! Axis-aligned binary trees grown by weighted least squares.
//!
//! The same split search serves both tree kinds in this crate: boosted
//! regression trees fit pseudo-residuals with unit weights, and committee
//! trees fit 0/1 targets with bootstrap multiplicities as weights (for binary
//! targets weighted variance reduction is proportional to Gini decrease).

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf(value: f64) -> Self {
        Self {
            nodes: vec![Node::Leaf { value }],
        }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn leaves(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Leaf { value } => Some(*value),
            Node::Split { .. } => None,
        })
    }

    pub(crate) fn max_feature(&self) -> Option<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Split { feature, .. } => Some(*feature),
                Node::Leaf { .. } => None,
            })
            .max()
    }
}

/// Row indices sorted by each feature (ties by row index).
pub(crate) struct Presorted {
    order: Vec<Vec<u32>>,
}

impl Presorted {
    pub fn new<R: AsRef<[f64]>>(x: &[R], n_features: usize) -> Self {
        let order = (0..n_features)
            .map(|f| {
                let mut idx: Vec<u32> = (0..x.len() as u32).collect();
                idx.sort_by(|&a, &b| {
                    x[a as usize].as_ref()[f]
                        .total_cmp(&x[b as usize].as_ref()[f])
                        .then(a.cmp(&b))
                });
                idx
            })
            .collect();
        Self { order }
    }
}

pub(crate) struct GrowParams {
    pub max_depth: usize,
    pub features_per_split: usize,
    pub min_weight_split: f64,
}

struct SplitChoice {
    feature: usize,
    threshold: f64,
    gain: f64,
}

/// Grows one tree over the rows with positive weight.
pub(crate) struct Grower<'a, R> {
    pub x: &'a [R],
    pub presorted: &'a Presorted,
    pub weight: &'a [f64],
    pub target: &'a [f64],
    pub params: GrowParams,
    node_of: Vec<u32>,
    next_id: u32,
}

const NO_NODE: u32 = u32::MAX;
const MIN_GAIN: f64 = 1e-12;

impl<'a, R: AsRef<[f64]>> Grower<'a, R> {
    pub fn new(
        x: &'a [R],
        presorted: &'a Presorted,
        weight: &'a [f64],
        target: &'a [f64],
        params: GrowParams,
    ) -> Self {
        Self {
            x,
            presorted,
            weight,
            target,
            params,
            node_of: vec![NO_NODE; x.len()],
            next_id: 0,
        }
    }

    /// `leaf_value` maps the rows of a terminal node to its output.
    pub fn grow<G, F>(mut self, rng: &mut G, leaf_value: F) -> Tree
    where
        G: Rng + ?Sized,
        F: Fn(&[usize]) -> f64,
    {
        let rows: Vec<usize> = (0..self.x.len()).filter(|&i| self.weight[i] > 0.0).collect();
        let mut nodes = Vec::new();
        self.build(rows, 0, rng, &leaf_value, &mut nodes);
        Tree { nodes }
    }

    fn build<G, F>(
        &mut self,
        rows: Vec<usize>,
        depth: usize,
        rng: &mut G,
        leaf_value: &F,
        nodes: &mut Vec<Node>,
    ) -> usize
    where
        G: Rng + ?Sized,
        F: Fn(&[usize]) -> f64,
    {
        let at = nodes.len();
        nodes.push(Node::Leaf { value: 0.0 });

        let split = if depth < self.params.max_depth {
            self.best_split(&rows, rng)
        } else {
            None
        };
        let Some(split) = split else {
            nodes[at] = Node::Leaf {
                value: leaf_value(&rows),
            };
            return at;
        };

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&i| self.x[i].as_ref()[split.feature] <= split.threshold);
        let left = self.build(left_rows, depth + 1, rng, leaf_value, nodes);
        let right = self.build(right_rows, depth + 1, rng, leaf_value, nodes);
        nodes[at] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        at
    }

    fn best_split<G: Rng + ?Sized>(&mut self, rows: &[usize], rng: &mut G) -> Option<SplitChoice> {
        let total_w: f64 = rows.iter().map(|&i| self.weight[i]).sum();
        if total_w < self.params.min_weight_split || rows.len() < 2 {
            return None;
        }
        let total_s: f64 = rows.iter().map(|&i| self.weight[i] * self.target[i]).sum();
        let parent = total_s * total_s / total_w;

        let id = self.next_id;
        self.next_id += 1;
        for &i in rows {
            self.node_of[i] = id;
        }

        let d = self.presorted.order.len();
        let m = self.params.features_per_split.clamp(1, d);
        let mut features = sample(rng, d, m).into_vec();
        features.sort_unstable();

        let mut best: Option<SplitChoice> = None;
        for f in features {
            let mut w_left = 0.0;
            let mut s_left = 0.0;
            let mut prev: Option<usize> = None;
            for &r in &self.presorted.order[f] {
                let r = r as usize;
                if self.node_of[r] != id {
                    continue;
                }
                if let Some(p) = prev {
                    let xp = self.x[p].as_ref()[f];
                    let xr = self.x[r].as_ref()[f];
                    if xr > xp {
                        let w_right = total_w - w_left;
                        if w_left > 0.0 && w_right > 0.0 {
                            let s_right = total_s - s_left;
                            let gain = s_left * s_left / w_left + s_right * s_right / w_right - parent;
                            if gain > MIN_GAIN && best.as_ref().is_none_or(|b| gain > b.gain) {
                                let mut threshold = xp + (xr - xp) / 2.0;
                                if threshold >= xr {
                                    threshold = xp;
                                }
                                best = Some(SplitChoice {
                                    feature: f,
                                    threshold,
                                    gain,
                                });
                            }
                        }
                    }
                }
                w_left += self.weight[r];
                s_left += self.weight[r] * self.target[r];
                prev = Some(r);
            }
        }
        best
    }
}
