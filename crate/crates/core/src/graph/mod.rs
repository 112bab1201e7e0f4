//! Sample-adjacency model.
//!
//! Every candidate path of an overcomplete spatial graph becomes one
//! [`Sample`]; two samples are adjacent when their paths share a node (or,
//! for point sets, when they are linked in a k-NN graph). Everything
//! downstream (propagation, batch enumeration, density measures) works on
//! [`SampleGraph`].

mod batches;
mod ground_truth;
mod spatial;

pub use batches::{candidate_batches, candidate_batches_with_fallback, is_connected_set};
pub use ground_truth::{covered_fraction, match_ground_truth, max_distance, MatchParams};
pub use spatial::{from_spatial_graph, SpatialEdge, SpatialGraph, SpatialNode};

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A candidate path: feature vector, optional ground truth, optional
/// display position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub id: u64,
    pub features: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "label01::opt")]
    pub gt_label: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<Vec<f64>>,
}

impl Sample {
    pub fn new(id: u64, features: Vec<f64>) -> Self {
        Self {
            id,
            features,
            gt_label: None,
            position: None,
        }
    }

    pub fn with_label(mut self, label: bool) -> Self {
        self.gt_label = Some(label);
        self
    }

    pub fn with_position(mut self, position: Vec<f64>) -> Self {
        self.position = Some(position);
        self
    }
}

/// Samples plus a symmetric, irreflexive adjacency relation.
///
/// Immutable once built. Neighbor lists are kept sorted so adjacency tests
/// are a binary search.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGraph {
    samples: Vec<Sample>,
    neighbors: Vec<Vec<usize>>,
    feature_dim: usize,
}

impl SampleGraph {
    pub fn new<I>(samples: Vec<Sample>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = samples.len();
        let feature_dim = samples.first().map(|s| s.features.len()).unwrap_or(0);
        if n > 0 && feature_dim == 0 {
            return Err(Error::graph("feature vectors must have dimension >= 1"));
        }
        for (i, s) in samples.iter().enumerate() {
            if s.features.len() != feature_dim {
                return Err(Error::graph(format!(
                    "sample {i} has {} features, expected {feature_dim}",
                    s.features.len()
                )));
            }
            if s.features.iter().any(|v| !v.is_finite()) {
                return Err(Error::graph(format!("sample {i} has a non-finite feature")));
            }
            if let Some(pos) = &s.position {
                if !(2..=3).contains(&pos.len()) {
                    return Err(Error::graph(format!("sample {i} position must be 2-D or 3-D")));
                }
            }
        }

        let mut neighbors = vec![Vec::new(); n];
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::IndexOutOfRange { index: a.max(b), len: n });
            }
            if a == b {
                return Err(Error::graph(format!("self-adjacency on sample {a}")));
            }
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }

        Ok(Self {
            samples,
            neighbors,
            feature_dim,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn sample(&self, i: usize) -> &Sample {
        &self.samples[i]
    }

    pub fn features(&self, i: usize) -> &[f64] {
        &self.samples[i].features
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn are_adjacent(&self, i: usize, j: usize) -> bool {
        self.neighbors[i].binary_search(&j).is_ok()
    }

    /// Unordered adjacent pairs `(i, j)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Ground-truth labels, failing on the first sample that lacks one.
    pub fn gt_labels(&self) -> Result<Vec<bool>> {
        self.samples
            .iter()
            .enumerate()
            .map(|(i, s)| s.gt_label.ok_or(Error::MissingGroundTruth(i)))
            .collect()
    }

    /// Induced subgraph on `keep` (in the given order). Sample `keep[t]`
    /// becomes sample `t` of the result.
    pub fn induced(&self, keep: &[usize]) -> Result<SampleGraph> {
        let mut remap = HashMap::with_capacity(keep.len());
        for (t, &i) in keep.iter().enumerate() {
            if i >= self.len() {
                return Err(Error::IndexOutOfRange { index: i, len: self.len() });
            }
            if remap.insert(i, t).is_some() {
                return Err(Error::graph(format!("sample {i} listed twice")));
            }
        }
        let samples = keep.iter().map(|&i| self.samples[i].clone()).collect();
        let edges: Vec<(usize, usize)> = self
            .edges()
            .filter_map(|(a, b)| Some((*remap.get(&a)?, *remap.get(&b)?)))
            .collect();
        SampleGraph::new(samples, edges)
    }

    /// Connected components as sorted index lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &u in &self.neighbors[v] {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    pub fn to_document(&self) -> SampleGraphDoc {
        SampleGraphDoc {
            samples: self.samples.clone(),
            adjacency: self.edges().map(|(a, b)| [a, b]).collect(),
        }
    }

    pub fn from_document(doc: SampleGraphDoc) -> Result<Self> {
        SampleGraph::new(doc.samples, doc.adjacency.into_iter().map(|[a, b]| (a, b)))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

/// On-disk form of a [`SampleGraph`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleGraphDoc {
    pub samples: Vec<Sample>,
    pub adjacency: Vec<[usize; 2]>,
}

/// Annotated samples in insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSet {
    order: Vec<usize>,
    labels: Vec<Option<bool>>,
}

impl LabelSet {
    pub fn new(n_samples: usize) -> Self {
        Self {
            order: Vec::new(),
            labels: vec![None; n_samples],
        }
    }

    pub fn from_pairs<I>(n_samples: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, bool)>,
    {
        let mut set = Self::new(n_samples);
        for (i, y) in pairs {
            set.insert(i, y)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, index: usize, label: bool) -> Result<()> {
        let len = self.labels.len();
        let slot = self
            .labels
            .get_mut(index)
            .ok_or(Error::IndexOutOfRange { index, len })?;
        if slot.is_some() {
            return Err(Error::DuplicateLabel(index));
        }
        *slot = Some(label);
        self.order.push(index);
        Ok(())
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        self.labels.get(index).copied().flatten()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.get(index).is_some()
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.labels.len()
    }

    /// Labeled indices in insertion order.
    pub fn indices(&self) -> &[usize] {
        &self.order
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.order.iter().map(|&i| (i, self.labels[i].unwrap_or_default()))
    }

    pub fn count(&self, label: bool) -> usize {
        self.iter().filter(|&(_, y)| y == label).count()
    }

    pub fn mask(&self) -> Vec<bool> {
        self.labels.iter().map(Option::is_some).collect()
    }
}

/// Serde helpers writing labels as the integers 0 and 1.
pub(crate) mod label01 {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(u8::from(*v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(D::Error::custom(format!("label must be 0 or 1, got {other}"))),
        }
    }

    pub mod opt {
        use super::*;

        pub fn serialize<S: Serializer>(v: &Option<bool>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(y) => s.serialize_some(&u8::from(*y)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<bool>, D::Error> {
            match Option::<u8>::deserialize(d)? {
                None => Ok(None),
                Some(0) => Ok(Some(false)),
                Some(1) => Ok(Some(true)),
                Some(other) => Err(D::Error::custom(format!("label must be 0 or 1, got {other}"))),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> SampleGraph {
        let samples = (0..n).map(|i| Sample::new(i as u64, vec![i as f64])).collect();
        SampleGraph::new(samples, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    #[test]
    fn adjacency_is_symmetric_and_deduplicated() {
        let samples = (0..3).map(|i| Sample::new(i, vec![0.0])).collect();
        let g = SampleGraph::new(samples, [(0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert!(g.are_adjacent(0, 1) && g.are_adjacent(1, 0));
        assert!(!g.are_adjacent(0, 2));
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn rejects_invalid_graphs() {
        let s = || vec![Sample::new(0, vec![1.0]), Sample::new(1, vec![2.0])];
        assert!(SampleGraph::new(s(), [(0, 0)]).is_err());
        assert!(SampleGraph::new(s(), [(0, 2)]).is_err());
        let ragged = vec![Sample::new(0, vec![1.0]), Sample::new(1, vec![2.0, 3.0])];
        assert!(SampleGraph::new(ragged, []).is_err());
        let nan = vec![Sample::new(0, vec![f64::NAN])];
        assert!(SampleGraph::new(nan, []).is_err());
        let empty_features = vec![Sample::new(0, vec![])];
        assert!(SampleGraph::new(empty_features, []).is_err());
    }

    #[test]
    fn induced_subgraph_remaps() {
        let g = line(5);
        let sub = g.induced(&[4, 3, 1]).unwrap();
        assert_eq!(sub.len(), 3);
        assert!(sub.are_adjacent(0, 1));
        assert!(!sub.are_adjacent(1, 2));
        assert_eq!(sub.sample(0).id, 4);
        assert_eq!(sub.components().len(), 2);
    }

    #[test]
    fn label_set_rejects_duplicates_and_keeps_order() {
        let mut l = LabelSet::new(4);
        l.insert(2, true).unwrap();
        l.insert(0, false).unwrap();
        assert!(matches!(l.insert(2, false), Err(Error::DuplicateLabel(2))));
        assert!(l.insert(9, false).is_err());
        assert_eq!(l.indices(), &[2, 0]);
        assert_eq!(l.count(true), 1);
        assert_eq!(l.get(1), None);
    }

    #[test]
    fn document_round_trip() {
        let samples = vec![
            Sample::new(10, vec![0.1, -2.5]).with_label(true).with_position(vec![1.0, 2.0]),
            Sample::new(11, vec![1e-300, 3.0]).with_label(false),
            Sample::new(12, vec![0.3, 0.7]),
        ];
        let g = SampleGraph::new(samples, [(0, 1), (1, 2)]).unwrap();
        let text = g.to_json().unwrap();
        assert_eq!(SampleGraph::from_json(&text).unwrap(), g);
        assert!(text.contains("\"gt_label\": 1"));
    }

    #[test]
    fn label_must_be_binary_in_documents() {
        let text = r#"{"samples":[{"id":0,"features":[1.0],"gt_label":2}],"adjacency":[]}"#;
        assert!(SampleGraph::from_json(text).is_err());
    }
}
