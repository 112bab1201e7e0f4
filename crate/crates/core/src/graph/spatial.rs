use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Sample, SampleGraph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialNode {
    pub id: u64,
    pub x: f64,
    pub y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
}

impl SpatialNode {
    pub fn coords(&self) -> Vec<f64> {
        match self.z {
            Some(z) => vec![self.x, self.y, z],
            None => vec![self.x, self.y],
        }
    }
}

/// A candidate path between two nodes, with its centerline geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialEdge {
    pub id: u64,
    pub node_a: u64,
    pub node_b: u64,
    pub polyline: Vec<Vec<f64>>,
    pub features: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "super::label01::opt")]
    pub gt_label: Option<bool>,
}

/// Overcomplete spatial graph, in exactly the shape of its text document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialGraph {
    pub feature_dim: usize,
    pub nodes: Vec<SpatialNode>,
    pub edges: Vec<SpatialEdge>,
}

impl SpatialGraph {
    /// Checks the document invariants and returns the node-id index.
    pub fn validate(&self) -> Result<HashMap<u64, usize>> {
        let mut index = HashMap::with_capacity(self.nodes.len());
        for (i, n) in self.nodes.iter().enumerate() {
            if index.insert(n.id, i).is_some() {
                return Err(Error::graph(format!("duplicate node id {}", n.id)));
            }
        }
        let mut edge_ids = HashMap::with_capacity(self.edges.len());
        for e in &self.edges {
            if edge_ids.insert(e.id, ()).is_some() {
                return Err(Error::graph(format!("duplicate edge id {}", e.id)));
            }
            for end in [e.node_a, e.node_b] {
                if !index.contains_key(&end) {
                    return Err(Error::graph(format!("edge {} references unknown node {end}", e.id)));
                }
            }
            if e.polyline.is_empty() {
                return Err(Error::graph(format!("edge {} has an empty polyline", e.id)));
            }
            if e.polyline.iter().any(|p| !(2..=3).contains(&p.len())) {
                return Err(Error::graph(format!("edge {} has a malformed polyline point", e.id)));
            }
            if e.features.len() != self.feature_dim {
                return Err(Error::DimensionMismatch {
                    expected: self.feature_dim,
                    got: e.features.len(),
                });
            }
        }
        Ok(index)
    }

    /// Position of edge `e` in `edges`, looked up by identifier.
    pub fn edge_index(&self, id: u64) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: SpatialGraph = serde_json::from_str(text)?;
        g.validate()?;
        Ok(g)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// Point at half the arclength of a polyline.
pub(crate) fn polyline_midpoint(line: &[Vec<f64>]) -> Vec<f64> {
    let total: f64 = line.windows(2).map(|w| dist(&w[0], &w[1])).sum();
    if line.len() == 1 || total == 0.0 {
        return line[0].clone();
    }
    let half = total / 2.0;
    let mut walked = 0.0;
    for w in line.windows(2) {
        let seg = dist(&w[0], &w[1]);
        if walked + seg >= half && seg > 0.0 {
            let t = (half - walked) / seg;
            return lerp(&w[0], &w[1], t);
        }
        walked += seg;
    }
    line[line.len() - 1].clone()
}

pub(crate) fn coord(p: &[f64], axis: usize) -> f64 {
    p.get(axis).copied().unwrap_or(0.0)
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    (0..3)
        .map(|k| (coord(a, k) - coord(b, k)).powi(2))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    let dim = a.len().max(b.len());
    (0..dim)
        .map(|k| coord(a, k) + t * (coord(b, k) - coord(a, k)))
        .collect()
}

/// One sample per edge; samples are adjacent iff their edges share a node.
pub fn from_spatial_graph(g: &SpatialGraph) -> Result<SampleGraph> {
    let node_index = g.validate()?;
    if g.edges.is_empty() {
        return Err(Error::EmptyGraph);
    }

    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); g.nodes.len()];
    for (ei, e) in g.edges.iter().enumerate() {
        let a = node_index[&e.node_a];
        let b = node_index[&e.node_b];
        incident[a].push(ei);
        if b != a {
            incident[b].push(ei);
        }
    }

    let mut pairs = Vec::new();
    for list in &incident {
        for (x, &i) in list.iter().enumerate() {
            for &j in &list[x + 1..] {
                if i != j {
                    pairs.push((i, j));
                }
            }
        }
    }

    let samples = g
        .edges
        .iter()
        .map(|e| Sample {
            id: e.id,
            features: e.features.clone(),
            gt_label: e.gt_label,
            position: Some(polyline_midpoint(&e.polyline)),
        })
        .collect();
    SampleGraph::new(samples, pairs)
}
