//! Tree cost on candidate graphs and a tree-extraction heuristic.
//!
//! The cost of a tree is the sum over its edges of `-ln(p / (1 - p))`, so
//! edges the classifier believes in lower the cost. [`extract_tree`] is a
//! heuristic: it is not guaranteed to find the minimum-cost tree.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SpatialGraph;

/// Probabilities are clipped to `[EPS, 1 - EPS]` before taking log-odds.
pub const EPS: f64 = 1e-6;

pub fn edge_cost(p: f64) -> f64 {
    let p = p.clamp(EPS, 1.0 - EPS);
    -(p / (1.0 - p)).ln()
}

/// Edges of `g` forming a connected acyclic subgraph that contains `root`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tree {
    pub root: u64,
    /// Indices into `g.edges`, in the order they were added.
    pub edges: Vec<usize>,
}

impl Tree {
    pub fn bare(root: u64) -> Self {
        Self { root, edges: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Identifiers of the tree's edges in the source graph.
    pub fn edge_ids(&self, g: &SpatialGraph) -> Vec<u64> {
        self.edges.iter().map(|&e| g.edges[e].id).collect()
    }

    /// Checks that the edges exist, are distinct, and form a tree containing
    /// the root.
    pub fn validate(&self, g: &SpatialGraph) -> Result<()> {
        let index = g.validate()?;
        let root = *index
            .get(&self.root)
            .ok_or_else(|| Error::graph(format!("root {} is not a node of the graph", self.root)))?;
        let mut uf = UnionFind::new(g.nodes.len());
        let mut seen = vec![false; g.edges.len()];
        for &e in &self.edges {
            if e >= g.edges.len() {
                return Err(Error::IndexOutOfRange { index: e, len: g.edges.len() });
            }
            if std::mem::replace(&mut seen[e], true) {
                return Err(Error::graph(format!("edge {e} appears twice in the tree")));
            }
            let (a, b) = (index[&g.edges[e].node_a], index[&g.edges[e].node_b]);
            if !uf.union(a, b) {
                return Err(Error::graph("tree edges contain a cycle"));
            }
        }
        for &e in &self.edges {
            if uf.find(index[&g.edges[e].node_a]) != uf.find(root) {
                return Err(Error::graph("tree edges are not connected to the root"));
            }
        }
        Ok(())
    }
}

/// Sum of [`edge_cost`] over the tree's edges; `probs` is indexed by edge.
pub fn tree_cost(t: &Tree, probs: &[f64]) -> f64 {
    t.edges.iter().map(|&e| edge_cost(probs[e])).sum()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

#[derive(PartialEq)]
struct Frontier {
    cost: f64,
    edge: usize,
    to: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    // Min-heap on cost, then edge index.
    fn cmp(&self, other: &Self) -> Ordering {
        other.cost.total_cmp(&self.cost).then(other.edge.cmp(&self.edge))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Prepared {
    adjacency: Vec<Vec<(usize, usize)>>,
    root: usize,
}

fn prepare(g: &SpatialGraph, probs: &[f64], root: u64) -> Result<Prepared> {
    let index = g.validate()?;
    if probs.len() != g.edges.len() {
        return Err(Error::DimensionMismatch {
            expected: g.edges.len(),
            got: probs.len(),
        });
    }
    let root = *index
        .get(&root)
        .ok_or_else(|| Error::graph(format!("root {root} is not a node of the graph")))?;
    let mut adjacency = vec![Vec::new(); g.nodes.len()];
    for (e, edge) in g.edges.iter().enumerate() {
        let (a, b) = (index[&edge.node_a], index[&edge.node_b]);
        if a != b {
            adjacency[a].push((e, b));
            adjacency[b].push((e, a));
        }
    }
    Ok(Prepared { adjacency, root })
}

/// Prim-style growth from the root that stops as soon as the cheapest
/// frontier edge would not lower the cost. Ties go to the lowest edge index.
pub fn greedy_tree(g: &SpatialGraph, probs: &[f64], root: u64) -> Result<Tree> {
    let prep = prepare(g, probs, root)?;
    let order = prim_order(&prep, probs, true);
    Ok(Tree {
        root,
        edges: order.into_iter().map(|(e, _, _)| e).collect(),
    })
}

/// Edges in Prim order as `(edge, parent node, child node)`.
fn prim_order(prep: &Prepared, probs: &[f64], stop_when_nonnegative: bool) -> Vec<(usize, usize, usize)> {
    let n = prep.adjacency.len();
    let mut in_tree = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut order = Vec::new();
    let visit = |v: usize, in_tree: &mut Vec<bool>, heap: &mut BinaryHeap<Frontier>| {
        in_tree[v] = true;
        for &(edge, to) in &prep.adjacency[v] {
            if !in_tree[to] {
                heap.push(Frontier { cost: edge_cost(probs[edge]), edge, to });
            }
        }
    };
    visit(prep.root, &mut in_tree, &mut heap);
    while let Some(f) = heap.pop() {
        if in_tree[f.to] {
            continue;
        }
        if stop_when_nonnegative && f.cost >= 0.0 {
            break;
        }
        let from = prep.adjacency[f.to]
            .iter()
            .find(|&&(e, _)| e == f.edge)
            .map(|&(_, other)| other)
            .expect("edge is incident to its endpoint");
        order.push((f.edge, from, f.to));
        visit(f.to, &mut in_tree, &mut heap);
    }
    order
}

/// Rooted order of a spanning tree's edges, parents before children.
fn rooted_order(prep: &Prepared, tree: &[bool]) -> Vec<(usize, usize, usize)> {
    let mut seen = vec![false; prep.adjacency.len()];
    seen[prep.root] = true;
    let mut order = Vec::new();
    let mut head = 0;
    let mut queue = vec![prep.root];
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        for &(edge, to) in &prep.adjacency[v] {
            if tree[edge] && !seen[to] {
                seen[to] = true;
                order.push((edge, v, to));
                queue.push(to);
            }
        }
    }
    order
}

/// Cheapest subtree containing the root of a rooted spanning tree.
///
/// A branch is kept exactly when its total cost, including the edge that
/// attaches it, is negative, so a positive-cost edge survives when it leads to
/// cheaper edges beyond it.
fn prune(order: &[(usize, usize, usize)], costs: &[f64], n: usize, root: usize) -> (f64, Vec<usize>) {
    let mut branch = vec![0.0; n];
    let mut keep = vec![false; order.len()];
    for (slot, &(edge, parent, child)) in order.iter().enumerate().rev() {
        let total = costs[edge] + branch[child];
        if total < 0.0 {
            keep[slot] = true;
            branch[parent] += total;
        }
    }
    let mut reachable = vec![false; n];
    reachable[root] = true;
    let mut edges = Vec::new();
    for (slot, &(edge, parent, child)) in order.iter().enumerate() {
        if keep[slot] && reachable[parent] {
            reachable[child] = true;
            edges.push(edge);
        }
    }
    (branch[root], edges)
}

/// Edges on the path between `u` and `v` in a rooted spanning tree.
fn tree_path(order: &[(usize, usize, usize)], n: usize, mut u: usize, mut v: usize) -> Vec<usize> {
    let mut up = vec![None; n];
    let mut depth = vec![0usize; n];
    for &(edge, parent, child) in order {
        up[child] = Some((edge, parent));
        depth[child] = depth[parent] + 1;
    }
    let mut path = Vec::new();
    while u != v {
        if depth[u] < depth[v] {
            std::mem::swap(&mut u, &mut v);
        }
        let (edge, parent) = up[u].expect("both ends lie in the spanning tree");
        path.push(edge);
        u = parent;
    }
    path
}

/// Heuristic minimum-cost tree containing `root`.
///
/// Grows the minimum spanning tree of the root's component in Prim order and
/// prunes it to its cheapest rooted subtree. It then repeatedly swaps a
/// non-tree edge for an edge on the cycle it closes whenever the pruned cost
/// strictly drops. The result never costs more than the bare root, but it is
/// not guaranteed optimal. Ties go to the lowest edge index.
pub fn extract_tree(g: &SpatialGraph, probs: &[f64], root: u64) -> Result<Tree> {
    let prep = prepare(g, probs, root)?;
    let n = prep.adjacency.len();
    let costs: Vec<f64> = probs.iter().map(|&p| edge_cost(p)).collect();
    let mut tree = vec![false; g.edges.len()];
    let mut in_component = vec![false; n];
    in_component[prep.root] = true;
    for (edge, _, child) in prim_order(&prep, probs, false) {
        tree[edge] = true;
        in_component[child] = true;
    }
    let candidates: Vec<(usize, usize, usize)> = (0..n)
        .filter(|&a| in_component[a])
        .flat_map(|a| prep.adjacency[a].iter().filter(move |&&(_, b)| a < b).map(move |&(e, b)| (e, a, b)))
        .collect();

    let mut order = rooted_order(&prep, &tree);
    let (mut best, mut edges) = prune(&order, &costs, n, prep.root);
    let mut sorted = candidates;
    sorted.sort_unstable();
    'search: loop {
        for &(e, a, b) in &sorted {
            if tree[e] {
                continue;
            }
            for f in tree_path(&order, n, a, b) {
                tree[f] = false;
                tree[e] = true;
                let trial = rooted_order(&prep, &tree);
                let (cost, kept) = prune(&trial, &costs, n, prep.root);
                if cost < best - 1e-12 * best.abs().max(1.0) {
                    best = cost;
                    edges = kept;
                    order = trial;
                    continue 'search;
                }
                tree[e] = false;
                tree[f] = true;
            }
        }
        break;
    }
    Ok(Tree { root, edges })
}
