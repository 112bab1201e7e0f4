use super::{LabelSet, SampleGraph};

/// Every connected set of `k` unlabeled samples, each reported once as a
/// sorted index tuple; the list itself is sorted lexicographically.
///
/// Uses Wernicke's ESU enumeration restricted to unlabeled samples, so no
/// deduplication pass is needed.
pub fn candidate_batches(sg: &SampleGraph, k: usize, labeled: &LabelSet) -> Vec<Vec<usize>> {
    if k == 0 {
        return Vec::new();
    }
    let eligible: Vec<bool> = (0..sg.len()).map(|i| !labeled.contains(i)).collect();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    for v in 0..sg.len() {
        if !eligible[v] {
            continue;
        }
        current.clear();
        current.push(v);
        let ext: Vec<usize> = sg
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| u > v && eligible[u])
            .collect();
        extend(sg, &eligible, k, v, &mut current, ext, &mut out);
    }
    for batch in &mut out {
        batch.sort_unstable();
    }
    out.sort_unstable();
    out
}

fn extend(
    sg: &SampleGraph,
    eligible: &[bool],
    k: usize,
    root: usize,
    current: &mut Vec<usize>,
    mut ext: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if current.len() == k {
        out.push(current.clone());
        return;
    }
    while let Some(w) = ext.pop() {
        // Exclusive neighbors of w: not in the current set and not adjacent
        // to any member of it.
        let mut next = ext.clone();
        for &u in sg.neighbors(w) {
            if u > root
                && eligible[u]
                && !current.contains(&u)
                && !current.iter().any(|&c| sg.are_adjacent(c, u))
                && !next.contains(&u)
            {
                next.push(u);
            }
        }
        current.push(w);
        extend(sg, eligible, k, root, current, next, out);
        current.pop();
    }
}

/// Candidate batches of size `k`, falling back to `k - 1`, `k - 2`, ...
/// when the unlabeled remainder is too fragmented. Returns the batches and
/// the size actually used (0 when nothing is left to query).
pub fn candidate_batches_with_fallback(
    sg: &SampleGraph,
    k: usize,
    labeled: &LabelSet,
) -> (Vec<Vec<usize>>, usize) {
    for size in (1..=k).rev() {
        let batches = candidate_batches(sg, size, labeled);
        if !batches.is_empty() {
            return (batches, size);
        }
    }
    (Vec::new(), 0)
}

/// Whether `set` induces a connected subgraph.
pub fn is_connected_set(sg: &SampleGraph, set: &[usize]) -> bool {
    if set.is_empty() {
        return false;
    }
    let mut reached = vec![false; set.len()];
    reached[0] = true;
    let mut stack = vec![0];
    while let Some(a) = stack.pop() {
        for b in 0..set.len() {
            if !reached[b] && sg.are_adjacent(set[a], set[b]) {
                reached[b] = true;
                stack.push(b);
            }
        }
    }
    reached.into_iter().all(|r| r)
}
