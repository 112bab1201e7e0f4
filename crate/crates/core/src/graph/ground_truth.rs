//! Labeling candidate edges against ground-truth centerline traces.

use super::spatial::{coord, dist, lerp};
use super::SpatialGraph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchParams {
    /// Maximum point-to-trace distance, in pixels/voxels.
    pub dist_thresh: f64,
    /// Covered-arclength fraction that must be strictly exceeded.
    pub overlap_thresh: f64,
    /// Arclength spacing at which edge polylines are sampled.
    pub sample_step: f64,
}

impl Default for MatchParams {
    fn default() -> Self {
        Self {
            dist_thresh: 10.0,
            overlap_thresh: 0.5,
            sample_step: 1.0,
        }
    }
}

fn point_segment_distance(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut ab2 = 0.0;
    let mut ap_ab = 0.0;
    for k in 0..3 {
        let ab = coord(b, k) - coord(a, k);
        ab2 += ab * ab;
        ap_ab += (coord(p, k) - coord(a, k)) * ab;
    }
    let t = if ab2 > 0.0 { (ap_ab / ab2).clamp(0.0, 1.0) } else { 0.0 };
    dist(p, &lerp(a, b, t))
}

fn point_polyline_distance(p: &[f64], line: &[Vec<f64>]) -> f64 {
    match line {
        [] => f64::INFINITY,
        [only] => dist(p, only),
        _ => line
            .windows(2)
            .map(|w| point_segment_distance(p, &w[0], &w[1]))
            .fold(f64::INFINITY, f64::min),
    }
}

fn distance_to_traces(p: &[f64], traces: &[Vec<Vec<f64>>]) -> f64 {
    traces
        .iter()
        .map(|t| point_polyline_distance(p, t))
        .fold(f64::INFINITY, f64::min)
}

/// Resamples a polyline every `step` units of arclength, keeping both ends.
fn resample(line: &[Vec<f64>], step: f64) -> Vec<Vec<f64>> {
    let total: f64 = line.windows(2).map(|w| dist(&w[0], &w[1])).sum();
    let mut out = vec![line[0].clone()];
    if total == 0.0 {
        return out;
    }
    let mut target = step;
    let mut walked = 0.0;
    for w in line.windows(2) {
        let seg = dist(&w[0], &w[1]);
        while target < total && target <= walked + seg {
            out.push(lerp(&w[0], &w[1], (target - walked) / seg));
            target += step;
        }
        walked += seg;
    }
    out.push(line[line.len() - 1].clone());
    out
}

/// Largest distance from the sampled edge points to the nearest trace.
pub fn max_distance(edge: &[Vec<f64>], traces: &[Vec<Vec<f64>>], step: f64) -> f64 {
    if edge.is_empty() {
        return f64::INFINITY;
    }
    resample(edge, step)
        .iter()
        .map(|p| distance_to_traces(p, traces))
        .fold(0.0, f64::max)
}

/// Fraction of the edge arclength lying within `thresh` of some trace.
/// Each resampled piece counts as covered when its midpoint is within range.
pub fn covered_fraction(edge: &[Vec<f64>], traces: &[Vec<Vec<f64>>], thresh: f64, step: f64) -> f64 {
    if edge.is_empty() {
        return 0.0;
    }
    let pts = resample(edge, step);
    if pts.len() == 1 {
        return f64::from(u8::from(distance_to_traces(&pts[0], traces) <= thresh));
    }
    let mut total = 0.0;
    let mut covered = 0.0;
    for w in pts.windows(2) {
        let len = dist(&w[0], &w[1]);
        total += len;
        if distance_to_traces(&lerp(&w[0], &w[1], 0.5), traces) <= thresh {
            covered += len;
        }
    }
    if total == 0.0 {
        f64::from(u8::from(distance_to_traces(&pts[0], traces) <= thresh))
    } else {
        covered / total
    }
}

/// Per-edge binary labels: positive iff every sampled point is within
/// `dist_thresh` of a trace and the covered fraction exceeds
/// `overlap_thresh`.
pub fn match_ground_truth(
    g: &SpatialGraph,
    traces: &[Vec<Vec<f64>>],
    params: MatchParams,
) -> Result<Vec<bool>> {
    if !(params.dist_thresh > 0.0 && params.overlap_thresh > 0.0 && params.sample_step > 0.0) {
        return Err(Error::config("matching thresholds must be positive"));
    }
    let traces: Vec<Vec<Vec<f64>>> = traces.iter().filter(|t| !t.is_empty()).cloned().collect();
    if traces.is_empty() {
        return Ok(vec![false; g.edges.len()]);
    }
    Ok(g.edges
        .iter()
        .map(|e| {
            max_distance(&e.polyline, &traces, params.sample_step) <= params.dist_thresh
                && covered_fraction(&e.polyline, &traces, params.dist_thresh, params.sample_step)
                    > params.overlap_thresh
        })
        .collect())
}
