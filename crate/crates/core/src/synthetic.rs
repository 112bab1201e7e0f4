//! Synthetic ring dataset and query heat-maps.
//!
//! Points are drawn uniformly in a disk; the inner disk is positive. Features
//! are the image coordinates rotated and radially scaled, plus Gaussian noise,
//! so the feature-space decision boundary differs from the image-space one.
//! Adjacency is the mutualized k-nearest-neighbor graph in image space.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Sample, SampleGraph};

/// Seeds tried after the configured one when a draw is disconnected.
const MAX_REGENERATIONS: u64 = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticConfig {
    pub n_points: usize,
    pub inner_radius: f64,
    pub outer_radius: f64,
    /// Rotation applied to image coordinates, in radians.
    pub warp_angle: f64,
    /// Radial scale factor applied after the rotation.
    pub radial_gain: f64,
    pub noise: f64,
    pub neighbors: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        let outer = 10.0;
        Self {
            n_points: 600,
            inner_radius: 0.5 * outer,
            outer_radius: outer,
            warp_angle: PI / 6.0,
            radial_gain: 1.3,
            noise: 0.08 * outer,
            neighbors: 10,
            seed: 0,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.inner_radius > 0.0 && self.inner_radius < self.outer_radius && self.outer_radius.is_finite()) {
            return Err(Error::config("radii must satisfy 0 < inner < outer"));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::config("noise must be finite and non-negative"));
        }
        if !(self.radial_gain > 0.0 && self.radial_gain.is_finite() && self.warp_angle.is_finite()) {
            return Err(Error::config("warp parameters must be finite with positive gain"));
        }
        if self.neighbors == 0 || self.neighbors >= self.n_points {
            return Err(Error::config("neighbors must be in 1..n_points"));
        }
        Ok(())
    }

    /// Feature-space image of an image-space point, before noise.
    pub fn warp(&self, x: f64, y: f64) -> [f64; 2] {
        let (sin, cos) = self.warp_angle.sin_cos();
        let g = self.radial_gain;
        [g * (cos * x - sin * y), g * (sin * x + cos * y)]
    }

    /// Radius of the noise-free optimal decision boundary in feature space.
    pub fn feature_boundary_radius(&self) -> f64 {
        self.radial_gain * self.inner_radius
    }
}

/// Generates the dataset; a disconnected draw is regenerated with the next
/// seed.
pub fn generate_synthetic(cfg: &SyntheticConfig) -> Result<SampleGraph> {
    cfg.validate()?;
    for attempt in 0..MAX_REGENERATIONS {
        let seed = cfg.seed.wrapping_add(attempt);
        let sg = generate_once(cfg, seed)?;
        if sg.is_connected() {
            return Ok(sg);
        }
        log::warn!("synthetic graph for seed {seed} is disconnected, regenerating with seed {}", seed.wrapping_add(1));
    }
    Err(Error::graph(format!(
        "no connected synthetic graph within {MAX_REGENERATIONS} seeds"
    )))
}

fn generate_once(cfg: &SyntheticConfig, seed: u64) -> Result<SampleGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, cfg.noise).map_err(|e| Error::config(e.to_string()))?;
    let mut points = Vec::with_capacity(cfg.n_points);
    let mut samples = Vec::with_capacity(cfg.n_points);
    for i in 0..cfg.n_points {
        let r = cfg.outer_radius * rng.random::<f64>().sqrt();
        let theta = 2.0 * PI * rng.random::<f64>();
        let (x, y) = (r * theta.cos(), r * theta.sin());
        let [fx, fy] = cfg.warp(x, y);
        let features = vec![fx + noise.sample(&mut rng), fy + noise.sample(&mut rng)];
        points.push([x, y]);
        samples.push(
            Sample::new(i as u64, features)
                .with_label(r < cfg.inner_radius)
                .with_position(vec![x, y]),
        );
    }
    SampleGraph::new(samples, knn_edges(&points, cfg.neighbors))
}

/// Mutualized k-nearest-neighbor edges `(i, j)` with `i < j`.
pub fn knn_edges(points: &[[f64; 2]], k: usize) -> Vec<(usize, usize)> {
    let n = points.len();
    let mut edges = Vec::with_capacity(n * k);
    let mut order: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        order.clear();
        order.extend((0..n).filter(|&j| j != i));
        let d = |j: usize| {
            let dx = points[i][0] - points[j][0];
            let dy = points[i][1] - points[j][1];
            dx * dx + dy * dy
        };
        let k = k.min(order.len());
        if k == 0 {
            continue;
        }
        order.select_nth_unstable_by(k - 1, |&a, &b| d(a).total_cmp(&d(b)).then(a.cmp(&b)));
        edges.extend(order[..k].iter().map(|&j| (i.min(j), i.max(j))));
    }
    edges.sort_unstable();
    edges.dedup();
    edges
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    /// Square grid covering `[-half, half]^2`.
    pub fn square(half: f64, cells: usize) -> Self {
        Self {
            x_min: -half,
            x_max: half,
            y_min: -half,
            y_max: half,
            nx: cells,
            ny: cells,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::config("grid needs at least one cell per axis"));
        }
        if !(self.x_min < self.x_max && self.y_min < self.y_max) {
            return Err(Error::config("grid bounds must be increasing"));
        }
        Ok(())
    }

    /// `(column, row)` of a point, `None` outside the grid. The upper bounds
    /// are inclusive.
    pub fn cell(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let bin = |v: f64, lo: f64, hi: f64, n: usize| {
            if !(v >= lo && v <= hi) {
                return None;
            }
            Some((((v - lo) / (hi - lo) * n as f64) as usize).min(n - 1))
        };
        Some((bin(x, self.x_min, self.x_max, self.nx)?, bin(y, self.y_min, self.y_max, self.ny)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatMap {
    pub grid: GridSpec,
    /// Row-major counts, `ny` rows of `nx` cells.
    pub counts: Vec<Vec<u64>>,
    /// Queries falling outside the grid or lacking two features.
    pub spill: u64,
}

impl HeatMap {
    pub fn new(grid: GridSpec) -> Result<Self> {
        grid.validate()?;
        Ok(Self {
            grid,
            counts: vec![vec![0; grid.nx]; grid.ny],
            spill: 0,
        })
    }

    pub fn add(&mut self, features: &[f64]) {
        match features {
            [x, y, ..] => match self.grid.cell(*x, *y) {
                Some((c, r)) => self.counts[r][c] += 1,
                None => self.spill += 1,
            },
            _ => self.spill += 1,
        }
    }

    pub fn in_range(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn total(&self) -> u64 {
        self.in_range() + self.spill
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let h: HeatMap = serde_json::from_str(s)?;
        h.grid.validate()?;
        if h.counts.len() != h.grid.ny || h.counts.iter().any(|r| r.len() != h.grid.nx) {
            return Err(Error::Parse("heat-map counts do not match the grid".into()));
        }
        Ok(h)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// Bins the feature vectors of every queried sample.
pub fn accumulate_heatmap<'a, I>(queried: I, grid: GridSpec) -> Result<HeatMap>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut h = HeatMap::new(grid)?;
    for f in queried {
        h.add(f);
    }
    Ok(h)
}
