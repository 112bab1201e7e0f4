//! Neighborhood probability propagation.
//!
//! Classifier probabilities are diffused over the sample-adjacency graph with
//! the symmetric-normalized RBF affinity `S = D^-1/2 W D^-1/2`, giving
//! `P* = rownorm((I - alpha S)^-1 P0)`. Samples whose propagated estimate
//! disagrees with their own prior end up with high entropy.

mod matrix;

pub use matrix::{solve_shifted, CsrMatrix};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{LabelSet, SampleGraph};

/// Relative residual at which the conjugate-gradient solve stops.
const SOLVE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    /// Nonzero only between adjacent samples; zero diagonal.
    Neighbors,
    /// Every pair of samples; unit diagonal.
    Global,
}

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    Sparse(CsrMatrix),
    Dense(Vec<f64>),
}

/// Symmetric nonnegative RBF affinity between samples.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityMatrix {
    n: usize,
    sigma: f64,
    support: Support,
    storage: Storage,
}

impl AffinityMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match &self.storage {
            Storage::Sparse(m) => m.get(i, j),
            Storage::Dense(v) => v[i * self.n + j],
        }
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        match &self.storage {
            Storage::Sparse(m) => m.row_sum(i),
            Storage::Dense(v) => v[i * self.n..(i + 1) * self.n].iter().sum(),
        }
    }

    /// Dense row `i`; only meaningful for global support.
    pub fn dense_row(&self, i: usize) -> Option<&[f64]> {
        match &self.storage {
            Storage::Dense(v) => Some(&v[i * self.n..(i + 1) * self.n]),
            Storage::Sparse(_) => None,
        }
    }

    fn nonzeros(&self, i: usize) -> Vec<(usize, f64)> {
        match &self.storage {
            Storage::Sparse(m) => m.row(i).collect(),
            Storage::Dense(v) => v[i * self.n..(i + 1) * self.n]
                .iter()
                .copied()
                .enumerate()
                .filter(|&(_, w)| w != 0.0)
                .collect(),
        }
    }
}

pub fn rbf(a: &[f64], b: &[f64], sigma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-d2 / (2.0 * sigma * sigma)).exp()
}

/// `w_ij = exp(-|x_i - x_j|^2 / 2 sigma^2)` over the chosen support.
pub fn build_affinity(sg: &SampleGraph, sigma: f64, support: Support) -> Result<AffinityMatrix> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::config("affinity bandwidth sigma must be positive"));
    }
    let n = sg.len();
    let storage = match support {
        Support::Neighbors => {
            let rows = (0..n)
                .map(|i| {
                    sg.neighbors(i)
                        .iter()
                        .map(|&j| (j, rbf(sg.features(i), sg.features(j), sigma)))
                        .collect()
                })
                .collect();
            Storage::Sparse(CsrMatrix::from_rows(rows))
        }
        Support::Global => {
            let mut v = vec![0.0; n * n];
            for i in 0..n {
                v[i * n + i] = 1.0;
                for j in i + 1..n {
                    let w = rbf(sg.features(i), sg.features(j), sigma);
                    v[i * n + j] = w;
                    v[j * n + i] = w;
                }
            }
            Storage::Dense(v)
        }
    };
    Ok(AffinityMatrix {
        n,
        sigma,
        support,
        storage,
    })
}

/// `S = D^-1/2 W D^-1/2`; rows and columns of isolated samples stay zero.
pub fn normalize_symmetric(w: &AffinityMatrix) -> CsrMatrix {
    let inv_sqrt: Vec<f64> = (0..w.n())
        .map(|i| {
            let d = w.row_sum(i);
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let rows = (0..w.n())
        .map(|i| {
            w.nonzeros(i)
                .into_iter()
                .map(|(j, v)| (j, inv_sqrt[i] * v * inv_sqrt[j]))
                .collect()
        })
        .collect();
    CsrMatrix::from_rows(rows)
}

/// Median distance between adjacent samples' features; the fallback
/// bandwidth when none is configured.
pub fn median_adjacent_distance(sg: &SampleGraph) -> Option<f64> {
    let mut d: Vec<f64> = sg
        .edges()
        .map(|(i, j)| {
            sg.features(i)
                .iter()
                .zip(sg.features(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .filter(|v| *v > 0.0)
        .collect();
    if d.is_empty() {
        return None;
    }
    d.sort_by(f64::total_cmp);
    let m = d.len() / 2;
    Some(if d.len().is_multiple_of(2) { (d[m - 1] + d[m]) / 2.0 } else { d[m] })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PropagationConfig {
    pub alpha: f64,
    /// RBF bandwidth; `None` falls back to the median adjacent distance.
    pub sigma: Option<f64>,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self {
            alpha: 0.9,
            sigma: Some(1.0),
        }
    }
}

impl PropagationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config("propagation alpha must lie in (0, 1)"));
        }
        if let Some(s) = self.sigma {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::config("propagation sigma must be positive"));
            }
        }
        Ok(())
    }

    pub fn resolve_sigma(&self, sg: &SampleGraph) -> f64 {
        match self.sigma {
            Some(s) => s,
            None => {
                let s = median_adjacent_distance(sg).unwrap_or(1.0);
                log::info!("propagation sigma unset; using median adjacent distance {s:.6}");
                s
            }
        }
    }
}

/// Per-sample `(p(y=0), p(y=1))` rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTable {
    rows: Vec<[f64; 2]>,
}

impl ProbabilityTable {
    pub fn new(rows: Vec<[f64; 2]>) -> Result<Self> {
        for (i, r) in rows.iter().enumerate() {
            if r.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::Numerical(format!("probability row {i} outside [0, 1]: {r:?}")));
            }
        }
        Ok(Self { rows })
    }

    /// Rows `(1 - p, p)` from positive-class probabilities.
    pub fn from_positive(p: &[f64]) -> Result<Self> {
        Self::new(p.iter().map(|&v| [1.0 - v, v]).collect())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[[f64; 2]] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> [f64; 2] {
        self.rows[i]
    }

    /// Row-normalized probability of class 1.
    pub fn positive(&self, i: usize) -> f64 {
        let [a, b] = self.rows[i];
        let s = a + b;
        if s > 0.0 {
            b / s
        } else {
            0.5
        }
    }

    pub fn positives(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.positive(i)).collect()
    }

    fn column(&self, c: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[c]).collect()
    }

    fn check_rows(&self) -> Result<()> {
        for (i, r) in self.rows.iter().enumerate() {
            if !(r[0] + r[1] > 0.0) {
                return Err(Error::Numerical(format!("probability row {i} sums to zero")));
            }
        }
        Ok(())
    }

    fn from_columns_normalized(c0: &[f64], c1: &[f64]) -> Result<Self> {
        let rows = c0
            .iter()
            .zip(c1)
            .enumerate()
            .map(|(i, (&a, &b))| {
                let s = a + b;
                if !(s > 0.0 && s.is_finite()) {
                    return Err(Error::Numerical(format!("propagated row {i} has sum {s}")));
                }
                Ok([(a / s).clamp(0.0, 1.0), (b / s).clamp(0.0, 1.0)])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rows })
    }
}

/// Labeled rows become one-hot; the rest are untouched.
pub fn clamp_labels(p: &ProbabilityTable, labels: &LabelSet) -> ProbabilityTable {
    let mut rows = p.rows.clone();
    for (i, y) in labels.iter() {
        if let Some(r) = rows.get_mut(i) {
            *r = if y { [0.0, 1.0] } else { [1.0, 0.0] };
        }
    }
    ProbabilityTable { rows }
}

fn check_inputs(p0: &ProbabilityTable, s: &CsrMatrix, alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::config("propagation alpha must lie in (0, 1)"));
    }
    if p0.len() != s.n() {
        return Err(Error::DimensionMismatch {
            expected: s.n(),
            got: p0.len(),
        });
    }
    p0.check_rows()
}

/// Closed-form propagation: solves `(I - alpha S) P = P0` column by column
/// (never forming the inverse) and row-normalizes the result.
pub fn propagate_closed_form(p0: &ProbabilityTable, s: &CsrMatrix, alpha: f64) -> Result<ProbabilityTable> {
    check_inputs(p0, s, alpha)?;
    let c0 = solve_shifted(s, alpha, &p0.column(0), SOLVE_TOL)?;
    let c1 = solve_shifted(s, alpha, &p0.column(1), SOLVE_TOL)?;
    ProbabilityTable::from_columns_normalized(&c0, &c1)
}

/// Fixed-point reference solver: `P <- alpha S P + (1 - alpha) P0`, stopping
/// once the row-normalized iterates change by less than `tol` (max-abs).
pub fn propagate_iterative(
    p0: &ProbabilityTable,
    s: &CsrMatrix,
    alpha: f64,
    tol: f64,
    max_iter: usize,
) -> Result<ProbabilityTable> {
    check_inputs(p0, s, alpha)?;
    if !(tol > 0.0) {
        return Err(Error::config("tolerance must be positive"));
    }
    let n = p0.len();
    let base0 = p0.column(0);
    let base1 = p0.column(1);
    let mut c0 = base0.clone();
    let mut c1 = base1.clone();
    let mut s0 = vec![0.0; n];
    let mut s1 = vec![0.0; n];
    let mut prev = ProbabilityTable::from_columns_normalized(&c0, &c1)?;
    let mut change = f64::INFINITY;
    for _ in 0..max_iter {
        s.mul_vec(&c0, &mut s0);
        s.mul_vec(&c1, &mut s1);
        for i in 0..n {
            c0[i] = alpha * s0[i] + (1.0 - alpha) * base0[i];
            c1[i] = alpha * s1[i] + (1.0 - alpha) * base1[i];
        }
        let next = ProbabilityTable::from_columns_normalized(&c0, &c1)?;
        change = next
            .rows
            .iter()
            .zip(&prev.rows)
            .flat_map(|(a, b)| [(a[0] - b[0]).abs(), (a[1] - b[1]).abs()])
            .fold(0.0, f64::max);
        prev = next;
        if change < tol {
            return Ok(prev);
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        change,
    })
}

/// Binary Shannon entropy (nats) of a class-1 probability; `0 ln 0 = 0`.
pub fn entropy(p: f64) -> f64 {
    let term = |q: f64| if q > 0.0 { -q * q.ln() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// Entropy of each propagated row, with labeled samples forced to zero.
pub fn propagated_entropy(p: &ProbabilityTable, labels: &LabelSet) -> Vec<f64> {
    (0..p.len())
        .map(|i| if labels.contains(i) { 0.0 } else { entropy(p.positive(i)) })
        .collect()
}

/// Cached normalized operator for repeated propagation over one graph.
#[derive(Debug, Clone)]
pub struct Propagator {
    s: CsrMatrix,
    alpha: f64,
    sigma: f64,
}

impl Propagator {
    pub fn new(sg: &SampleGraph, cfg: &PropagationConfig) -> Result<Self> {
        cfg.validate()?;
        let sigma = cfg.resolve_sigma(sg);
        let w = build_affinity(sg, sigma, Support::Neighbors)?;
        Ok(Self {
            s: normalize_symmetric(&w),
            alpha: cfg.alpha,
            sigma,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn operator(&self) -> &CsrMatrix {
        &self.s
    }

    /// Clamps `labels` into the classifier output and propagates.
    pub fn run(&self, positive: &[f64], labels: &LabelSet) -> Result<ProbabilityTable> {
        let p0 = clamp_labels(&ProbabilityTable::from_positive(positive)?, labels);
        propagate_closed_form(&p0, &self.s, self.alpha)
    }
}
