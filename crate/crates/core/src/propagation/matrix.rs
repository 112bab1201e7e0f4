//! Compressed sparse row storage, enough for symmetric propagation operators.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from per-row `(column, value)` lists; columns are sorted and
    /// explicit zeros dropped.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                if v != 0.0 {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_rows(vec![Vec::new(); n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[span.clone()].binary_search(&j) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).map(|(_, v)| v).sum()
    }

    pub fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.n) {
            *o = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    /// Symmetric within `tol`, compared entrywise.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, v)| (self.get(j, i) - v).abs() <= tol))
    }

    /// Applies a symmetric permutation: entry `(i, j)` moves to
    /// `(perm[i], perm[j])`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut rows = vec![Vec::new(); self.n];
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                rows[perm[i]].push((perm[j], v));
            }
        }
        Self::from_rows(rows)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `(I - alpha S) x = b` by conjugate gradients.
///
/// `I - alpha S` is symmetric positive definite whenever `S` is symmetric
/// with spectral radius at most 1 and `alpha < 1`.
pub fn solve_shifted(s: &CsrMatrix, alpha: f64, b: &[f64], rel_tol: f64) -> Result<Vec<f64>> {
    let n = s.n();
    let apply = |x: &[f64], out: &mut [f64]| {
        s.mul_vec(x, out);
        for (o, xi) in out.iter_mut().zip(x) {
            *o = xi - alpha * *o;
        }
    };
    let b_norm = dot(b, b).sqrt();
    if b_norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let mut x = b.to_vec();
    let mut ax = vec![0.0; n];
    apply(&x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let mut ap = vec![0.0; n];
    let max_iter = 10 * n + 100;
    for _ in 0..max_iter {
        if rr.sqrt() <= rel_tol * b_norm {
            return Ok(x);
        }
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) || !pap.is_finite() {
            return Err(Error::Numerical(
                "propagation operator is not positive definite".into(),
            ));
        }
        let step = rr / pap;
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        let rr_next = dot(&r, &r);
        let beta = rr_next / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_next;
    }
    if rr.sqrt() <= rel_tol * b_norm {
        Ok(x)
    } else {
        Err(Error::NonConvergence {
            iterations: max_iter,
            change: rr.sqrt() / b_norm,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csr_basics() {
        let m = CsrMatrix::from_rows(vec![vec![(1, 2.0), (0, 0.0)], vec![(0, 2.0)], vec![]]);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 1), 2.0);
        assert_eq!(m.get(2, 2), 0.0);
        assert!(m.is_symmetric(0.0));
        let mut out = vec![0.0; 3];
        m.mul_vec(&[1.0, 3.0, 5.0], &mut out);
        assert_eq!(out, vec![6.0, 2.0, 0.0]);
    }

    #[test]
    fn cg_solves_two_by_two() {
        // (I - 0.5 [[0,1],[1,0]]) x = [1, 0]  =>  x = [4/3, 2/3]
        let s = CsrMatrix::from_rows(vec![vec![(1, 1.0)], vec![(0, 1.0)]]);
        let x = solve_shifted(&s, 0.5, &[1.0, 0.0], 1e-14).unwrap();
        assert!((x[0] - 4.0 / 3.0).abs() < 1e-12);
        assert!((x[1] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn cg_reports_indefinite_operators() {
        let s = CsrMatrix::from_rows(vec![vec![(1, 3.0)], vec![(0, 3.0)]]);
        assert!(solve_shifted(&s, 0.9, &[1.0, 1.0], 1e-14).is_err());
    }
}
