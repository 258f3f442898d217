use std::collections::VecDeque;

use rayon::prelude::*;

use super::CsrMatrix;
use crate::error::{Error, Result};

/// Reverse Cuthill-McKee ordering of the adjacency graph of `a`.
///
/// Returns `perm` with `perm[new] = old`. Each connected component starts from
/// a pseudo-peripheral vertex; ties are broken by index so the result is
/// deterministic.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.n();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).0.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut level = vec![usize::MAX; n];
    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        let start = pseudo_peripheral(a, seed, &degree, &mut level);
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = a.row(v).0.iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

fn bfs_levels(a: &CsrMatrix, root: usize, level: &mut [usize]) -> Vec<usize> {
    let mut touched = vec![root];
    level[root] = 0;
    let mut head = 0;
    while head < touched.len() {
        let v = touched[head];
        head += 1;
        for &w in a.row(v).0 {
            if level[w] == usize::MAX {
                level[w] = level[v] + 1;
                touched.push(w);
            }
        }
    }
    touched
}

fn pseudo_peripheral(a: &CsrMatrix, seed: usize, degree: &[usize], level: &mut [usize]) -> usize {
    let mut root = seed;
    let mut depth = 0;
    for _ in 0..8 {
        let touched = bfs_levels(a, root, level);
        let far = touched.iter().map(|&v| level[v]).max().unwrap_or(0);
        let candidate =
            touched.iter().copied().filter(|&v| level[v] == far).min_by_key(|&v| (degree[v], v)).unwrap_or(root);
        for &v in &touched {
            level[v] = usize::MAX;
        }
        if far <= depth && root != seed {
            break;
        }
        depth = far;
        if candidate == root {
            break;
        }
        root = candidate;
    }
    root
}

/// Cholesky factor `L L^T = P A P^T` stored by rows inside the envelope.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    perm: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
}

impl EnvelopeCholesky {
    /// Factors a symmetric positive definite matrix after an RCM reordering.
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        let perm = reverse_cuthill_mckee(a);
        Self::with_ordering(a, perm)
    }

    pub fn with_ordering(a: &CsrMatrix, perm: Vec<usize>) -> Result<Self> {
        let p = a.permuted(&perm);
        let n = p.n();
        let first: Vec<usize> = (0..n).map(|i| p.row(i).0.first().copied().unwrap_or(i).min(i)).collect();
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            start.push(start[i] + i - first[i] + 1);
        }
        let mut data = vec![0.0; start[n]];
        for i in 0..n {
            let (c, v) = p.row(i);
            for (&j, &x) in c.iter().zip(v) {
                if j <= i {
                    data[start[i] + j - first[i]] = x;
                }
            }
        }
        for i in 0..n {
            let (done, rest) = data.split_at_mut(start[i]);
            let row_i = &mut rest[..i - first[i] + 1];
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let row_j = &done[start[j]..start[j + 1]];
                let lhs = &row_i[k0 - fi..j - fi];
                let rhs = &row_j[k0 - fj..j - fj];
                let s: f64 = lhs.iter().zip(rhs).map(|(x, y)| x * y).sum();
                row_i[j - fi] = (row_i[j - fi] - s) / row_j[j - fj];
            }
            let off = &row_i[..i - fi];
            let d = row_i[i - fi] - off.iter().map(|x| x * x).sum::<f64>();
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite(perm[i]));
            }
            row_i[i - fi] = d.sqrt();
        }
        Ok(Self { perm, first, start, data })
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    /// Stored entries of the factor.
    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            let s: f64 = row[..i - fi].iter().zip(&y[fi..i]).map(|(l, x)| l * x).sum();
            y[i] = (y[i] - s) / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            y[i] /= row[i - fi];
            let xi = y[i];
            for (k, l) in row[..i - fi].iter().enumerate() {
                y[fi + k] -= l * xi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }

    /// Solves for several right-hand sides in parallel.
    pub fn solve_many(&self, rhs: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rhs.par_iter().map(|b| self.solve(b)).collect()
    }
}
