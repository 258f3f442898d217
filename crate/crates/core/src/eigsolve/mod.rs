//! Smallest eigenpairs of the pencil `K x = lambda M x`.
//!
//! Small problems go through a dense Cholesky reduction; larger ones use
//! block inverse subspace iteration with a sparse Cholesky factor of `K`
//! and a Rayleigh-Ritz step after every sweep.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fem::{AssembledForms, DiscreteFunction};
use crate::linalg::{dot, norm, CsrMatrix, EnvelopeCholesky};

/// Relative gap below which neighbouring eigenvalues are reported as one cluster.
pub const CLUSTER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Largest dimension handled by the dense path.
    pub dense_limit: usize,
    /// Required `||K x - lambda M x|| / ||K x||` for every returned pair.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub cluster_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { dense_limit: 500, tol: 1e-9, max_iter: 1000, seed: 0, cluster_tol: CLUSTER_TOL }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub lambda: f64,
    /// Normalized so that `u^T M u = 1`.
    pub u: DiscreteFunction,
    pub residual_norm: f64,
    /// Size of the cluster this pair belongs to, within the computed slice.
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSlice {
    /// Ascending.
    pub values: Vec<f64>,
    /// M-orthonormal, each with its largest-magnitude entry positive.
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    /// Cluster id of each entry: the index of the first member of its cluster.
    pub clusters: Vec<usize>,
}

impl SpectrumSlice {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of entries sharing the cluster of entry `i` (0-based).
    pub fn multiplicity(&self, i: usize) -> usize {
        self.clusters.iter().filter(|&&c| c == self.clusters[i]).count()
    }

    /// Recomputes the cluster tags with another relative gap.
    pub fn retag(&mut self, rel_tol: f64) {
        self.clusters = cluster_tags(&self.values, rel_tol);
    }
}

/// Groups ascending values whose consecutive relative gap is at most `rel_tol`.
pub fn cluster_tags(values: &[f64], rel_tol: f64) -> Vec<usize> {
    let mut tags = Vec::with_capacity(values.len());
    for i in 0..values.len() {
        if i > 0 && (values[i] - values[i - 1]).abs() <= rel_tol * values[i].abs().max(values[i - 1].abs()) {
            tags.push(tags[i - 1]);
        } else {
            tags.push(i);
        }
    }
    tags
}

/// The `m` smallest eigenpairs with default settings.
pub fn solve_smallest(forms: &AssembledForms, m: usize) -> Result<SpectrumSlice> {
    solve_smallest_with(forms, m, &SolverConfig::default())
}

pub fn solve_smallest_with(forms: &AssembledForms, m: usize, cfg: &SolverConfig) -> Result<SpectrumSlice> {
    let n = forms.dim();
    if m > n {
        return Err(Error::TooManyEigenpairs { requested: m, dimension: n });
    }
    if n <= cfg.dense_limit {
        solve_dense(forms, m, cfg)
    } else {
        solve_iterative(forms, m, cfg)
    }
}

/// Dense reference path: `C = L^{-1} K L^{-T}` with `M = L L^T`.
pub fn solve_dense(forms: &AssembledForms, m: usize, cfg: &SolverConfig) -> Result<SpectrumSlice> {
    let n = forms.dim();
    if m > n {
        return Err(Error::TooManyEigenpairs { requested: m, dimension: n });
    }
    let k = forms.stiffness.to_dense();
    let mass = forms.mass.to_dense();
    let chol = mass.clone().cholesky().ok_or(Error::NotPositiveDefinite(0))?;
    let l = chol.l();
    let a1 = l.solve_lower_triangular(&k).expect("nonsingular factor");
    let c = l.solve_lower_triangular(&a1.transpose()).expect("nonsingular factor");
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let lt = l.transpose();
    let mut values = Vec::with_capacity(m);
    let mut vectors = Vec::with_capacity(m);
    for &i in order.iter().take(m) {
        let y = eig.eigenvectors.column(i).into_owned();
        let x = lt.solve_upper_triangular(&y).expect("nonsingular factor");
        values.push(eig.eigenvalues[i]);
        vectors.push(x.as_slice().to_vec());
    }
    finish(forms, values, vectors, cfg)
}

fn normalize_sign(x: &mut [f64]) {
    let mut best = 0;
    for i in 1..x.len() {
        if x[i].abs() > x[best].abs() {
            best = i;
        }
    }
    if x.get(best).is_some_and(|&v| v < 0.0) {
        x.iter_mut().for_each(|v| *v = -*v);
    }
}

fn residual(k: &CsrMatrix, mass: &CsrMatrix, lambda: f64, x: &[f64]) -> f64 {
    let kx = k.apply(x);
    let mx = mass.apply(x);
    let r: Vec<f64> = kx.iter().zip(&mx).map(|(a, b)| a - lambda * b).collect();
    norm(&r) / norm(&kx)
}

fn finish(
    forms: &AssembledForms,
    values: Vec<f64>,
    mut vectors: Vec<Vec<f64>>,
    cfg: &SolverConfig,
) -> Result<SpectrumSlice> {
    for x in &mut vectors {
        normalize_sign(x);
    }
    let residuals = values.iter().zip(&vectors).map(|(&l, x)| residual(&forms.stiffness, &forms.mass, l, x)).collect();
    let clusters = cluster_tags(&values, cfg.cluster_tol);
    Ok(SpectrumSlice { values, vectors, residuals, clusters })
}

/// Block inverse subspace iteration.
///
/// The block holds `2 m + 4` vectors (at most `n`) so that clusters at the end
/// of the wanted range are resolved together with their neighbours.
pub fn solve_iterative(forms: &AssembledForms, m: usize, cfg: &SolverConfig) -> Result<SpectrumSlice> {
    let n = forms.dim();
    if m > n {
        return Err(Error::TooManyEigenpairs { requested: m, dimension: n });
    }
    if m == 0 {
        return Ok(SpectrumSlice { values: vec![], vectors: vec![], residuals: vec![], clusters: vec![] });
    }
    let (k, mass) = (&forms.stiffness, &forms.mass);
    let p = (2 * m + 4).min(n);
    let factor = EnvelopeCholesky::new(k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut block: Vec<Vec<f64>> = (0..p).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let mut residuals = vec![f64::INFINITY; m];
    for _ in 0..cfg.max_iter {
        let rhs: Vec<Vec<f64>> = block.iter().map(|x| mass.apply(x)).collect();
        let y = factor.solve_many(&rhs);
        let (values, vectors) = rayleigh_ritz(k, mass, &y)?;
        for i in 0..m {
            residuals[i] = residual(k, mass, values[i], &vectors[i]);
        }
        block = vectors;
        if residuals.iter().all(|&r| r <= cfg.tol) {
            block.truncate(m);
            return finish(forms, values[..m].to_vec(), block, cfg);
        }
        if block.len() < p {
            // the basis lost rank; refill with fresh directions
            while block.len() < p {
                block.push((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
            }
        }
    }
    Err(Error::NoConvergence { iterations: cfg.max_iter, residuals })
}

/// Ritz pairs of the pencil on `span(y)`, ascending and M-orthonormal.
fn rayleigh_ritz(k: &CsrMatrix, mass: &CsrMatrix, y: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let p = y.len();
    let n = k.n();
    let my: Vec<Vec<f64>> = y.iter().map(|v| mass.apply(v)).collect();
    let gram = DMatrix::from_fn(p, p, |i, j| dot(&y[i], &my[j]));
    let gram = (&gram + gram.transpose()) * 0.5;
    // orthonormal basis of span(y) in the M inner product, dropping dependent directions
    let ge = SymmetricEigen::new(gram);
    let top = ge.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..p).filter(|&i| ge.eigenvalues[i] > 1e-13 * top).collect();
    if keep.is_empty() {
        return Err(Error::ZeroVector);
    }
    let r = keep.len();
    let z: Vec<Vec<f64>> = keep
        .iter()
        .map(|&c| {
            let s = 1.0 / ge.eigenvalues[c].sqrt();
            let mut v = vec![0.0; n];
            for (i, yi) in y.iter().enumerate() {
                let w = ge.eigenvectors[(i, c)] * s;
                v.iter_mut().zip(yi).for_each(|(a, b)| *a += w * b);
            }
            v
        })
        .collect();
    let kz: Vec<Vec<f64>> = z.iter().map(|v| k.apply(v)).collect();
    let small = DMatrix::from_fn(r, r, |i, j| dot(&z[i], &kz[j]));
    let small = (&small + small.transpose()) * 0.5;
    let se = SymmetricEigen::new(small);
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]).then(a.cmp(&b)));
    let mut values = Vec::with_capacity(r);
    let mut vectors = Vec::with_capacity(r);
    for &c in &order {
        let mut v = vec![0.0; n];
        for (i, zi) in z.iter().enumerate() {
            let w = se.eigenvectors[(i, c)];
            v.iter_mut().zip(zi).for_each(|(a, b)| *a += w * b);
        }
        // one more normalization pass against rounding in the two-stage basis
        let s = mass.quadratic_form(&v).sqrt();
        v.iter_mut().for_each(|a| *a /= s);
        values.push(se.eigenvalues[c]);
        vectors.push(v);
    }
    Ok((values, vectors))
}

/// Rayleigh quotient `u^T K u / u^T M u`.
pub fn rayleigh(u: &[f64], forms: &AssembledForms) -> Result<f64> {
    let b = forms.mass.quadratic_form(u);
    if b == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(forms.stiffness.quadratic_form(u) / b)
}

/// The `j`-th (1-based) pair of a slice.
pub fn pick_j(slice: &SpectrumSlice, j: usize) -> Result<EigenPair> {
    if j == 0 || j > slice.len() {
        return Err(Error::IndexOutOfRange { index: j, available: slice.len() });
    }
    let i = j - 1;
    Ok(EigenPair {
        lambda: slice.values[i],
        u: DiscreteFunction::new(slice.vectors[i].clone()),
        residual_norm: slice.residuals[i],
        multiplicity: slice.multiplicity(i),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{assemble, FeSpace};
    use crate::mesh::{unit_square_grid, unit_square_pair};
    use crate::problem::CoefficientField;

    fn forms(n: usize, degree: usize) -> AssembledForms {
        let mesh = unit_square_grid(n);
        forms_on(&mesh, degree)
    }

    fn forms_on(mesh: &crate::mesh::Triangulation, degree: usize) -> AssembledForms {
        assemble(&FeSpace::new(mesh, degree), &CoefficientField::laplace(&[0, 1])).unwrap()
    }

    #[test]
    fn one_by_one() {
        let f = forms(2, 1);
        let s = solve_smallest(&f, 1).unwrap();
        assert!((s.values[0] - 32.0).abs() < 1e-12);
        assert!((s.vectors[0][0] - 8f64.sqrt()).abs() < 1e-12);
        let p = pick_j(&s, 1).unwrap();
        assert_eq!(p.multiplicity, 1);
        assert!(matches!(pick_j(&s, 2), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(solve_smallest(&f, 2), Err(Error::TooManyEigenpairs { .. })));
    }

    #[test]
    fn iterative_matches_dense() {
        // uniform steps of the two-triangle square keep its full symmetry group
        let mut mesh = unit_square_pair();
        for _ in 0..4 {
            mesh = mesh.refine_uniform().unwrap();
        }
        let f = forms_on(&mesh, 1);
        assert_eq!(f.dim(), 225);
        let cfg = SolverConfig::default();
        let d = solve_dense(&f, 6, &cfg).unwrap();
        let it = solve_iterative(&f, 6, &cfg).unwrap();
        for i in 0..6 {
            assert!((d.values[i] - it.values[i]).abs() <= 1e-8 * d.values[i]);
            assert!(it.residuals[i] <= 1e-9);
        }
        for i in 0..6 {
            for j in 0..6 {
                let g = f.mass.bilinear_form(&it.vectors[i], &it.vectors[j]);
                assert!((g - if i == j { 1.0 } else { 0.0 }).abs() < 1e-10);
            }
        }
        assert_eq!(d.multiplicity(1), 2, "{:?}", d.values);
    }

    #[test]
    fn rayleigh_quotient() {
        let f = forms(4, 2);
        let s = solve_smallest(&f, 1).unwrap();
        let r = rayleigh(&s.vectors[0], &f).unwrap();
        assert!((r - s.values[0]).abs() < 1e-12 * r);
        let scaled: Vec<f64> = s.vectors[0].iter().map(|x| -3.5 * x).collect();
        assert!((rayleigh(&scaled, &f).unwrap() - r).abs() < 1e-12 * r);
        assert!(matches!(rayleigh(&vec![0.0; f.dim()], &f), Err(Error::ZeroVector)));
    }

    #[test]
    fn clusters() {
        assert_eq!(cluster_tags(&[1.0, 2.0, 2.0 + 1e-9, 3.0], 1e-6), vec![0, 1, 1, 3]);
    }
}
