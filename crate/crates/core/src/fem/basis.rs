//! Nodal Lagrange basis of degree 1..=3 on the reference triangle.
//!
//! Node order: the three vertices, then `degree - 1` nodes on each local edge
//! (edge `e` runs from vertex `(e+1)%3` to `(e+2)%3`), then the centroid for
//! degree 3.

use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub struct LagrangeBasis {
    degree: usize,
    nodes: Vec<[f64; 2]>,
    /// Monomial exponents `(i, j)` for `xi^i eta^j`.
    monomials: Vec<(i32, i32)>,
    /// `coeffs[(m, k)]` is the coefficient of monomial `m` in basis function `k`.
    coeffs: DMatrix<f64>,
}

pub const REFERENCE_VERTICES: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

impl LagrangeBasis {
    pub fn new(degree: usize) -> Self {
        assert!((1..=3).contains(&degree), "degree {degree} not supported");
        let nodes = reference_nodes(degree);
        let monomials: Vec<(i32, i32)> = (0..=degree as i32).flat_map(|d| (0..=d).map(move |j| (d - j, j))).collect();
        let n = nodes.len();
        let vander = DMatrix::from_fn(n, n, |r, m| {
            let (i, j) = monomials[m];
            nodes[r][0].powi(i) * nodes[r][1].powi(j)
        });
        // V c_k = e_k, so the coefficient matrix is the inverse Vandermonde
        let coeffs = vander.try_inverse().expect("unisolvent nodes");
        Self { degree, nodes, monomials, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    fn combine(&self, mono: impl Fn(i32, i32) -> f64, out: &mut [f64]) {
        let vals: Vec<f64> = self.monomials.iter().map(|&(i, j)| mono(i, j)).collect();
        for (k, o) in out.iter_mut().enumerate() {
            *o = vals.iter().enumerate().map(|(m, v)| v * self.coeffs[(m, k)]).sum();
        }
    }

    /// Basis values at a reference point.
    pub fn values(&self, p: [f64; 2], out: &mut [f64]) {
        self.combine(|i, j| pw(p[0], i) * pw(p[1], j), out);
    }

    /// Reference gradients at a point.
    pub fn gradients(&self, p: [f64; 2], out: &mut [[f64; 2]]) {
        let n = self.len();
        let mut gx = vec![0.0; n];
        let mut gy = vec![0.0; n];
        self.combine(|i, j| i as f64 * pw(p[0], i - 1) * pw(p[1], j), &mut gx);
        self.combine(|i, j| j as f64 * pw(p[0], i) * pw(p[1], j - 1), &mut gy);
        for k in 0..n {
            out[k] = [gx[k], gy[k]];
        }
    }

    /// Reference Hessians `[d_xx, d_xy, d_yy]` at a point.
    pub fn hessians(&self, p: [f64; 2], out: &mut [[f64; 3]]) {
        let n = self.len();
        let mut hxx = vec![0.0; n];
        let mut hxy = vec![0.0; n];
        let mut hyy = vec![0.0; n];
        self.combine(|i, j| (i * (i - 1)) as f64 * pw(p[0], i - 2) * pw(p[1], j), &mut hxx);
        self.combine(|i, j| (i * j) as f64 * pw(p[0], i - 1) * pw(p[1], j - 1), &mut hxy);
        self.combine(|i, j| (j * (j - 1)) as f64 * pw(p[0], i) * pw(p[1], j - 2), &mut hyy);
        for k in 0..n {
            out[k] = [hxx[k], hxy[k], hyy[k]];
        }
    }
}

/// Basis values and derivatives tabulated at a fixed set of reference points.
#[derive(Debug, Clone)]
pub struct Tabulation {
    pub n: usize,
    pub values: Vec<f64>,
    pub gradients: Vec<[f64; 2]>,
    pub hessians: Vec<[f64; 3]>,
}

impl Tabulation {
    pub fn values_at(&self, q: usize) -> &[f64] {
        &self.values[q * self.n..(q + 1) * self.n]
    }

    pub fn gradients_at(&self, q: usize) -> &[[f64; 2]] {
        &self.gradients[q * self.n..(q + 1) * self.n]
    }

    pub fn hessians_at(&self, q: usize) -> &[[f64; 3]] {
        &self.hessians[q * self.n..(q + 1) * self.n]
    }
}

impl LagrangeBasis {
    pub fn tabulate(&self, points: &[[f64; 2]]) -> Tabulation {
        let n = self.len();
        let mut t = Tabulation {
            n,
            values: vec![0.0; n * points.len()],
            gradients: vec![[0.0; 2]; n * points.len()],
            hessians: vec![[0.0; 3]; n * points.len()],
        };
        for (q, &p) in points.iter().enumerate() {
            self.values(p, &mut t.values[q * n..(q + 1) * n]);
            self.gradients(p, &mut t.gradients[q * n..(q + 1) * n]);
            self.hessians(p, &mut t.hessians[q * n..(q + 1) * n]);
        }
        t
    }
}

/// `x^k`, with negative powers (only ever multiplied by a zero factor) mapped to 0.
fn pw(x: f64, k: i32) -> f64 {
    if k < 0 {
        0.0
    } else {
        x.powi(k)
    }
}

pub fn reference_nodes(degree: usize) -> Vec<[f64; 2]> {
    let v = REFERENCE_VERTICES;
    let mut nodes = v.to_vec();
    for e in 0..3 {
        let (a, b) = (v[(e + 1) % 3], v[(e + 2) % 3]);
        for k in 1..degree {
            let t = k as f64 / degree as f64;
            nodes.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    if degree == 3 {
        nodes.push([1.0 / 3.0, 1.0 / 3.0]);
    }
    nodes
}
