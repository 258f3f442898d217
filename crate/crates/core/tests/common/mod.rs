//! Shared test oracles that do not go through the library's assembly code.
#![allow(dead_code)]

use std::collections::BTreeMap;

use afem::fem::FeSpace;
use afem::mesh::Triangulation;
use afem::problem::CoefficientField;
use nalgebra::DMatrix;

/// Polynomial in the barycentric coordinates `(l0, l1, l2)`.
#[derive(Debug, Clone, Default)]
struct BaryPoly(BTreeMap<[u32; 3], f64>);

impl BaryPoly {
    fn constant(c: f64) -> Self {
        BaryPoly(BTreeMap::from([([0, 0, 0], c)]))
    }

    /// `a * l_i + b`.
    fn affine(i: usize, a: f64, b: f64) -> Self {
        let mut e = [0; 3];
        e[i] = 1;
        let mut p = BTreeMap::from([(e, a)]);
        if b != 0.0 {
            p.insert([0, 0, 0], b);
        }
        BaryPoly(p)
    }

    fn mul(&self, other: &BaryPoly) -> BaryPoly {
        let mut out = BTreeMap::new();
        for (ea, ca) in &self.0 {
            for (eb, cb) in &other.0 {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                *out.entry(e).or_insert(0.0) += ca * cb;
            }
        }
        BaryPoly(out)
    }

    fn diff(&self, i: usize) -> BaryPoly {
        let mut out = BTreeMap::new();
        for (e, c) in &self.0 {
            if e[i] > 0 {
                let mut d = *e;
                d[i] -= 1;
                *out.entry(d).or_insert(0.0) += c * e[i] as f64;
            }
        }
        BaryPoly(out)
    }

    /// Integral over a triangle of area `area`: `2 |T| a! b! c! / (a + b + c + 2)!`.
    fn integrate(&self, area: f64) -> f64 {
        let fact = |n: u32| (1..=n).map(|k| k as f64).product::<f64>();
        self.0
            .iter()
            .map(|(e, c)| c * 2.0 * area * fact(e[0]) * fact(e[1]) * fact(e[2]) / fact(e[0] + e[1] + e[2] + 2))
            .sum()
    }
}

/// Lagrange basis on the barycentric lattice `alpha / degree`, `|alpha| = degree`.
fn lattice_basis(degree: u32) -> Vec<([u32; 3], BaryPoly)> {
    let mut out = Vec::new();
    for a0 in 0..=degree {
        for a1 in 0..=degree - a0 {
            let alpha = [a0, a1, degree - a0 - a1];
            let mut phi = BaryPoly::constant(1.0);
            for (i, &ai) in alpha.iter().enumerate() {
                for k in 0..ai {
                    // (degree l_i - k) / (k + 1)
                    let factor = BaryPoly::affine(i, degree as f64 / (k + 1) as f64, -(k as f64) / (k + 1) as f64);
                    phi = phi.mul(&factor);
                }
            }
            out.push((alpha, phi));
        }
    }
    out
}

/// Dense stiffness and mass matrices over interior dofs for coefficients that
/// are constant on each element, integrated exactly in barycentric coordinates.
/// Local nodes are matched to the space's global dofs by position.
pub fn dense_reassembly(space: &FeSpace, coeffs: &CoefficientField) -> (DMatrix<f64>, DMatrix<f64>) {
    let mesh: &Triangulation = space.mesh;
    let degree = space.degree() as u32;
    let basis = lattice_basis(degree);
    let n = space.dofs.num_interior();
    let mut k = DMatrix::zeros(n, n);
    let mut m = DMatrix::zeros(n, n);
    for t in 0..mesh.num_elements() {
        let x = mesh.element_coords(t);
        let region = mesh.element(t).region;
        let centroid = [(x[0][0] + x[1][0] + x[2][0]) / 3.0, (x[0][1] + x[1][1] + x[2][1]) / 3.0];
        let a = coeffs.eval_a(region, centroid).unwrap();
        let b = coeffs.eval_b(region, centroid).unwrap();
        let signed = 0.5 * ((x[1][0] - x[0][0]) * (x[2][1] - x[0][1]) - (x[2][0] - x[0][0]) * (x[1][1] - x[0][1]));
        let area = signed.abs();
        let grad_l: Vec<[f64; 2]> = (0..3)
            .map(|i| {
                let v = [x[(i + 2) % 3][0] - x[(i + 1) % 3][0], x[(i + 2) % 3][1] - x[(i + 1) % 3][1]];
                [-v[1] / (2.0 * signed), v[0] / (2.0 * signed)]
            })
            .collect();
        // G[k][l] = grad l_k . A grad l_l
        let mut g = [[0.0; 3]; 3];
        for p in 0..3 {
            for q in 0..3 {
                let ag =
                    [a[0][0] * grad_l[q][0] + a[0][1] * grad_l[q][1], a[1][0] * grad_l[q][0] + a[1][1] * grad_l[q][1]];
                g[p][q] = grad_l[p][0] * ag[0] + grad_l[p][1] * ag[1];
            }
        }
        let candidates = space.dofs.element_dofs(t);
        let global: Vec<usize> = basis
            .iter()
            .map(|(alpha, _)| {
                let d = degree as f64;
                let p = [
                    (alpha[0] as f64 * x[0][0] + alpha[1] as f64 * x[1][0] + alpha[2] as f64 * x[2][0]) / d,
                    (alpha[0] as f64 * x[0][1] + alpha[1] as f64 * x[1][1] + alpha[2] as f64 * x[2][1]) / d,
                ];
                *candidates
                    .iter()
                    .find(|&&c| {
                        let q = space.dofs.point(c);
                        (q[0] - p[0]).hypot(q[1] - p[1]) < 1e-9
                    })
                    .expect("every lattice node is a dof of its element")
            })
            .collect();
        let derivs: Vec<Vec<BaryPoly>> = basis.iter().map(|(_, phi)| (0..3).map(|i| phi.diff(i)).collect()).collect();
        for (i, (_, phi_i)) in basis.iter().enumerate() {
            let Some(gi) = space.dofs.interior_index(global[i]) else {
                continue;
            };
            for (j, (_, phi_j)) in basis.iter().enumerate() {
                let Some(gj) = space.dofs.interior_index(global[j]) else {
                    continue;
                };
                let mut kij = 0.0;
                for p in 0..3 {
                    for q in 0..3 {
                        kij += g[p][q] * derivs[i][p].mul(&derivs[j][q]).integrate(area);
                    }
                }
                k[(gi, gj)] += kij;
                m[(gi, gj)] += b * phi_i.mul(phi_j).integrate(area);
            }
        }
    }
    (k, m)
}

/// Largest entrywise difference relative to the largest entry of `reference`.
pub fn relative_entry_gap(a: &DMatrix<f64>, reference: &DMatrix<f64>) -> f64 {
    let scale = reference.amax();
    (a - reference).amax() / scale
}
