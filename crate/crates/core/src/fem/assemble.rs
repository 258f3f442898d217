use rayon::prelude::*;

use super::quadrature::{triangle_rule, TriangleRule};
use super::{ElementMap, FeSpace, Tabulation};
use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;
use crate::problem::CoefficientField;

/// Stiffness `K` and mass `M` over the interior dofs of a space.
#[derive(Debug, Clone)]
pub struct AssembledForms {
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
}

impl AssembledForms {
    pub fn dim(&self) -> usize {
        self.stiffness.n()
    }
}

/// Quadrature degree integrating both forms exactly: `2 l + q`.
pub fn quadrature_degree(degree: usize, coeffs: &CoefficientField) -> usize {
    2 * degree + coeffs.degree_a().max(coeffs.degree_b()) as usize
}

/// Local stiffness and mass matrices of element `t`, row-major.
pub fn local_matrices(space: &FeSpace, coeffs: &CoefficientField, t: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let rule = triangle_rule(quadrature_degree(space.degree(), coeffs));
    let tab = space.basis.tabulate(&rule.points);
    local_with(space, coeffs, t, &tab, rule)
}

fn local_with(
    space: &FeSpace,
    coeffs: &CoefficientField,
    t: usize,
    tab: &Tabulation,
    rule: &TriangleRule,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = tab.n;
    let map = ElementMap::of(space.mesh, t);
    let region = coeffs.region(space.mesh.element(t).region)?;
    let mut k = vec![0.0; n * n];
    let mut m = vec![0.0; n * n];
    let mut grads = vec![[0.0; 2]; n];
    for (q, &w) in rule.weights.iter().enumerate() {
        let x = map.map(rule.points[q]);
        let wq = w * map.det.abs();
        let a = region.a(x);
        let b = region.b(x);
        for (g, &gr) in grads.iter_mut().zip(tab.gradients_at(q)) {
            *g = map.grad(gr);
        }
        let phi = tab.values_at(q);
        for i in 0..n {
            let agi = [a[0][0] * grads[i][0] + a[0][1] * grads[i][1], a[1][0] * grads[i][0] + a[1][1] * grads[i][1]];
            for j in i..n {
                k[i * n + j] += wq * (agi[0] * grads[j][0] + agi[1] * grads[j][1]);
                m[i * n + j] += wq * b * phi[i] * phi[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            k[i * n + j] = k[j * n + i];
            m[i * n + j] = m[j * n + i];
        }
    }
    Ok((k, m))
}

/// Assembles `K` and `M` with Dirichlet dofs eliminated.
///
/// Element matrices are computed in parallel and summed in element order, so
/// the result does not depend on the thread count.
pub fn assemble(space: &FeSpace, coeffs: &CoefficientField) -> Result<AssembledForms> {
    let dofs = &space.dofs;
    let n = dofs.num_interior();
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    let mesh = space.mesh;
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
    for t in 0..mesh.num_elements() {
        let local: Vec<usize> = dofs.element_dofs(t).iter().filter_map(|&g| dofs.interior_index(g)).collect();
        for &i in &local {
            rows[i].extend_from_slice(&local);
        }
    }
    for r in &mut rows {
        r.sort_unstable();
        r.dedup();
    }
    let mut stiffness = CsrMatrix::from_pattern(rows);
    let mut mass = stiffness.clone();

    let rule = triangle_rule(quadrature_degree(space.degree(), coeffs));
    let tab = space.basis.tabulate(&rule.points);
    let locals: Vec<(Vec<f64>, Vec<f64>)> = (0..mesh.num_elements())
        .into_par_iter()
        .map(|t| local_with(space, coeffs, t, &tab, rule))
        .collect::<Result<_>>()?;
    let nl = tab.n;
    for (t, (k, m)) in locals.iter().enumerate() {
        let ids = dofs.element_dofs(t);
        for a in 0..nl {
            let Some(i) = dofs.interior_index(ids[a]) else {
                continue;
            };
            for b in 0..nl {
                let Some(j) = dofs.interior_index(ids[b]) else {
                    continue;
                };
                stiffness.add(i, j, k[a * nl + b]);
                mass.add(i, j, m[a * nl + b]);
            }
        }
    }
    Ok(AssembledForms { stiffness, mass })
}
