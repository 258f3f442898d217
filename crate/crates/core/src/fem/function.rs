use super::assemble::AssembledForms;
use super::quadrature::triangle_rule;
use super::{reference_point, ElementMap, FeSpace};
use crate::mesh::Point;

/// Coefficients of a function in a space, one per interior dof; boundary
/// values are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteFunction {
    pub coeffs: Vec<f64>,
}

impl DiscreteFunction {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn zeros(n: usize) -> Self {
        Self { coeffs: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|x| c * x).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    /// Energy norm, `sqrt(u^T K u)`.
    pub a: f64,
    /// Weighted L2 norm, `sqrt(u^T M u)`.
    pub b: f64,
    /// Full H1 norm.
    pub h1: f64,
}

impl FeSpace<'_> {
    /// Values at the local nodes of element `t`.
    pub fn local_coeffs(&self, u: &[f64], t: usize) -> Vec<f64> {
        self.dofs.element_dofs(t).iter().map(|&g| self.dofs.interior_index(g).map_or(0.0, |i| u[i])).collect()
    }

    pub fn eval(&self, u: &[f64], t: usize, bary: [f64; 3]) -> f64 {
        let c = self.local_coeffs(u, t);
        let mut phi = vec![0.0; c.len()];
        self.basis.values(reference_point(bary), &mut phi);
        c.iter().zip(&phi).map(|(a, b)| a * b).sum()
    }

    pub fn eval_grad(&self, u: &[f64], t: usize, bary: [f64; 3]) -> [f64; 2] {
        let c = self.local_coeffs(u, t);
        let mut g = vec![[0.0; 2]; c.len()];
        self.basis.gradients(reference_point(bary), &mut g);
        let r = c.iter().zip(&g).fold([0.0; 2], |acc, (a, gr)| [acc[0] + a * gr[0], acc[1] + a * gr[1]]);
        ElementMap::of(self.mesh, t).grad(r)
    }

    /// Nodal interpolant; boundary nodes are dropped.
    pub fn interpolate(&self, f: impl Fn(Point) -> f64) -> DiscreteFunction {
        DiscreteFunction::new(self.dofs.interior_dofs().iter().map(|&g| f(self.dofs.point(g))).collect())
    }

    pub fn norms(&self, forms: &AssembledForms, u: &[f64]) -> Norms {
        let a = forms.stiffness.quadratic_form(u).max(0.0).sqrt();
        let b = forms.mass.quadratic_form(u).max(0.0).sqrt();
        let h1 = self.element_sq_norms(u).iter().map(|(l2, g)| l2 + g).sum::<f64>().sqrt();
        Norms { a, b, h1 }
    }

    /// Per element `(||u||^2_{L2(T)}, ||grad u||^2_{L2(T)})`, exact.
    pub fn element_sq_norms(&self, u: &[f64]) -> Vec<(f64, f64)> {
        let rule = triangle_rule(2 * self.degree());
        let tab = self.basis.tabulate(&rule.points);
        (0..self.mesh.num_elements())
            .map(|t| {
                let c = self.local_coeffs(u, t);
                let map = ElementMap::of(self.mesh, t);
                let (mut l2, mut gr) = (0.0, 0.0);
                for (q, &w) in rule.weights.iter().enumerate() {
                    let v: f64 = c.iter().zip(tab.values_at(q)).map(|(a, b)| a * b).sum();
                    let g = c
                        .iter()
                        .zip(tab.gradients_at(q))
                        .fold([0.0; 2], |acc, (a, g)| [acc[0] + a * g[0], acc[1] + a * g[1]]);
                    let g = map.grad(g);
                    let wq = w * map.det.abs();
                    l2 += wq * v * v;
                    gr += wq * (g[0] * g[0] + g[1] * g[1]);
                }
                (l2, gr)
            })
            .collect()
    }

    /// Represents `u` from this space in a nested finer space.
    ///
    /// `ancestor[t]` is the element of this mesh containing fine element `t`.
    pub fn prolong(&self, fine: &FeSpace, ancestor: &[usize], u: &[f64]) -> DiscreteFunction {
        assert_eq!(ancestor.len(), fine.mesh.num_elements());
        assert!(fine.degree() >= self.degree());
        let mut out = vec![0.0; fine.num_interior()];
        let mut done = vec![false; fine.num_interior()];
        let mut phi = vec![0.0; self.basis.len()];
        for (t, &parent) in ancestor.iter().enumerate() {
            let map = ElementMap::of(self.mesh, parent);
            let c = self.local_coeffs(u, parent);
            for &g in fine.dofs.element_dofs(t) {
                let Some(i) = fine.dofs.interior_index(g) else {
                    continue;
                };
                if done[i] {
                    continue;
                }
                self.basis.values(map.inverse(fine.dofs.point(g)), &mut phi);
                out[i] = c.iter().zip(&phi).map(|(a, b)| a * b).sum();
                done[i] = true;
            }
        }
        DiscreteFunction::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::assemble;
    use crate::mesh::{ancestor_map, unit_square_grid};
    use crate::problem::CoefficientField;

    #[test]
    fn hat_function_nodal_values() {
        let mesh = unit_square_grid(2);
        let space = FeSpace::new(&mesh, 1);
        let u = [1.0];
        let centre = space.dofs.interior_dofs()[0];
        for t in 0..mesh.num_elements() {
            let ids = space.dofs.element_dofs(t);
            for (k, &g) in ids.iter().enumerate() {
                let mut bary = [0.0; 3];
                bary[k] = 1.0;
                let expect = if g == centre { 1.0 } else { 0.0 };
                assert_eq!(space.eval(&u, t, bary), expect);
            }
        }
    }

    #[test]
    fn gradient_matches_differences() {
        let mesh = unit_square_grid(3);
        let space = FeSpace::new(&mesh, 1);
        let u: Vec<f64> = (0..space.num_interior()).map(|i| 1.0 + i as f64).collect();
        let t = 4;
        let map = ElementMap::of(&mesh, t);
        let bary = [0.3, 0.3, 0.4];
        let x = map.map(reference_point(bary));
        let value_at = |p: Point| {
            let xi = map.inverse(p);
            space.eval(&u, t, [1.0 - xi[0] - xi[1], xi[0], xi[1]])
        };
        let d = 1e-6;
        let fd = [
            (value_at([x[0] + d, x[1]]) - value_at([x[0] - d, x[1]])) / (2.0 * d),
            (value_at([x[0], x[1] + d]) - value_at([x[0], x[1] - d])) / (2.0 * d),
        ];
        let g = space.eval_grad(&u, t, bary);
        assert!((g[0] - fd[0]).abs() < 1e-8 && (g[1] - fd[1]).abs() < 1e-8);
    }

    #[test]
    fn prolongation_preserves_norms() {
        let coarse = unit_square_grid(2).refine(&[0, 3]).unwrap();
        let fine = coarse.refine(&[1, 2, 6]).unwrap();
        let anc = ancestor_map(&[coarse.clone(), fine.clone()]).unwrap();
        let coeffs = CoefficientField::laplace(&[0, 1]);
        for degree in 1..=3 {
            let cs = FeSpace::new(&coarse, degree);
            let fs = FeSpace::new(&fine, degree);
            let u: Vec<f64> = (0..cs.num_interior()).map(|i| ((i * 7 % 5) as f64 - 2.0) * 0.3).collect();
            let p = cs.prolong(&fs, &anc[0], &u);
            let nc = cs.norms(&assemble(&cs, &coeffs).unwrap(), &u);
            let nf = fs.norms(&assemble(&fs, &coeffs).unwrap(), &p.coeffs);
            assert!((nc.a - nf.a).abs() < 1e-12 * nc.a);
            assert!((nc.b - nf.b).abs() < 1e-12 * nc.b);
            assert!((nc.h1 - nf.h1).abs() < 1e-12 * nc.h1);
        }
    }
}
