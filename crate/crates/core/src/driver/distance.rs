use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::fem::quadrature::triangle_rule;
use crate::fem::{ElementMap, FeSpace};
use crate::problem::RefFunction;

/// Distances from a discrete function to the set of b-normalized elements of
/// a reference eigenspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenspaceDistance {
    /// Full H1 norm.
    pub h1: f64,
    /// Gradient seminorm, the energy norm when `A = I`.
    pub energy: f64,
}

/// `min ||u - w||` over `w` in the span of `basis` with `||w||_b = 1`.
///
/// Integrals against the closed-form functions use a rule of degree
/// `2 l + 6`. `B = 1` is assumed for the normalization, as in every benchmark
/// that carries a closed-form eigenspace.
pub fn dist_to_eigenspace(space: &FeSpace, u: &[f64], basis: &[RefFunction]) -> Result<EigenspaceDistance> {
    if basis.is_empty() {
        return Err(Error::ReferenceUnavailable);
    }
    let g = basis.len();
    let rule = triangle_rule(2 * space.degree() + 6);
    let tab = space.basis.tabulate(&rule.points);
    // mass and gradient Gram matrices of the basis, and the same inner products against u
    let mut mass = DMatrix::zeros(g, g);
    let mut stiff = DMatrix::zeros(g, g);
    let mut fm = DVector::zeros(g);
    let mut fs = DVector::zeros(g);
    let (mut um, mut us) = (0.0, 0.0);
    for t in 0..space.mesh.num_elements() {
        let map = ElementMap::of(space.mesh, t);
        let c = space.local_coeffs(u, t);
        for (q, &w) in rule.weights.iter().enumerate() {
            let x = map.map(rule.points[q]);
            let wq = w * map.det.abs();
            let v: f64 = c.iter().zip(tab.values_at(q)).map(|(a, b)| a * b).sum();
            let gr =
                c.iter().zip(tab.gradients_at(q)).fold([0.0; 2], |acc, (a, g)| [acc[0] + a * g[0], acc[1] + a * g[1]]);
            let gr = map.grad(gr);
            um += wq * v * v;
            us += wq * (gr[0] * gr[0] + gr[1] * gr[1]);
            let vals: Vec<f64> = basis.iter().map(|f| f.value(x)).collect();
            let grads: Vec<[f64; 2]> = basis.iter().map(|f| f.grad(x)).collect();
            for i in 0..g {
                fm[i] += wq * v * vals[i];
                fs[i] += wq * (gr[0] * grads[i][0] + gr[1] * grads[i][1]);
                for j in 0..g {
                    mass[(i, j)] += wq * vals[i] * vals[j];
                    stiff[(i, j)] += wq * (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
                }
            }
        }
    }
    let h1 = sphere_distance(&mass, &(&mass + &stiff), &(&fm + &fs), um + us);
    let energy = sphere_distance(&mass, &stiff, &fs, us);
    Ok(EigenspaceDistance { h1, energy })
}

/// `min_{c^T B c = 1} (nu - 2 c^T f + c^T G c)^{1/2}`.
fn sphere_distance(b: &DMatrix<f64>, g: &DMatrix<f64>, f: &DVector<f64>, nu: f64) -> f64 {
    let l = b.clone().cholesky().expect("reference basis is independent").l();
    // substitute c = L^{-T} d so the constraint becomes |d| = 1
    let gl = l.solve_lower_triangular(g).expect("nonsingular");
    let gt = l.solve_lower_triangular(&gl.transpose()).expect("nonsingular");
    let gt = (&gt + gt.transpose()) * 0.5;
    let ft = l.solve_lower_triangular(f).expect("nonsingular");
    let eig = SymmetricEigen::new(gt.clone());
    let n = eig.eigenvalues.len();
    let lam: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let fq: Vec<f64> = (0..n).map(|i| eig.eigenvectors.column(i).dot(&ft)).collect();
    let lmin = lam.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = lam.iter().map(|x| x.abs()).fold(1.0, f64::max);
    let is_min = |i: usize| lam[i] - lmin <= 1e-12 * scale;
    let norm_at = |s: f64| (0..n).map(|i| (fq[i] / (lam[i] - s)).powi(2)).sum::<f64>();
    let minimal_weight: f64 = (0..n).filter(|&i| is_min(i)).map(|i| fq[i] * fq[i]).sum();
    let mut d = vec![0.0; n];
    if minimal_weight > 0.0 {
        // secular equation |(Lambda - s)^{-1} f| = 1 with s < lmin
        let mut lo = lmin - (fq.iter().map(|x| x * x).sum::<f64>().sqrt() + 1.0);
        let mut hi = lmin;
        while norm_at(lo) > 1.0 {
            lo -= hi - lo;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if norm_at(mid) > 1.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let s = 0.5 * (lo + hi);
        for i in 0..n {
            d[i] = fq[i] / (lam[i] - s);
        }
    } else {
        // the hard case: the remainder goes into the lowest eigendirection
        let mut rest = 0.0;
        for i in 0..n {
            if !is_min(i) {
                d[i] = fq[i] / (lam[i] - lmin);
                rest += d[i] * d[i];
            }
        }
        let first = (0..n).find(|&i| is_min(i)).expect("nonempty");
        d[first] = (1.0 - rest).max(0.0).sqrt();
    }
    let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
    d.iter_mut().for_each(|x| *x /= norm);
    let quad: f64 = (0..n).map(|i| lam[i] * d[i] * d[i]).sum();
    let lin: f64 = (0..n).map(|i| fq[i] * d[i]).sum();
    (nu - 2.0 * lin + quad).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::unit_square_grid;

    fn sine(m: u32, n: u32) -> RefFunction {
        RefFunction::SineProduct { m, n, scale: 2.0 }
    }

    #[test]
    fn interpolant_distance_shrinks_and_ignores_sign() {
        let mut last = f64::INFINITY;
        for n in [8, 16, 32] {
            let mesh = unit_square_grid(n);
            let space = FeSpace::new(&mesh, 2);
            let f = sine(1, 1);
            let u = space.interpolate(|p| f.value(p)).coeffs;
            let d = dist_to_eigenspace(&space, &u, &[f]).unwrap();
            let neg: Vec<f64> = u.iter().map(|x| -x).collect();
            let dn = dist_to_eigenspace(&space, &neg, &[f]).unwrap();
            assert!((d.h1 - dn.h1).abs() < 1e-12);
            assert!(d.h1 < last);
            last = d.h1;
        }
        assert!(last < 0.1 && last > 0.0);
    }

    #[test]
    fn zero_function_distance_is_the_norm_of_a_unit_element() {
        let mesh = unit_square_grid(16);
        let space = FeSpace::new(&mesh, 2);
        let zero = vec![0.0; space.num_interior()];
        let d = dist_to_eigenspace(&space, &zero, &[sine(1, 1)]).unwrap();
        // ||w||_H1^2 = 1 + 2 pi^2 for the b-normalized first eigenfunction
        let expect = (1.0 + 2.0 * std::f64::consts::PI.powi(2)).sqrt();
        assert!((d.h1 - expect).abs() < 1e-6);
        let pair = dist_to_eigenspace(&space, &zero, &[sine(1, 2), sine(2, 1)]).unwrap();
        assert!((pair.h1 - (1.0 + 5.0 * std::f64::consts::PI.powi(2)).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn rotated_member_of_a_double_eigenspace_is_found() {
        let mesh = unit_square_grid(24);
        let space = FeSpace::new(&mesh, 2);
        let (a, b) = (sine(1, 2), sine(2, 1));
        let (c, s) = (0.6, -0.8);
        let u = space.interpolate(|p| c * a.value(p) + s * b.value(p)).coeffs;
        let d = dist_to_eigenspace(&space, &u, &[a, b]).unwrap();
        let single = dist_to_eigenspace(&space, &u, &[a]).unwrap();
        assert!(d.h1 < 0.05 && single.h1 > 1.0);
    }

    #[test]
    fn no_basis() {
        let mesh = unit_square_grid(2);
        let space = FeSpace::new(&mesh, 1);
        assert!(matches!(dist_to_eigenspace(&space, &[1.0], &[]), Err(Error::ReferenceUnavailable)));
    }
}
