//! Residual error indicators.
//!
//! For a pair `(mu, v)` the element residual is
//! `R = -div(A grad v) - mu B v` and the jump residual on an interior side is
//! the sum of the outward conormal fluxes `A grad v . n` from both sides. The
//! local indicator is `eta_T^2 = h_T^2 ||R||_T^2 + h_T ||J||_{dT}^2` with
//! `h_T = |T|^{1/2}`. Every interior side contributes its full `||J||_S^2` to
//! both neighbours.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::Result;
use crate::fem::basis::REFERENCE_VERTICES;
use crate::fem::quadrature::{line_rule, triangle_rule};
use crate::fem::{ElementMap, FeSpace, Tabulation};
use crate::mesh::Point;
use crate::problem::{CoefficientField, Poly, RegionCoefficients};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalEstimator {
    pub element: usize,
    pub eta: f64,
    /// `h_T^2 ||R||_T^2`.
    pub part_residual: f64,
    /// `h_T ||J||_{dT}^2`.
    pub part_jump: f64,
    /// `h_T ||R - Rbar||_T` with `Rbar` the L2 projection onto degree `l - 1`.
    pub osc_residual: f64,
    /// `h_T^{1/2} ||J - Jbar||_{dT}`, projected side by side.
    pub osc_jump: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorField {
    pub locals: Vec<LocalEstimator>,
    /// `(sum eta_T^2)^{1/2}`.
    pub global: f64,
    pub mu: f64,
    pub v: Vec<f64>,
}

impl EstimatorField {
    pub fn values(&self) -> Vec<f64> {
        self.locals.iter().map(|l| l.eta).collect()
    }

    pub fn max(&self) -> f64 {
        self.locals.iter().map(|l| l.eta).fold(0.0, f64::max)
    }

    /// Element ids ordered by decreasing indicator, ties by id.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.locals.len()).collect();
        order.sort_by(|&a, &b| self.locals[b].eta.total_cmp(&self.locals[a].eta).then(a.cmp(&b)));
        order
    }
}

/// Coefficients with their first derivatives, per region.
struct RegionData {
    c: RegionCoefficients,
    div: [Poly; 2],
}

impl RegionData {
    fn new(c: &RegionCoefficients) -> Self {
        let div = [c.a11.dx().plus(&c.a12.dy()), c.a12.dx().plus(&c.a22.dy())];
        Self { c: c.clone(), div }
    }

    fn residual(&self, x: Point, mu: f64, value: f64, grad: [f64; 2], hess: [f64; 3]) -> f64 {
        let a = self.c.a(x);
        let d = [self.div[0].eval(x), self.div[1].eval(x)];
        let div_flux =
            d[0] * grad[0] + d[1] * grad[1] + a[0][0] * hess[0] + 2.0 * a[0][1] * hess[1] + a[1][1] * hess[2];
        -div_flux - mu * self.c.b(x) * value
    }

    fn flux(&self, x: Point, grad: [f64; 2]) -> [f64; 2] {
        let a = self.c.a(x);
        [a[0][0] * grad[0] + a[0][1] * grad[1], a[1][0] * grad[0] + a[1][1] * grad[1]]
    }
}

/// Evaluation context shared by the element and side loops.
pub struct ResidualContext<'s, 'm> {
    space: &'s FeSpace<'m>,
    regions: BTreeMap<u32, RegionData>,
    q: usize,
}

impl<'s, 'm> ResidualContext<'s, 'm> {
    pub fn new(space: &'s FeSpace<'m>, coeffs: &CoefficientField) -> Result<Self> {
        let mut regions = BTreeMap::new();
        for el in space.mesh.elements() {
            if !regions.contains_key(&el.region) {
                regions.insert(el.region, RegionData::new(coeffs.region(el.region)?));
            }
        }
        let q = coeffs.degree_a().max(coeffs.degree_b()) as usize;
        Ok(Self { space, regions, q })
    }

    fn region(&self, t: usize) -> &RegionData {
        &self.regions[&self.space.mesh.element(t).region]
    }

    /// `R(mu, v)` at reference point `xi` of element `t`.
    pub fn element_residual(&self, t: usize, mu: f64, v: &[f64], xi: [f64; 2]) -> f64 {
        let tab = self.space.basis.tabulate(&[xi]);
        let c = self.space.local_coeffs(v, t);
        self.residual_at(t, &ElementMap::of(self.space.mesh, t), &c, mu, &tab, 0, xi)
    }

    #[allow(clippy::too_many_arguments)]
    fn residual_at(
        &self,
        t: usize,
        map: &ElementMap,
        c: &[f64],
        mu: f64,
        tab: &Tabulation,
        q: usize,
        xi: [f64; 2],
    ) -> f64 {
        let mut value = 0.0;
        let mut grad = [0.0; 2];
        let mut hess = [0.0; 3];
        for (k, &ck) in c.iter().enumerate() {
            value += ck * tab.values_at(q)[k];
            let g = tab.gradients_at(q)[k];
            let h = tab.hessians_at(q)[k];
            grad[0] += ck * g[0];
            grad[1] += ck * g[1];
            for i in 0..3 {
                hess[i] += ck * h[i];
            }
        }
        self.region(t).residual(map.map(xi), mu, value, map.grad(grad), map.hessian(hess))
    }

    /// Reference point on local edge `e` of element `t` at parameter `s`,
    /// measured from the lower-numbered endpoint of the side.
    fn edge_point(&self, t: usize, e: usize, s: f64) -> [f64; 2] {
        let el = self.space.mesh.element(t);
        let side = &self.space.mesh.sides()[self.space.mesh.element_sides(t)[e]];
        let (a, b) = (REFERENCE_VERTICES[(e + 1) % 3], REFERENCE_VERTICES[(e + 2) % 3]);
        let s = if el.vertices[(e + 1) % 3] == side.vertices[0] { s } else { 1.0 - s };
        [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
    }

    fn conormal(&self, t: usize, e: usize, v: &[f64], s: &[f64]) -> Vec<f64> {
        let map = ElementMap::of(self.space.mesh, t);
        let (n, _) = self.space.mesh.edge_normal(t, e);
        let pts: Vec<[f64; 2]> = s.iter().map(|&s| self.edge_point(t, e, s)).collect();
        let tab = self.space.basis.tabulate(&pts);
        let c = self.space.local_coeffs(v, t);
        pts.iter()
            .enumerate()
            .map(|(q, &xi)| {
                let g = c
                    .iter()
                    .zip(tab.gradients_at(q))
                    .fold([0.0; 2], |acc, (a, g)| [acc[0] + a * g[0], acc[1] + a * g[1]]);
                let f = self.region(t).flux(map.map(xi), map.grad(g));
                f[0] * n[0] + f[1] * n[1]
            })
            .collect()
    }

    /// `J(v)` at parameters `s` along side `side` (from its lower-numbered
    /// endpoint); zero on the boundary.
    pub fn jump_residual(&self, side: usize, v: &[f64], s: &[f64]) -> Vec<f64> {
        let sd = &self.space.mesh.sides()[side];
        if sd.boundary {
            return vec![0.0; s.len()];
        }
        let (t1, e1) = sd.local[0];
        let (t2, e2) = sd.local[1];
        let f1 = self.conormal(t1, e1 as usize, v, s);
        let f2 = self.conormal(t2, e2 as usize, v, s);
        f1.iter().zip(&f2).map(|(a, b)| a + b).collect()
    }

    /// `(||R||_T^2, ||R - Rbar||_T^2)`.
    fn element_norms(&self, t: usize, mu: f64, v: &[f64], tab: &Tabulation, proj: &Projection) -> (f64, f64) {
        let rule = triangle_rule(self.element_rule_degree());
        let map = ElementMap::of(self.space.mesh, t);
        let c = self.space.local_coeffs(v, t);
        let r: Vec<f64> =
            rule.points.iter().enumerate().map(|(q, &xi)| self.residual_at(t, &map, &c, mu, tab, q, xi)).collect();
        let area = map.det.abs();
        let full = area * rule.weights.iter().zip(&r).map(|(w, x)| w * x * x).sum::<f64>();
        (full, area * proj.remainder_sq(&r))
    }

    /// `(||J||_S^2, ||J - Jbar||_S^2)`.
    fn side_norms(&self, side: usize, v: &[f64], proj: &Projection) -> (f64, f64) {
        let sd = &self.space.mesh.sides()[side];
        if sd.boundary {
            return (0.0, 0.0);
        }
        let rule = line_rule(self.side_rule_degree());
        let j = self.jump_residual(side, v, &rule.points);
        let p = self.space.mesh.vertices();
        let (a, b) = (p[sd.vertices[0]], p[sd.vertices[1]]);
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        let full = len * rule.weights.iter().zip(&j).map(|(w, x)| w * x * x).sum::<f64>();
        (full, len * proj.remainder_sq(&j))
    }

    fn element_rule_degree(&self) -> usize {
        2 * (self.space.degree() + self.q)
    }

    fn side_rule_degree(&self) -> usize {
        2 * (self.space.degree() - 1 + self.q)
    }
}

/// Discrete L2 projection onto polynomials of a fixed degree, evaluated at
/// the points of a quadrature rule that integrates the squares exactly.
struct Projection {
    weights: Vec<f64>,
    /// Values of an orthonormal basis at the rule points, one row per basis function.
    basis: Vec<Vec<f64>>,
}

impl Projection {
    fn new(weights: &[f64], monomials: Vec<Vec<f64>>) -> Self {
        let k = monomials.len();
        let gram = DMatrix::from_fn(k, k, |i, j| {
            weights.iter().zip(&monomials[i]).zip(&monomials[j]).map(|((w, a), b)| w * a * b).sum()
        });
        let l = gram.cholesky().expect("monomials are independent").l();
        // rows of L^{-1} P are orthonormal in the weighted inner product
        let p = DMatrix::from_fn(k, weights.len(), |i, q| monomials[i][q]);
        let o = l.solve_lower_triangular(&p).expect("nonsingular");
        let basis = (0..k).map(|i| o.row(i).iter().copied().collect()).collect();
        Self { weights: weights.to_vec(), basis }
    }

    fn on_triangle(points: &[[f64; 2]], weights: &[f64], degree: usize) -> Self {
        let monomials = (0..=degree)
            .flat_map(|d| (0..=d).map(move |j| (d - j, j)))
            .map(|(i, j)| points.iter().map(|p| p[0].powi(i as i32) * p[1].powi(j as i32)).collect())
            .collect();
        Self::new(weights, monomials)
    }

    fn on_segment(points: &[f64], weights: &[f64], degree: usize) -> Self {
        let monomials = (0..=degree).map(|i| points.iter().map(|s| s.powi(i as i32)).collect()).collect();
        Self::new(weights, monomials)
    }

    /// Weighted sum of squares of `f` minus its projection.
    fn remainder_sq(&self, f: &[f64]) -> f64 {
        let coeffs: Vec<f64> =
            self.basis.iter().map(|b| self.weights.iter().zip(b).zip(f).map(|((w, x), y)| w * x * y).sum()).collect();
        let mut rest = DVector::from_column_slice(f);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            for (r, x) in rest.iter_mut().zip(b) {
                *r -= c * x;
            }
        }
        self.weights.iter().zip(rest.iter()).map(|(w, r)| w * r * r).sum()
    }
}

/// Local and global indicators for the pair `(mu, v)`, together with the
/// oscillation terms.
pub fn estimate(space: &FeSpace, coeffs: &CoefficientField, mu: f64, v: &[f64]) -> Result<EstimatorField> {
    let ctx = ResidualContext::new(space, coeffs)?;
    let mesh = space.mesh;
    let degree = space.degree();
    let erule = triangle_rule(ctx.element_rule_degree());
    let etab = space.basis.tabulate(&erule.points);
    let eproj = Projection::on_triangle(&erule.points, &erule.weights, degree - 1);
    let srule = line_rule(ctx.side_rule_degree());
    let sproj = Projection::on_segment(&srule.points, &srule.weights, degree - 1);

    let elems: Vec<(f64, f64)> =
        (0..mesh.num_elements()).into_par_iter().map(|t| ctx.element_norms(t, mu, v, &etab, &eproj)).collect();
    let sides: Vec<(f64, f64)> =
        (0..mesh.sides().len()).into_par_iter().map(|s| ctx.side_norms(s, v, &sproj)).collect();

    let locals: Vec<LocalEstimator> = (0..mesh.num_elements())
        .map(|t| {
            let h = mesh.meshsize(t);
            let (r2, rosc2) = elems[t];
            let (mut j2, mut josc2) = (0.0, 0.0);
            for s in mesh.element_sides(t) {
                j2 += sides[s].0;
                josc2 += sides[s].1;
            }
            let part_residual = h * h * r2;
            let part_jump = h * j2;
            LocalEstimator {
                element: t,
                eta: (part_residual + part_jump).sqrt(),
                part_residual,
                part_jump,
                osc_residual: h * rosc2.max(0.0).sqrt(),
                osc_jump: (h * josc2.max(0.0)).sqrt(),
            }
        })
        .collect();
    let global = locals.iter().map(|l| l.part_residual + l.part_jump).sum::<f64>().sqrt();
    Ok(EstimatorField { locals, global, mu, v: v.to_vec() })
}

/// Per element `(osc_residual, osc_jump)`.
pub fn oscillation(space: &FeSpace, coeffs: &CoefficientField, mu: f64, v: &[f64]) -> Result<Vec<(f64, f64)>> {
    Ok(estimate(space, coeffs, mu, v)?.locals.iter().map(|l| (l.osc_residual, l.osc_jump)).collect())
}
