//! Continuous Lagrange spaces of degree 1..=3 with homogeneous Dirichlet
//! conditions, quadrature, and assembly of the stiffness and mass forms.

mod assemble;
pub mod basis;
mod dofmap;
mod export;
mod function;
pub mod quadrature;

pub use assemble::{assemble, local_matrices, quadrature_degree, AssembledForms};
pub use basis::{LagrangeBasis, Tabulation};
pub use dofmap::{build_dofmap, DofMap};
pub use export::{read_matrix, write_matrix};
pub use function::{DiscreteFunction, Norms};

use crate::mesh::{Point, Triangulation};

/// Affine map `x = p0 + J xi` from the reference triangle onto an element.
#[derive(Debug, Clone, Copy)]
pub struct ElementMap {
    pub origin: Point,
    /// Row-major Jacobian.
    pub jac: [[f64; 2]; 2],
    /// Row-major inverse Jacobian.
    pub inv: [[f64; 2]; 2],
    pub det: f64,
}

impl ElementMap {
    pub fn new(p: [Point; 3]) -> Self {
        let jac = [[p[1][0] - p[0][0], p[2][0] - p[0][0]], [p[1][1] - p[0][1], p[2][1] - p[0][1]]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let inv = [[jac[1][1] / det, -jac[0][1] / det], [-jac[1][0] / det, jac[0][0] / det]];
        Self { origin: p[0], jac, inv, det }
    }

    pub fn of(mesh: &Triangulation, t: usize) -> Self {
        Self::new(mesh.element_coords(t))
    }

    pub fn map(&self, xi: [f64; 2]) -> Point {
        [
            self.origin[0] + self.jac[0][0] * xi[0] + self.jac[0][1] * xi[1],
            self.origin[1] + self.jac[1][0] * xi[0] + self.jac[1][1] * xi[1],
        ]
    }

    /// Reference coordinates of a physical point.
    pub fn inverse(&self, x: Point) -> [f64; 2] {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        [self.inv[0][0] * d[0] + self.inv[0][1] * d[1], self.inv[1][0] * d[0] + self.inv[1][1] * d[1]]
    }

    /// Physical gradient from a reference gradient, `J^{-T} g`.
    pub fn grad(&self, g: [f64; 2]) -> [f64; 2] {
        [self.inv[0][0] * g[0] + self.inv[1][0] * g[1], self.inv[0][1] * g[0] + self.inv[1][1] * g[1]]
    }

    /// Physical Hessian `[xx, xy, yy]` from a reference one, `J^{-T} H J^{-1}`.
    pub fn hessian(&self, h: [f64; 3]) -> [f64; 3] {
        let hm = [[h[0], h[1]], [h[1], h[2]]];
        let g = self.inv;
        let entry = |a: usize, b: usize| {
            let mut s = 0.0;
            for c in 0..2 {
                for d in 0..2 {
                    s += g[c][a] * hm[c][d] * g[d][b];
                }
            }
            s
        };
        [entry(0, 0), entry(0, 1), entry(1, 1)]
    }
}

/// Reference coordinates from barycentric ones `(l0, l1, l2)`.
pub fn reference_point(bary: [f64; 3]) -> [f64; 2] {
    [bary[1], bary[2]]
}

/// A Lagrange space on a fixed mesh.
#[derive(Debug, Clone)]
pub struct FeSpace<'a> {
    pub mesh: &'a Triangulation,
    pub dofs: DofMap,
    pub basis: LagrangeBasis,
}

impl<'a> FeSpace<'a> {
    pub fn new(mesh: &'a Triangulation, degree: usize) -> Self {
        Self { mesh, dofs: build_dofmap(mesh, degree), basis: LagrangeBasis::new(degree) }
    }

    pub fn degree(&self) -> usize {
        self.dofs.degree()
    }

    pub fn num_interior(&self) -> usize {
        self.dofs.num_interior()
    }
}
