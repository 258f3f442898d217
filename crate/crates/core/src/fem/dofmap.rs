use crate::mesh::{Point, Triangulation};

use super::basis::reference_nodes;
use super::ElementMap;

/// Global numbering of Lagrange nodes: vertices first, then `degree - 1`
/// nodes per side ordered by side id, then element interiors by element id.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    degree: usize,
    local_len: usize,
    local_to_global: Vec<usize>,
    boundary: Vec<bool>,
    /// Global id to interior index, `usize::MAX` on the boundary.
    interior_of: Vec<usize>,
    interior: Vec<usize>,
    points: Vec<Point>,
}

pub fn build_dofmap(tri: &Triangulation, degree: usize) -> DofMap {
    assert!((1..=3).contains(&degree), "degree {degree} not supported");
    let nv = tri.num_vertices();
    let ns = tri.sides().len();
    let per_side = degree - 1;
    let per_elem = usize::from(degree == 3);
    let local_len = (degree + 1) * (degree + 2) / 2;
    let num_dofs = nv + ns * per_side + tri.num_elements() * per_elem;

    let mut boundary = vec![false; num_dofs];
    let mut points = vec![[0.0; 2]; num_dofs];
    for v in 0..nv {
        boundary[v] = tri.is_boundary_vertex(v);
    }
    for (s, side) in tri.sides().iter().enumerate() {
        for k in 0..per_side {
            boundary[nv + s * per_side + k] = side.boundary;
        }
    }

    let ref_nodes = reference_nodes(degree);
    let mut local_to_global = Vec::with_capacity(tri.num_elements() * local_len);
    for (t, el) in tri.elements().iter().enumerate() {
        let sides = tri.element_sides(t);
        let map = ElementMap::of(tri, t);
        let row_start = local_to_global.len();
        local_to_global.extend_from_slice(&el.vertices);
        for e in 0..3 {
            let side = &tri.sides()[sides[e]];
            let forward = el.vertices[(e + 1) % 3] == side.vertices[0];
            for k in 0..per_side {
                let gk = if forward { k } else { per_side - 1 - k };
                local_to_global.push(nv + sides[e] * per_side + gk);
            }
        }
        for k in 0..per_elem {
            local_to_global.push(nv + ns * per_side + t * per_elem + k);
        }
        for (i, &g) in local_to_global[row_start..].iter().enumerate() {
            points[g] = map.map(ref_nodes[i]);
        }
    }

    let mut interior_of = vec![usize::MAX; num_dofs];
    let mut interior = Vec::new();
    for g in 0..num_dofs {
        if !boundary[g] {
            interior_of[g] = interior.len();
            interior.push(g);
        }
    }
    DofMap { degree, local_len, local_to_global, boundary, interior_of, interior, points }
}

impl DofMap {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_dofs(&self) -> usize {
        self.boundary.len()
    }

    pub fn num_interior(&self) -> usize {
        self.interior.len()
    }

    /// Local dofs per element.
    pub fn local_len(&self) -> usize {
        self.local_len
    }

    /// Global ids of the local dofs of element `t`.
    pub fn element_dofs(&self, t: usize) -> &[usize] {
        &self.local_to_global[t * self.local_len..(t + 1) * self.local_len]
    }

    pub fn is_boundary(&self, g: usize) -> bool {
        self.boundary[g]
    }

    pub fn interior_index(&self, g: usize) -> Option<usize> {
        let i = self.interior_of[g];
        (i != usize::MAX).then_some(i)
    }

    /// Global ids of the interior dofs, in interior order.
    pub fn interior_dofs(&self) -> &[usize] {
        &self.interior
    }

    /// Nodal point of a global dof.
    pub fn point(&self, g: usize) -> Point {
        self.points[g]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{unit_square_grid, unit_square_pair};

    #[test]
    fn counts() {
        let pair = unit_square_pair();
        let d = build_dofmap(&pair, 1);
        assert_eq!((d.num_dofs(), d.num_interior()), (4, 0));
        let g = build_dofmap(&unit_square_grid(2), 1);
        assert_eq!((g.num_dofs(), g.num_interior()), (9, 1));
        let q = build_dofmap(&pair, 2);
        assert_eq!((q.num_dofs(), q.num_interior()), (9, 1));
        assert_eq!(q.point(q.interior_dofs()[0]), [0.5, 0.5]);
    }

    #[test]
    fn shared_nodes_coincide() {
        let mesh = unit_square_grid(3).refine(&[0, 5]).unwrap();
        for degree in 1..=3 {
            let d = build_dofmap(&mesh, degree);
            let ref_nodes = reference_nodes(degree);
            for t in 0..mesh.num_elements() {
                let map = ElementMap::of(&mesh, t);
                for (i, &g) in d.element_dofs(t).iter().enumerate() {
                    let p = map.map(ref_nodes[i]);
                    let q = d.point(g);
                    assert!((p[0] - q[0]).abs() < 1e-14 && (p[1] - q[1]).abs() < 1e-14);
                }
            }
            // boundary dofs are exactly those on the boundary of the unit square
            for g in 0..d.num_dofs() {
                let p = d.point(g);
                let on = p.iter().any(|&c| c.abs() < 1e-14 || (c - 1.0).abs() < 1e-14);
                assert_eq!(on, d.is_boundary(g));
            }
        }
    }
}
