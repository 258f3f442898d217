//! Conforming triangulations of polygonal domains.
//!
//! Elements store their vertices counterclockwise. Local edge `e` is the edge
//! opposite local vertex `e`, i.e. it joins vertices `(e + 1) % 3` and
//! `(e + 2) % 3`. The refinement edge of an element is such a local edge index.

mod builders;
mod history;
mod io;
mod refine;

pub use builders::{lshape_grid, unit_square_grid, unit_square_pair};
pub use history::{ancestor_map, decompose_sequence, SequencePartition, N_D};
pub use io::{read_mesh, write_mesh};

use std::collections::HashMap;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub vertices: [usize; 3],
    pub refinement_edge: u8,
    pub region: u32,
    /// Number of bisections separating this element from its initial ancestor.
    pub generation: u32,
}

impl Element {
    /// Global vertex ids of local edge `e`.
    pub fn edge(&self, e: usize) -> [usize; 2] {
        [self.vertices[(e + 1) % 3], self.vertices[(e + 2) % 3]]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Side {
    /// Endpoints, sorted ascending.
    pub vertices: [usize; 2],
    pub elements: [usize; 2],
    /// `(element, local edge)` pairs; the second is absent on the boundary.
    pub local: [(usize, u8); 2],
    pub boundary: bool,
}

impl Side {
    pub fn adjacent(&self) -> &[usize] {
        if self.boundary {
            &self.elements[..1]
        } else {
            &self.elements[..]
        }
    }
}

#[derive(Debug, Clone)]
pub struct Triangulation {
    vertices: Vec<Point>,
    elements: Vec<Element>,
    sides: Vec<Side>,
    element_sides: Vec<[usize; 3]>,
    vertex_elements: Vec<Vec<usize>>,
    boundary_vertex: Vec<bool>,
    level: usize,
    origin: Option<Vec<usize>>,
}

/// Equality of geometry and tags; refinement history (generations, parent
/// links) is not compared.
impl PartialEq for Triangulation {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.elements.len() == other.elements.len()
            && self.elements.iter().zip(&other.elements).all(|(a, b)| {
                a.vertices == b.vertices && a.refinement_edge == b.refinement_edge && a.region == b.region
            })
    }
}

fn signed_area(p: &[Point; 3]) -> f64 {
    0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
}

fn dist2(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// Longest local edge, ties resolved to the lowest local index.
fn longest_edge(p: &[Point; 3]) -> u8 {
    let len: [f64; 3] = std::array::from_fn(|e| dist2(p[(e + 1) % 3], p[(e + 2) % 3]));
    let max = len.iter().cloned().fold(0.0, f64::max);
    (0..3).find(|&e| len[e] >= max * (1.0 - 1e-12)).unwrap() as u8
}

impl Triangulation {
    /// Builds a triangulation from raw arrays. Clockwise triangles are reoriented;
    /// refinement edges are set to the longest edge of each element.
    pub fn from_arrays(coords: &[Point], triangles: &[[usize; 3]], regions: &[u32]) -> Result<Self> {
        let mut tagged = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            check_ids(coords.len(), t, tri)?;
            let p = tri.map(|v| coords[v]);
            tagged.push((*tri, longest_edge(&p)));
        }
        Self::from_tagged(coords, &tagged, regions)
    }

    /// Builds a triangulation with explicit refinement-edge tags.
    pub fn from_tagged(coords: &[Point], triangles: &[([usize; 3], u8)], regions: &[u32]) -> Result<Self> {
        if regions.len() != triangles.len() {
            return Err(Error::InvalidMesh(format!("{} region ids for {} triangles", regions.len(), triangles.len())));
        }
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("no triangles".into()));
        }
        if let Some(v) = coords.iter().position(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::InvalidMesh(format!("vertex {v} has non-finite coordinates")));
        }
        let scale = bounding_scale(coords);
        let mut elements = Vec::with_capacity(triangles.len());
        for (t, (tri, refedge)) in triangles.iter().enumerate() {
            check_ids(coords.len(), t, tri)?;
            if *refedge > 2 {
                return Err(Error::InvalidMesh(format!("element {t} has refinement edge {refedge}")));
            }
            let mut vertices = *tri;
            let mut refinement_edge = *refedge;
            let area = signed_area(&vertices.map(|v| coords[v]));
            if area.abs() <= 1e-14 * scale * scale
                || vertices[0] == vertices[1]
                || vertices[1] == vertices[2]
                || vertices[0] == vertices[2]
            {
                return Err(Error::Degenerate(t));
            }
            if area < 0.0 {
                vertices.swap(1, 2);
                refinement_edge = match refinement_edge {
                    1 => 2,
                    2 => 1,
                    e => e,
                };
            }
            elements.push(Element { vertices, refinement_edge, region: regions[t], generation: 0 });
        }
        let tri = Self::assemble(coords.to_vec(), elements, 0, None)?;
        tri.check_no_hanging_vertices()?;
        Ok(tri)
    }

    /// Builds adjacency for a vertex/element list that is already known to be valid.
    fn assemble(
        vertices: Vec<Point>,
        elements: Vec<Element>,
        level: usize,
        origin: Option<Vec<usize>>,
    ) -> Result<Self> {
        let mut side_index: HashMap<(usize, usize), usize> = HashMap::with_capacity(elements.len() * 2);
        let mut sides: Vec<Side> = Vec::with_capacity(elements.len() * 2);
        let mut element_sides = Vec::with_capacity(elements.len());
        for (t, el) in elements.iter().enumerate() {
            let mut ids = [0usize; 3];
            for (e, id) in ids.iter_mut().enumerate() {
                let [a, b] = el.edge(e);
                let key = (a.min(b), a.max(b));
                match side_index.get(&key) {
                    Some(&s) => {
                        let side = &mut sides[s];
                        if !side.boundary {
                            return Err(Error::InvalidMesh(format!(
                                "side ({}, {}) shared by more than two elements",
                                key.0, key.1
                            )));
                        }
                        let (t0, e0) = side.local[0];
                        let [a0, b0] = elements[t0].edge(e0 as usize);
                        if a0 == a && b0 == b {
                            return Err(Error::InvalidMesh(format!("elements {t0} and {t} overlap")));
                        }
                        side.elements[1] = t;
                        side.local[1] = (t, e as u8);
                        side.boundary = false;
                        *id = s;
                    }
                    None => {
                        side_index.insert(key, sides.len());
                        *id = sides.len();
                        sides.push(Side {
                            vertices: [key.0, key.1],
                            elements: [t, t],
                            local: [(t, e as u8), (t, e as u8)],
                            boundary: true,
                        });
                    }
                }
            }
            element_sides.push(ids);
        }
        let mut vertex_elements = vec![Vec::new(); vertices.len()];
        for (t, el) in elements.iter().enumerate() {
            for &v in &el.vertices {
                vertex_elements[v].push(t);
            }
        }
        if let Some(v) = vertex_elements.iter().position(|l| l.is_empty()) {
            return Err(Error::InvalidMesh(format!("vertex {v} belongs to no element")));
        }
        let mut boundary_vertex = vec![false; vertices.len()];
        for s in sides.iter().filter(|s| s.boundary) {
            boundary_vertex[s.vertices[0]] = true;
            boundary_vertex[s.vertices[1]] = true;
        }
        Ok(Self { vertices, elements, sides, element_sides, vertex_elements, boundary_vertex, level, origin })
    }

    /// Rejects vertices lying in the relative interior of a boundary side.
    /// In a conforming mesh every such side lies on the domain boundary.
    fn check_no_hanging_vertices(&self) -> Result<()> {
        let bsides: Vec<&Side> = self.sides.iter().filter(|s| s.boundary).collect();
        if bsides.is_empty() {
            return Ok(());
        }
        let mean_len = bsides
            .iter()
            .map(|s| dist2(self.vertices[s.vertices[0]], self.vertices[s.vertices[1]]).sqrt())
            .sum::<f64>()
            / bsides.len() as f64;
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in &self.vertices {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let cell = mean_len.max(1e-300);
        let nx = (((hi[0] - lo[0]) / cell).floor() as usize + 1).min(4096);
        let ny = (((hi[1] - lo[1]) / cell).floor() as usize + 1).min(4096);
        let cx = (hi[0] - lo[0]).max(1e-300) / nx as f64;
        let cy = (hi[1] - lo[1]).max(1e-300) / ny as f64;
        let bin = |p: Point| {
            let i = (((p[0] - lo[0]) / cx) as usize).min(nx - 1);
            let j = (((p[1] - lo[1]) / cy) as usize).min(ny - 1);
            (i, j)
        };
        let mut grid: Vec<Vec<usize>> = vec![Vec::new(); nx * ny];
        for (k, s) in bsides.iter().enumerate() {
            let (a, b) = (self.vertices[s.vertices[0]], self.vertices[s.vertices[1]]);
            let (i0, j0) = bin([a[0].min(b[0]), a[1].min(b[1])]);
            let (i1, j1) = bin([a[0].max(b[0]), a[1].max(b[1])]);
            for i in i0..=i1 {
                for j in j0..=j1 {
                    grid[j * nx + i].push(k);
                }
            }
        }
        for (v, &p) in self.vertices.iter().enumerate() {
            let (i, j) = bin(p);
            for &k in &grid[j * nx + i] {
                let s = bsides[k];
                if s.vertices.contains(&v) {
                    continue;
                }
                let (a, b) = (self.vertices[s.vertices[0]], self.vertices[s.vertices[1]]);
                let ab = [b[0] - a[0], b[1] - a[1]];
                let ap = [p[0] - a[0], p[1] - a[1]];
                let len2 = ab[0] * ab[0] + ab[1] * ab[1];
                let cross = ab[0] * ap[1] - ab[1] * ap[0];
                let dot = ab[0] * ap[0] + ab[1] * ap[1];
                if cross.abs() <= 1e-12 * len2 && dot > 1e-12 * len2 && dot < len2 * (1.0 - 1e-12) {
                    return Err(Error::NonConforming { vertex: v, a: s.vertices[0], b: s.vertices[1] });
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, t: usize) -> &Element {
        &self.elements[t]
    }

    pub fn sides(&self) -> &[Side] {
        &self.sides
    }

    /// Side ids of the three local edges of `t`.
    pub fn element_sides(&self, t: usize) -> [usize; 3] {
        self.element_sides[t]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn num_interior_sides(&self) -> usize {
        self.sides.iter().filter(|s| !s.boundary).count()
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    /// Number of refinement steps since the initial mesh.
    pub fn level(&self) -> usize {
        self.level
    }

    /// For each element, the id of the element of the predecessor mesh it came
    /// from (itself if untouched). `None` for an initial mesh.
    pub fn origin(&self) -> Option<&[usize]> {
        self.origin.as_deref()
    }

    pub fn element_coords(&self, t: usize) -> [Point; 3] {
        self.elements[t].vertices.map(|v| self.vertices[v])
    }

    pub fn area(&self, t: usize) -> f64 {
        signed_area(&self.element_coords(t))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_elements()).map(|t| self.area(t)).sum()
    }

    /// Local meshsize `h_T = |T|^{1/2}`.
    pub fn meshsize(&self, t: usize) -> f64 {
        self.area(t).sqrt()
    }

    pub fn meshsize_max(&self) -> f64 {
        (0..self.num_elements()).map(|t| self.meshsize(t)).fold(0.0, f64::max)
    }

    pub fn diameter(&self, t: usize) -> f64 {
        let p = self.element_coords(t);
        (0..3).map(|e| dist2(p[(e + 1) % 3], p[(e + 2) % 3])).fold(0.0, f64::max).sqrt()
    }

    /// Inradius `2|T| / perimeter`.
    pub fn inradius(&self, t: usize) -> f64 {
        let p = self.element_coords(t);
        let perimeter: f64 = (0..3).map(|e| dist2(p[(e + 1) % 3], p[(e + 2) % 3]).sqrt()).sum();
        2.0 * self.area(t) / perimeter
    }

    /// Shape regularity `diam(T) / ρ_T` of a single element.
    pub fn element_regularity(&self, t: usize) -> f64 {
        self.diameter(t) / self.inradius(t)
    }

    /// Mesh regularity, the maximum over elements of `diam(T) / ρ_T`.
    pub fn regularity(&self) -> f64 {
        (0..self.num_elements()).map(|t| self.element_regularity(t)).fold(0.0, f64::max)
    }

    /// Interior angles of `t`, indexed by local vertex.
    pub fn angles(&self, t: usize) -> [f64; 3] {
        let p = self.element_coords(t);
        std::array::from_fn(|i| {
            let (a, b, c) = (p[i], p[(i + 1) % 3], p[(i + 2) % 3]);
            let u = [b[0] - a[0], b[1] - a[1]];
            let v = [c[0] - a[0], c[1] - a[1]];
            (u[0] * v[1] - u[1] * v[0]).atan2(u[0] * v[0] + u[1] * v[1])
        })
    }

    pub fn min_angle(&self) -> f64 {
        (0..self.num_elements()).flat_map(|t| self.angles(t)).fold(f64::INFINITY, f64::min)
    }

    /// Elements sharing at least a vertex with `t`, including `t`, ascending.
    pub fn neighbors(&self, t: usize) -> Vec<usize> {
        let mut out: Vec<usize> =
            self.elements[t].vertices.iter().flat_map(|&v| self.vertex_elements[v].iter().copied()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Elements adjacent to vertex `v`.
    pub fn vertex_elements(&self, v: usize) -> &[usize] {
        &self.vertex_elements[v]
    }

    /// Outward unit normal of local edge `e` of element `t` and the edge length.
    pub fn edge_normal(&self, t: usize, e: usize) -> (Point, f64) {
        let p = self.element_coords(t);
        let (a, b) = (p[(e + 1) % 3], p[(e + 2) % 3]);
        let d = [b[0] - a[0], b[1] - a[1]];
        let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
        // counterclockwise ordering puts the interior on the left of a -> b
        ([d[1] / len, -d[0] / len], len)
    }

    /// Sanity audit of conformity and adjacency; used by tests and debug checks.
    pub fn audit(&self) -> Result<()> {
        for (s, side) in self.sides.iter().enumerate() {
            for &(t, e) in side.local.iter().take(if side.boundary { 1 } else { 2 }) {
                if self.element_sides[t][e as usize] != s {
                    return Err(Error::InvalidMesh(format!("side {s} adjacency inconsistent")));
                }
            }
        }
        for t in 0..self.num_elements() {
            if self.area(t) <= 0.0 {
                return Err(Error::Degenerate(t));
            }
        }
        self.check_no_hanging_vertices()
    }
}

fn check_ids(nv: usize, t: usize, tri: &[usize; 3]) -> Result<()> {
    if let Some(v) = tri.iter().find(|&&v| v >= nv) {
        return Err(Error::InvalidMesh(format!("element {t} references missing vertex {v}")));
    }
    Ok(())
}

fn bounding_scale(coords: &[Point]) -> f64 {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in coords {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE)
}
