//! Newest-vertex bisection with conformity closure.

use std::collections::HashMap;

use super::{Element, Point, Triangulation};
use crate::error::{Error, Result};

/// Work item during bisection: vertices rotated so the refinement edge is
/// local edge 0, plus whether that edge must be split.
struct Pending {
    vertices: [usize; 3],
    split: bool,
    generation: u32,
}

impl Triangulation {
    /// Bisects every marked element at least once and closes the result to a
    /// conforming mesh by newest-vertex bisection.
    ///
    /// Each bisection halves an element through the midpoint of its refinement
    /// edge; the midpoint becomes local vertex 0 of both children and the
    /// edge opposite it becomes their refinement edge.
    pub fn refine(&self, marked: &[usize]) -> Result<Triangulation> {
        if let Some(&t) = marked.iter().find(|&&t| t >= self.num_elements()) {
            return Err(Error::InvalidMesh(format!("marked element {t} does not exist")));
        }
        let split_side = self.closure(marked)?;

        let mut vertices: Vec<Point> = self.vertices.clone();
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut elements = Vec::with_capacity(self.num_elements() + 2 * marked.len());
        let mut origin = Vec::with_capacity(elements.capacity());
        let mut stack: Vec<Pending> = Vec::new();

        for (t, el) in self.elements.iter().enumerate() {
            let sides = self.element_sides[t];
            if !sides.iter().any(|&s| split_side[s]) {
                elements.push(el.clone());
                origin.push(t);
                continue;
            }
            let r = el.refinement_edge as usize;
            // rotated so the refinement edge is local edge 0
            let rotated = [el.vertices[r], el.vertices[(r + 1) % 3], el.vertices[(r + 2) % 3]];
            let marks = [split_side[sides[r]], split_side[sides[(r + 1) % 3]], split_side[sides[(r + 2) % 3]]];
            debug_assert!(marks[0], "closure must split the refinement edge");
            // marks of the two non-refinement edges travel with the children
            let (mark_opp_b, mark_opp_c) = (marks[1], marks[2]);
            let [a, b, c] = rotated;
            let m = midpoint(&mut vertices, &mut midpoints, b, c);
            let generation = el.generation + 1;
            // depth-first so that children of one parent stay contiguous
            stack.push(Pending { vertices: [m, c, a], split: mark_opp_b, generation });
            stack.push(Pending { vertices: [m, a, b], split: mark_opp_c, generation });
            while let Some(p) = stack.pop() {
                if p.split {
                    let [a, b, c] = p.vertices;
                    let m = midpoint(&mut vertices, &mut midpoints, b, c);
                    let generation = p.generation + 1;
                    // the halves of a split edge and the new interior edge are never split here
                    stack.push(Pending { vertices: [m, c, a], split: false, generation });
                    stack.push(Pending { vertices: [m, a, b], split: false, generation });
                } else {
                    elements.push(Element {
                        vertices: p.vertices,
                        refinement_edge: 0,
                        region: el.region,
                        generation: p.generation,
                    });
                    origin.push(t);
                }
            }
        }
        Triangulation::assemble(vertices, elements, self.level + 1, Some(origin))
    }

    /// Marks the sides to split: the refinement edges of marked elements, and
    /// recursively the refinement edge of any element with a split side.
    fn closure(&self, marked: &[usize]) -> Result<Vec<bool>> {
        let mut split = vec![false; self.sides.len()];
        let mut work: Vec<usize> = marked.to_vec();
        let limit = 10 * self.num_elements() + marked.len();
        let mut steps = 0usize;
        while let Some(t) = work.pop() {
            steps += 1;
            if steps > limit {
                return Err(Error::ClosureOverflow(limit));
            }
            let s = self.element_sides[t][self.elements[t].refinement_edge as usize];
            if split[s] {
                continue;
            }
            split[s] = true;
            for &nb in self.sides[s].adjacent() {
                if nb != t {
                    work.push(nb);
                }
            }
        }
        Ok(split)
    }

    /// Applies `n` rounds of bisection to `elems` and all their descendants, so
    /// each of them ends up at least `n` generations deeper. Origins of the result
    /// refer to this mesh.
    pub fn refine_times(&self, elems: &[usize], n: usize) -> Result<Triangulation> {
        if n == 0 {
            return Err(Error::InvalidMesh("refine_times needs n >= 1".into()));
        }
        let mut selected = vec![false; self.num_elements()];
        for &t in elems {
            if t >= self.num_elements() {
                return Err(Error::InvalidMesh(format!("element {t} does not exist")));
            }
            selected[t] = true;
        }
        let mut current = self.clone();
        let mut ancestor: Vec<usize> = (0..self.num_elements()).collect();
        for round in 1..=n {
            let marked: Vec<usize> = (0..current.num_elements())
                .filter(|&t| {
                    let a = ancestor[t];
                    selected[a] && (current.elements[t].generation - self.elements[a].generation) < round as u32
                })
                .collect();
            let next = current.refine(&marked)?;
            ancestor = next.origin().unwrap().iter().map(|&o| ancestor[o]).collect();
            current = next;
        }
        current.level = self.level + 1;
        current.origin = Some(ancestor);
        Ok(current)
    }

    /// One uniform refinement: every element bisected twice, halving `h`.
    pub fn refine_uniform(&self) -> Result<Triangulation> {
        let all: Vec<usize> = (0..self.num_elements()).collect();
        self.refine_times(&all, 2)
    }
}

fn midpoint(vertices: &mut Vec<Point>, cache: &mut HashMap<(usize, usize), usize>, a: usize, b: usize) -> usize {
    let key = (a.min(b), a.max(b));
    *cache.entry(key).or_insert_with(|| {
        let (p, q) = (vertices[key.0], vertices[key.1]);
        vertices.push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
        vertices.len() - 1
    })
}

#[cfg(test)]
mod tests {
    use super::super::{unit_square_grid, unit_square_pair};
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn both_diagonal_elements() {
        let tri = unit_square_pair();
        let fine = tri.refine(&[0, 1]).unwrap();
        assert_eq!(fine.num_elements(), 4);
        assert_eq!(fine.num_vertices(), 5);
        assert_eq!(fine.vertices()[4], [0.5, 0.5]);
        fine.audit().unwrap();
    }

    #[test]
    fn closure_bisects_neighbor() {
        let tri = unit_square_pair();
        let fine = tri.refine(&[0]).unwrap();
        assert_eq!(fine.num_elements(), 4);
        fine.audit().unwrap();
    }

    #[test]
    fn children_halve_parent() {
        let tri = unit_square_grid(3);
        let fine = tri.refine(&[4]).unwrap();
        fine.audit().unwrap();
        let origin = fine.origin().unwrap();
        for t in 0..fine.num_elements() {
            let parent = origin[t];
            let depth = fine.element(t).generation - tri.element(parent).generation;
            assert_relative_eq!(fine.area(t), tri.area(parent) / 2f64.powi(depth as i32), max_relative = 1e-14);
        }
        assert_relative_eq!(fine.total_area(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn empty_mark_copies() {
        let tri = unit_square_grid(2);
        let same = tri.refine(&[]).unwrap();
        assert_eq!(same, tri);
    }

    #[test]
    fn three_rounds_on_single_triangle() {
        let tri = Triangulation::from_arrays(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], &[[0, 1, 2]], &[0]).unwrap();
        let fine = tri.refine_times(&[0], 3).unwrap();
        assert_eq!(fine.num_elements(), 8);
        let c = tri.element_coords(0);
        let bary = |p: Point| {
            let det = (c[1][0] - c[0][0]) * (c[2][1] - c[0][1]) - (c[2][0] - c[0][0]) * (c[1][1] - c[0][1]);
            let l1 = ((p[0] - c[0][0]) * (c[2][1] - c[0][1]) - (c[2][0] - c[0][0]) * (p[1] - c[0][1])) / det;
            let l2 = ((c[1][0] - c[0][0]) * (p[1] - c[0][1]) - (p[0] - c[0][0]) * (c[1][1] - c[0][1])) / det;
            [1.0 - l1 - l2, l1, l2]
        };
        let new: Vec<[f64; 3]> = fine.vertices()[3..].iter().map(|&p| bary(p)).collect();
        assert!(new.iter().any(|l| l.iter().all(|&x| x > 1e-12)), "interior vertex");
        for e in 0..3 {
            assert!(
                new.iter().any(|l| l[e].abs() < 1e-14 && l.iter().filter(|&&x| x > 1e-12).count() == 2),
                "side {e}"
            );
        }
    }

    #[test]
    fn one_round_equals_refine() {
        let tri = unit_square_grid(3);
        let a = tri.refine_times(&[2, 7], 1).unwrap();
        let b = tri.refine(&[2, 7]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn marked_elements_have_two_descendants() {
        let tri = unit_square_grid(4);
        let marked = [0, 5, 17, 30];
        let fine = tri.refine(&marked).unwrap();
        let origin = fine.origin().unwrap();
        for &m in &marked {
            assert!(origin.iter().filter(|&&o| o == m).count() >= 2);
        }
    }
}
