//! Retrospective classification of elements across a recorded refinement run.

use super::Triangulation;
use crate::error::{Error, Result};

/// Bisection count after which an element has new nodes on every side and in
/// its interior (two dimensions).
pub const N_D: u32 = 3;

/// Partition of one mesh of a run. Computed over the finite recorded run, so
/// "never refined" means "not refined before the run stopped".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SequencePartition {
    /// Elements whose every neighbor is refined at least `N_D` times later on.
    pub fine: Vec<usize>,
    /// Elements whose every neighbor is never refined again.
    pub frozen: Vec<usize>,
    /// The rest.
    pub intermediate: Vec<usize>,
}

impl SequencePartition {
    pub fn sizes(&self) -> (usize, usize, usize) {
        (self.fine.len(), self.intermediate.len(), self.frozen.len())
    }
}

/// Maps every element of `history[last]` to its ancestor in `history[k]`, for all k.
pub fn ancestor_map(history: &[Triangulation]) -> Result<Vec<Vec<usize>>> {
    check_nested(history)?;
    let last = history.len() - 1;
    let mut maps = vec![Vec::new(); history.len()];
    maps[last] = (0..history[last].num_elements()).collect();
    for k in (0..last).rev() {
        let origin = history[k + 1].origin().expect("checked");
        maps[k] = maps[k + 1].iter().map(|&e| origin[e]).collect();
    }
    Ok(maps)
}

/// Splits each mesh of a nested sequence into fine / intermediate / frozen parts.
pub fn decompose_sequence(history: &[Triangulation]) -> Result<Vec<SequencePartition>> {
    let maps = ancestor_map(history)?;
    let last = &history[history.len() - 1];
    let mut out = Vec::with_capacity(history.len());
    for (k, tri) in history.iter().enumerate() {
        let mut min_depth = vec![u32::MAX; tri.num_elements()];
        let mut max_depth = vec![0u32; tri.num_elements()];
        for (e, &a) in maps[k].iter().enumerate() {
            let d = last.element(e).generation - tri.element(a).generation;
            min_depth[a] = min_depth[a].min(d);
            max_depth[a] = max_depth[a].max(d);
        }
        let mut part = SequencePartition::default();
        for t in 0..tri.num_elements() {
            let nb = tri.neighbors(t);
            if nb.iter().all(|&s| max_depth[s] == 0) {
                part.frozen.push(t);
            } else if nb.iter().all(|&s| min_depth[s] >= N_D) {
                part.fine.push(t);
            } else {
                part.intermediate.push(t);
            }
        }
        out.push(part);
    }
    Ok(out)
}

fn check_nested(history: &[Triangulation]) -> Result<()> {
    if history.is_empty() {
        return Err(Error::NotNested("empty history".into()));
    }
    for k in 0..history.len() - 1 {
        let (coarse, fine) = (&history[k], &history[k + 1]);
        let origin = fine.origin().ok_or_else(|| Error::NotNested(format!("mesh {} has no parent links", k + 1)))?;
        if origin.len() != fine.num_elements() {
            return Err(Error::NotNested(format!("mesh {} parent links have wrong length", k + 1)));
        }
        if fine.num_vertices() < coarse.num_vertices() || fine.vertices()[..coarse.num_vertices()] != *coarse.vertices()
        {
            return Err(Error::NotNested(format!("mesh {} does not extend the vertices of mesh {k}", k + 1)));
        }
        let mut area = vec![0.0; coarse.num_elements()];
        for (e, &o) in origin.iter().enumerate() {
            if o >= coarse.num_elements() || fine.element(e).generation < coarse.element(o).generation {
                return Err(Error::NotNested(format!("element {e} of mesh {} has an invalid parent", k + 1)));
            }
            area[o] += fine.area(e);
        }
        for (t, a) in area.iter().enumerate() {
            if (a - coarse.area(t)).abs() > 1e-12 * coarse.area(t) {
                return Err(Error::NotNested(format!("children of element {t} in mesh {k} do not tile it")));
            }
        }
    }
    Ok(())
}
