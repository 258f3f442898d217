use crate::eigsolve::{pick_j, solve_smallest_with, SolverConfig};
use crate::error::{Error, Result};
use crate::estimator::estimate;
use crate::fem::{assemble, build_dofmap, AssembledForms, FeSpace};
use crate::marking::{mark, MarkConfig};
use crate::mesh::{Triangulation, N_D};
use crate::problem::ProblemDef;

#[derive(Debug, Clone)]
pub struct LowerBoundConfig {
    pub problem: ProblemDef,
    pub marking: MarkConfig,
    /// Number of adaptive levels examined.
    pub levels: usize,
    /// Elements with the largest indicators examined per level.
    pub top: usize,
    /// Refine the whole mesh `N_D` times instead of only the patch.
    pub global: bool,
    pub solver: SolverConfig,
}

impl LowerBoundConfig {
    pub fn new(problem: ProblemDef) -> Self {
        let marking = problem.marking.unwrap_or_default();
        Self { problem, marking, levels: 4, top: 10, global: false, solver: SolverConfig::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementRatio {
    pub element: usize,
    pub eta: f64,
    /// `||grad(w - u)||_w + h_T ||mu w||_w + h_T (1 + lambda) ||u||_{H1(w)}` over the patch `w`.
    pub rhs: f64,
    /// `eta / rhs`.
    pub ratio: f64,
    /// Patch oscillation over `h_T (2 + lambda) ||u||_{H1(w)}`.
    pub osc_ratio: f64,
    /// Eigenvalue on the refined mesh.
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelReport {
    pub level: usize,
    pub dofs: usize,
    pub lambda: f64,
    pub elements: Vec<ElementRatio>,
}

impl LevelReport {
    pub fn max_ratio(&self) -> f64 {
        self.elements.iter().map(|e| e.ratio).fold(0.0, f64::max)
    }

    pub fn min_ratio(&self) -> f64 {
        self.elements.iter().map(|e| e.ratio).fold(f64::INFINITY, f64::min)
    }

    pub fn max_osc_ratio(&self) -> f64 {
        self.elements.iter().map(|e| e.osc_ratio).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundReport {
    pub levels: Vec<LevelReport>,
}

impl LowerBoundReport {
    /// Largest factor by which the maximal ratio grows from one level to the next.
    pub fn max_growth(&self) -> f64 {
        self.levels.windows(2).map(|w| w[1].max_ratio() / w[0].max_ratio()).fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.levels
            .iter()
            .flat_map(|l| &l.elements)
            .all(|e| e.ratio.is_finite() && e.ratio > 0.0 && e.osc_ratio.is_finite())
    }

    /// Largest oscillation ratio over all levels relative to the one of level 0.
    pub fn osc_growth(&self) -> f64 {
        let base = self.levels.first().map_or(0.0, |l| l.max_osc_ratio());
        self.levels.iter().map(|l| l.max_osc_ratio()).fold(0.0, f64::max) / base
    }
}

/// Eigenpair `j` of a mesh.
fn solve_on(p: &ProblemDef, space: &FeSpace, solver: &SolverConfig) -> Result<(AssembledForms, f64, Vec<f64>)> {
    let forms = assemble(space, &p.coefficients)?;
    let slice = solve_smallest_with(&forms, p.eig_index.min(forms.dim()), solver)?;
    let pair = pick_j(&slice, p.eig_index)?;
    Ok((forms, pair.lambda, pair.u.coeffs))
}

/// Compares the local indicators of the largest-indicator elements with the
/// discrete quantities bounding them from above, over several adaptive levels.
///
/// For each element `T` the patch of `T` is bisected `N_D` times, the
/// eigenproblem is solved there for `(mu, w)` and `w` is given the sign that
/// aligns it with `u`.
pub fn verify_lower_bound(cfg: &LowerBoundConfig) -> Result<LowerBoundReport> {
    let p = &cfg.problem;
    p.validate()?;
    cfg.marking.validate()?;
    let mut mesh = p.mesh.clone();
    while build_dofmap(&mesh, p.degree).num_interior() < p.eig_index {
        mesh = mesh.refine_uniform()?;
    }
    let mut levels = Vec::new();
    for level in 0..cfg.levels {
        let wrap = |e: Error| Error::Iteration { k: level, source: Box::new(e) };
        let space = FeSpace::new(&mesh, p.degree);
        let (_, lambda, u) = solve_on(p, &space, &cfg.solver).map_err(wrap)?;
        let field = estimate(&space, &p.coefficients, lambda, &u).map_err(wrap)?;
        let coarse_norms = space.element_sq_norms(&u);
        let global_fine = if cfg.global {
            Some(mesh.refine_times(&(0..mesh.num_elements()).collect::<Vec<_>>(), N_D as usize).map_err(wrap)?)
        } else {
            None
        };
        let mut elements = Vec::new();
        for &t in field.ranking().iter().take(cfg.top) {
            let patch = mesh.neighbors(t);
            let fine: Triangulation = match &global_fine {
                Some(f) => f.clone(),
                None => mesh.refine_times(&patch, N_D as usize).map_err(wrap)?,
            };
            let origin = fine.origin().expect("refined meshes record their origin").to_vec();
            let fs = FeSpace::new(&fine, p.degree);
            let (forms, mu, mut w) = solve_on(p, &fs, &cfg.solver).map_err(wrap)?;
            let up = space.prolong(&fs, &origin, &u).coeffs;
            if forms.mass.bilinear_form(&w, &up) < 0.0 {
                w.iter_mut().for_each(|x| *x = -*x);
            }
            let diff: Vec<f64> = w.iter().zip(&up).map(|(a, b)| a - b).collect();
            let in_patch = |f: usize| patch.binary_search(&origin[f]).is_ok();
            let diff_norms = fs.element_sq_norms(&diff);
            let w_norms = fs.element_sq_norms(&w);
            let grad_diff: f64 = (0..fine.num_elements()).filter(|&f| in_patch(f)).map(|f| diff_norms[f].1).sum();
            let w_l2: f64 = (0..fine.num_elements()).filter(|&f| in_patch(f)).map(|f| w_norms[f].0).sum();
            let u_h1: f64 = patch.iter().map(|&s| coarse_norms[s].0 + coarse_norms[s].1).sum::<f64>().sqrt();
            let h = mesh.meshsize(t);
            let rhs = grad_diff.sqrt() + h * mu * w_l2.sqrt() + h * (1.0 + lambda) * u_h1;
            let osc: f64 = patch
                .iter()
                .map(|&s| field.locals[s].osc_residual.powi(2) + field.locals[s].osc_jump.powi(2))
                .sum::<f64>()
                .sqrt();
            let eta = field.locals[t].eta;
            elements.push(ElementRatio {
                element: t,
                eta,
                rhs,
                ratio: eta / rhs,
                osc_ratio: osc / (h * (2.0 + lambda) * u_h1),
                mu,
            });
        }
        levels.push(LevelReport { level, dofs: space.num_interior(), lambda, elements });
        if level + 1 < cfg.levels {
            let marked = mark(&field, &cfg.marking).elements;
            mesh = mesh.refine(&marked).map_err(wrap)?;
        }
    }
    Ok(LowerBoundReport { levels })
}
