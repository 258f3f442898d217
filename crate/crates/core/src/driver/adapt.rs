use std::time::Instant;

use super::distance::dist_to_eigenspace;
use super::record::IterationRecord;
use crate::eigsolve::{cluster_tags, pick_j, solve_smallest_with, EigenPair, SolverConfig, SpectrumSlice};
use crate::error::{Error, Result};
use crate::estimator::{estimate, EstimatorField};
use crate::fem::{assemble, build_dofmap, FeSpace};
use crate::marking::{mark, MarkConfig};
use crate::mesh::{decompose_sequence, Triangulation};
use crate::problem::{ProblemDef, Reference};

/// Stop rules; the first one to fire ends the run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRules {
    /// Number of refinements; 0 solves on the initial mesh only.
    pub max_iters: Option<usize>,
    /// Stop once the interior dof count reaches this value.
    pub max_dofs: Option<usize>,
    /// Stop once the global estimator is at or below this value.
    pub tol: Option<f64>,
}

impl Default for StopRules {
    fn default() -> Self {
        Self { max_iters: Some(100), max_dofs: Some(50_000), tol: Some(0.0) }
    }
}

#[derive(Debug, Clone)]
pub struct AdaptConfig {
    pub problem: ProblemDef,
    pub marking: MarkConfig,
    pub stop: StopRules,
    /// Settings of the eigensolver, including the seed of its start block.
    pub solver: SolverConfig,
    /// Fill the `wall_ms` column. Off by default so that logs are reproducible.
    pub record_timing: bool,
    /// Keep every mesh of the run and report the sequence decomposition.
    pub keep_history: bool,
}

impl AdaptConfig {
    pub fn new(problem: ProblemDef) -> Self {
        let marking = problem.marking.unwrap_or_default();
        Self {
            problem,
            marking,
            stop: StopRules::default(),
            solver: SolverConfig::default(),
            record_timing: false,
            keep_history: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.problem.validate()?;
        self.marking.validate()?;
        let s = &self.stop;
        if s.max_iters.is_none() && s.max_dofs.is_none() && s.tol.is_none() {
            return Err(Error::Config("at least one stop rule is required".into()));
        }
        if s.tol.is_some_and(|t| !(t >= 0.0)) {
            return Err(Error::Config("estimator tolerance must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    MaxIterations,
    MaxDofs,
    Tolerance,
    /// Every local indicator vanished, so nothing could be marked.
    ZeroEstimator,
}

/// Which known continuous eigenvalue the final discrete one is closest to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reached {
    /// 1-based index into the known spectrum.
    pub index: usize,
    pub value: f64,
    pub matches_target: bool,
}

#[derive(Debug, Clone)]
pub struct RunLog {
    pub problem: String,
    pub degree: usize,
    pub eig_index: usize,
    pub marking: Option<MarkConfig>,
    pub records: Vec<IterationRecord>,
    pub stop: StopReason,
    pub final_mesh: Triangulation,
    pub final_pair: EigenPair,
    pub final_spectrum: SpectrumSlice,
    pub final_estimator: EstimatorField,
    /// Size of the cluster of the tracked eigenvalue when discrete eigenvalues
    /// are grouped within the resolution of the final mesh.
    pub resolved_multiplicity: usize,
    pub reference: Option<Reference>,
    pub reached: Option<Reached>,
    /// Energy distance to the reference eigenspace over the final global estimator.
    pub effectivity: Option<f64>,
    /// Meshes of every iteration when history keeping is on.
    pub history: Vec<Triangulation>,
    /// Sizes `(fine, intermediate, frozen)` per iteration, over the recorded run only.
    pub decomposition: Vec<(usize, usize, usize)>,
}

/// Relative gap within which two discrete eigenvalues cannot be told apart
/// on a mesh whose global estimator is `eta`.
///
/// Eigenvalue errors behave like the squared energy error, which the
/// estimator bounds up to a constant; two discrete approximations of one
/// multiple eigenvalue therefore differ by about `eta^2`.
pub fn resolution_gap(eta: f64, lambda: f64, floor: f64) -> f64 {
    (eta * eta / lambda).max(floor)
}

pub fn adapt_loop(cfg: &AdaptConfig) -> Result<RunLog> {
    run(cfg, false, |_| {})
}

/// As [`adapt_loop`], handing every record to `on_record` as soon as it exists,
/// so callers can persist a partial log when a later iteration fails.
pub fn adapt_loop_with(cfg: &AdaptConfig, on_record: impl FnMut(&IterationRecord)) -> Result<RunLog> {
    run(cfg, false, on_record)
}

/// Same loop with every element refined by one uniform step (two bisections).
pub fn uniform_baseline(cfg: &AdaptConfig) -> Result<RunLog> {
    run(cfg, true, |_| {})
}

pub fn uniform_baseline_with(cfg: &AdaptConfig, on_record: impl FnMut(&IterationRecord)) -> Result<RunLog> {
    run(cfg, true, on_record)
}

struct Step {
    pair: EigenPair,
    slice: SpectrumSlice,
    field: EstimatorField,
    dofs: usize,
    dist_h1: Option<f64>,
    energy: Option<f64>,
}

fn solve_step(cfg: &AdaptConfig, mesh: &Triangulation, reference: Option<&Reference>) -> Result<Step> {
    let p = &cfg.problem;
    let space = FeSpace::new(mesh, p.degree);
    let forms = assemble(&space, &p.coefficients)?;
    let n = forms.dim();
    let m = (p.eig_index + 2).min(n);
    let slice = solve_smallest_with(&forms, m, &cfg.solver)?;
    let pair = pick_j(&slice, p.eig_index)?;
    let field = estimate(&space, &p.coefficients, pair.lambda, &pair.u.coeffs)?;
    let (dist_h1, energy) = match reference.filter(|r| !r.basis.is_empty()) {
        Some(r) => {
            let d = dist_to_eigenspace(&space, &pair.u.coeffs, &r.basis)?;
            (Some(d.h1), Some(d.energy))
        }
        None => (None, None),
    };
    Ok(Step { pair, slice, field, dofs: n, dist_h1, energy })
}

fn run(cfg: &AdaptConfig, uniform: bool, mut on_record: impl FnMut(&IterationRecord)) -> Result<RunLog> {
    cfg.validate()?;
    let p = &cfg.problem;
    let reference = p.reference();
    let mut mesh = p.mesh.clone();
    // the initial space must hold at least j eigenpairs
    while build_dofmap(&mesh, p.degree).num_interior() < p.eig_index {
        mesh = mesh.refine_uniform()?;
    }
    let mut records = Vec::new();
    let mut history = Vec::new();
    for k in 0.. {
        let clock = Instant::now();
        let step =
            solve_step(cfg, &mesh, reference.as_ref()).map_err(|e| Error::Iteration { k, source: Box::new(e) })?;
        let eta = step.field.global;
        let stop = if cfg.stop.max_iters.is_some_and(|m| k >= m) {
            Some(StopReason::MaxIterations)
        } else if cfg.stop.max_dofs.is_some_and(|m| step.dofs >= m) {
            Some(StopReason::MaxDofs)
        } else if cfg.stop.tol.is_some_and(|t| eta <= t) {
            Some(StopReason::Tolerance)
        } else {
            None
        };
        let marked: Vec<usize> = match stop {
            Some(_) => Vec::new(),
            None if uniform => (0..mesh.num_elements()).collect(),
            None => mark(&step.field, &cfg.marking).elements,
        };
        let stop = stop.or(marked.is_empty().then_some(StopReason::ZeroEstimator));
        let record = IterationRecord {
            k,
            nelem: mesh.num_elements(),
            dofs: step.dofs,
            lambda: step.pair.lambda,
            eta,
            eta_max: step.field.max(),
            marked: marked.len(),
            hmax: mesh.meshsize_max(),
            dist_h1: step.dist_h1,
            lambda_err: reference.as_ref().map(|r| (step.pair.lambda - r.eigenvalue).abs()),
            wall_ms: cfg.record_timing.then(|| clock.elapsed().as_secs_f64() * 1e3),
        };
        on_record(&record);
        records.push(record);
        if let Some(stop) = stop {
            if cfg.keep_history {
                history.push(mesh.clone());
            }
            return Ok(finish(cfg, uniform, records, stop, mesh, step, reference, history));
        }
        let next = if uniform { mesh.refine_uniform() } else { mesh.refine(&marked) };
        let next = next.map_err(|e| Error::Iteration { k, source: Box::new(e) })?;
        if cfg.keep_history {
            history.push(std::mem::replace(&mut mesh, next));
        } else {
            mesh = next;
        }
    }
    unreachable!("the loop only exits through a stop rule")
}

#[allow(clippy::too_many_arguments)]
fn finish(
    cfg: &AdaptConfig,
    uniform: bool,
    records: Vec<IterationRecord>,
    stop: StopReason,
    mesh: Triangulation,
    step: Step,
    reference: Option<Reference>,
    history: Vec<Triangulation>,
) -> RunLog {
    let p = &cfg.problem;
    let j = p.eig_index;
    let eta = step.field.global;
    let tags = cluster_tags(&step.slice.values, resolution_gap(eta, step.pair.lambda, cfg.solver.cluster_tol));
    let resolved_multiplicity = tags.iter().filter(|&&t| t == tags[j - 1]).count();
    let reached = reference.as_ref().and_then(|r| {
        r.closest_index(step.pair.lambda).map(|index| {
            let value = r.spectrum[index - 1];
            Reached { index, value, matches_target: (value - r.eigenvalue).abs() <= 1e-12 * r.eigenvalue }
        })
    });
    let effectivity = step.energy.filter(|_| eta > 0.0).map(|d| d / eta);
    let decomposition = if history.len() > 1 {
        decompose_sequence(&history).map(|parts| parts.iter().map(|s| s.sizes()).collect()).unwrap_or_default()
    } else {
        Vec::new()
    };
    RunLog {
        problem: p.name.clone(),
        degree: p.degree,
        eig_index: j,
        marking: (!uniform).then_some(cfg.marking),
        records,
        stop,
        final_mesh: mesh,
        final_pair: step.pair,
        final_spectrum: step.slice,
        final_estimator: step.field,
        resolved_multiplicity,
        reference,
        reached,
        effectivity,
        history,
        decomposition,
    }
}
