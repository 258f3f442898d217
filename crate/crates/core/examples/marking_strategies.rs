//! The three marking strategies on one estimator field, and how they steer a
//! short adaptive run on the L-shape.

use afem::driver::{adapt_loop, AdaptConfig, StopRules};
use afem::eigsolve::{pick_j, solve_smallest};
use afem::estimator::estimate;
use afem::fem::{assemble, FeSpace};
use afem::marking::{mark, validate_marking, MarkConfig, Strategy};
use afem::problem::builtin;

fn main() -> afem::Result<()> {
    let problem = builtin("lshape")?;
    let mesh = problem.mesh.refine_uniform()?;
    let space = FeSpace::new(&mesh, 1);
    let forms = assemble(&space, &problem.coefficients)?;
    let pair = pick_j(&solve_smallest(&forms, 1)?, 1)?;
    let field = estimate(&space, &problem.coefficients, pair.lambda, &pair.u.coeffs)?;
    println!("{} elements, eta {:.4e}", mesh.num_elements(), field.global);

    let strategies = [Strategy::Maximum, Strategy::Doerfler, Strategy::Equidistribution];
    for s in strategies {
        let m = mark(&field, &MarkConfig::new(s, 0.5)?);
        let report = validate_marking(&field.values(), &m.elements)?;
        println!(
            "{s:?}: {} marked, {:.1}% of eta^2, worst unmarked ratio {:.3}",
            m.elements.len(),
            100.0 * m.fraction,
            report.worst_ratio
        );
    }
    for s in strategies {
        let mut cfg = AdaptConfig::new(problem.clone());
        cfg.marking = MarkConfig::new(s, 0.5)?;
        cfg.stop = StopRules { max_iters: Some(100), max_dofs: Some(5000), tol: None };
        let log = adapt_loop(&cfg)?;
        let last = log.records.last().unwrap();
        println!(
            "{s:?}: {} iterations to {} dofs, lambda error {:.3e}",
            log.records.len(),
            last.dofs,
            last.lambda_err.unwrap()
        );
    }
    Ok(())
}
