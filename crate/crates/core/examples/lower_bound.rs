//! Local lower-bound diagnostics: for the largest indicators of each adaptive
//! level, the ratio of the indicator to the locally computable upper bound.
//! Each benchmark is examined from its initial mesh and from a start mesh
//! refined uniformly twice.

use afem::driver::{verify_lower_bound, LowerBoundConfig};
use afem::problem::builtin;

fn main() -> afem::Result<()> {
    for name in ["square", "interface", "lshape"] {
        for pre in [0, 2] {
            let mut problem = builtin(name)?;
            for _ in 0..pre {
                problem.mesh = problem.mesh.refine_uniform()?;
            }
            let report = verify_lower_bound(&LowerBoundConfig::new(problem))?;
            println!("{name}, {pre} uniform refinements first");
            for l in &report.levels {
                println!(
                    "  level {} dofs {:>5}  ratio [{:.4}, {:.4}]  osc ratio max {:.4}",
                    l.level,
                    l.dofs,
                    l.min_ratio(),
                    l.max_ratio(),
                    l.max_osc_ratio()
                );
            }
            println!("  growth {:.3}  osc growth {:.3}", report.max_growth(), report.osc_growth());
        }
    }
    Ok(())
}
