//! Tracking the double eigenvalue 5 pi^2 of the unit square.
//!
//! On adaptive meshes the two discrete approximations split slightly; the
//! summary reports both the strict cluster tag and the size of the cluster
//! within the resolution of the final mesh.

use afem::driver::{adapt_loop, format_summary, AdaptConfig};
use afem::problem::builtin;

fn main() -> afem::Result<()> {
    let mut cfg = AdaptConfig::new(builtin("square")?.with_eig_index(2));
    cfg.stop.max_dofs = Some(10_000);
    let log = adapt_loop(&cfg)?;
    for r in log.records.iter().step_by(4) {
        println!(
            "k {:>3}  dofs {:>6}  lambda {:.8}  dist_h1 {:.3e}",
            r.k,
            r.dofs,
            r.lambda,
            r.dist_h1.unwrap_or(f64::NAN)
        );
    }
    let s = &log.final_spectrum;
    println!("lambda_2 - lambda_3 relative gap {:.3e}", (s.values[2] - s.values[1]) / s.values[1]);
    print!("{}", format_summary(&log));
    Ok(())
}
