//! P1, P2 and P3 on the unit square at comparable dof counts.

use afem::driver::{adapt_loop, AdaptConfig};
use afem::problem::builtin;

fn main() -> afem::Result<()> {
    let exact = 2.0 * std::f64::consts::PI.powi(2);
    for degree in 1..=3 {
        let mut cfg = AdaptConfig::new(builtin("square")?.with_degree(degree));
        cfg.stop.max_dofs = Some(3000);
        let log = adapt_loop(&cfg)?;
        let last = log.records.last().unwrap();
        println!(
            "P{degree}: {} iterations, dofs {:>5}, rel err {:.3e}, eta {:.3e}, dist_h1 {:.3e}",
            log.records.len(),
            last.dofs,
            (last.lambda - exact) / exact,
            last.eta,
            last.dist_h1.unwrap()
        );
    }
    Ok(())
}
