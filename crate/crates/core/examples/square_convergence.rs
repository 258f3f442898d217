//! Adaptive P1 run on the unit square, first eigenvalue, Doerfler marking.
//!
//! Prints the iteration table and the fitted decay of the global estimator.

use afem::driver::{adapt_loop, AdaptConfig};
use afem::marking::{MarkConfig, Strategy};
use afem::problem::builtin;

fn main() -> afem::Result<()> {
    let mut cfg = AdaptConfig::new(builtin("square")?);
    cfg.marking = MarkConfig::new(Strategy::Doerfler, 0.5)?;
    cfg.stop.max_dofs = Some(5000);
    let log = adapt_loop(&cfg)?;

    println!("{:>3} {:>7} {:>6} {:>16} {:>12} {:>12}", "k", "elems", "dofs", "lambda", "eta", "dist_h1");
    for r in &log.records {
        println!(
            "{:>3} {:>7} {:>6} {:>16.10} {:>12.4e} {:>12.4e}",
            r.k,
            r.nelem,
            r.dofs,
            r.lambda,
            r.eta,
            r.dist_h1.unwrap_or(f64::NAN)
        );
    }
    let exact = 2.0 * std::f64::consts::PI.powi(2);
    let last = log.records.last().unwrap();
    println!("relative error {:.3e}", (last.lambda - exact) / exact);

    // least-squares slope of log eta against log N over the last decade of dofs
    let top = last.dofs as f64;
    let pts: Vec<(f64, f64)> = log
        .records
        .iter()
        .filter(|r| r.dofs as f64 >= top / 10.0)
        .map(|r| ((r.dofs as f64).ln(), r.eta.ln()))
        .collect();
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (sxx, sxy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 * p.0, a.1 + p.0 * p.1));
    println!("estimator slope {:.3}", (n * sxy - sx * sy) / (n * sxx - sx * sx));
    if let Some(e) = log.effectivity {
        println!("effectivity {e:.3}");
    }
    Ok(())
}
