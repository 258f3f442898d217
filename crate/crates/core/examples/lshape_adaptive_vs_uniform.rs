//! Adaptive against uniform refinement on the L-shaped domain, where the
//! re-entrant corner limits uniform meshes to a reduced rate.
//!
//! `cargo run --release --example lshape_adaptive_vs_uniform -- 20000`

use afem::driver::{adapt_loop, uniform_baseline, AdaptConfig, StopRules};
use afem::problem::builtin;

fn main() -> afem::Result<()> {
    let max_dofs: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(20_000);
    let mut cfg = AdaptConfig::new(builtin("lshape")?);
    cfg.stop = StopRules { max_iters: Some(200), max_dofs: Some(max_dofs), tol: None };
    let adaptive = adapt_loop(&cfg)?;
    let uniform = uniform_baseline(&cfg)?;

    println!("uniform");
    for r in &uniform.records {
        println!("  dofs {:>7}  lambda {:.10}  err {:.3e}", r.dofs, r.lambda, r.lambda_err.unwrap());
    }
    println!("adaptive (every 5th step)");
    for r in adaptive.records.iter().step_by(5).chain(adaptive.records.last()) {
        println!("  dofs {:>7}  lambda {:.10}  err {:.3e}  eta {:.3e}", r.dofs, r.lambda, r.lambda_err.unwrap(), r.eta);
    }
    let mesh = &adaptive.final_mesh;
    let near_corner =
        (0..mesh.num_elements()).filter(|&t| mesh.element_coords(t).iter().any(|p| p[0].hypot(p[1]) < 1e-2)).count();
    println!(
        "final adaptive mesh: {} elements, {near_corner} touch the disc of radius 0.01 at the corner",
        mesh.num_elements()
    );
    Ok(())
}
