//! Cross-check of the first Dirichlet eigenvalue of the L-shaped domain.
//!
//! Solves on a ladder of uniformly refined meshes with cubic elements and
//! extrapolates every window of four levels with the error expansion
//! `c1 h^{4/3} + c2 h^2 + c3 h^{8/3}` of the re-entrant corner, then compares
//! with `afem::problem::LSHAPE_LAMBDA1`.
//!
//! `cargo run --release --example lshape_reference -- 6` takes about 20 s.

use afem::eigsolve::{solve_smallest, SpectrumSlice};
use afem::fem::{assemble, FeSpace};
use afem::problem::{builtin, extrapolate_known_rate, LSHAPE_LAMBDA1};

fn main() -> afem::Result<()> {
    let levels: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(5);
    let problem = builtin("lshape")?;
    let mut mesh = problem.mesh.clone();
    let (mut h, mut values) = (Vec::new(), Vec::new());
    for level in 0..levels {
        let space = FeSpace::new(&mesh, 3);
        let forms = assemble(&space, &problem.coefficients)?;
        let slice: SpectrumSlice = solve_smallest(&forms, 1)?;
        println!(
            "level {level}  h {:.6}  dofs {:>7}  lambda {:.13}",
            mesh.meshsize_max(),
            forms.dim(),
            slice.values[0]
        );
        h.push(mesh.meshsize_max());
        values.push(slice.values[0]);
        mesh = mesh.refine_uniform()?;
    }
    let exponents = [4.0 / 3.0, 2.0, 8.0 / 3.0];
    for start in 0..h.len().saturating_sub(exponents.len()) {
        let end = start + exponents.len() + 1;
        let limit = extrapolate_known_rate(&h[start..end], &values[start..end], &exponents);
        println!("levels {start}..{}  extrapolated {limit:.13}  diff {:+.2e}", end - 1, limit - LSHAPE_LAMBDA1);
    }
    println!("stored value           {LSHAPE_LAMBDA1:.13}");
    Ok(())
}
