//! Assemble stiffness and mass matrices and export them as triplet text files
//! for use in other tools.

use std::fs::File;
use std::io::BufWriter;

use afem::fem::{assemble, write_matrix, FeSpace};
use afem::problem::builtin;

fn main() -> afem::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "matrices".into());
    std::fs::create_dir_all(&dir)?;
    let problem = builtin("interface")?;
    let mesh = problem.mesh.refine_uniform()?.refine_uniform()?;
    let space = FeSpace::new(&mesh, 2);
    let forms = assemble(&space, &problem.coefficients)?;
    write_matrix(&forms.stiffness, BufWriter::new(File::create(format!("{dir}/stiffness.txt"))?))?;
    write_matrix(&forms.mass, BufWriter::new(File::create(format!("{dir}/mass.txt"))?))?;
    println!(
        "n = {}, nnz(K) = {}, nnz(M) = {}, written to {dir}/",
        forms.dim(),
        forms.stiffness.nnz(),
        forms.mass.nnz()
    );
    Ok(())
}
