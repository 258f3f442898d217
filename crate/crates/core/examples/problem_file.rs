//! A problem defined in TOML: variable diffusion on the L-shape.
//!
//! Pass a file path to run your own; otherwise an inline definition is used.

use std::path::Path;

use afem::driver::{adapt_loop, format_summary, AdaptConfig};
use afem::problem::{load_problem, parse_problem};

const INLINE: &str = r#"
name = "lshape-graded"
mesh = "builtin:lshape"
degree = 2
eig_index = 1

[marking]
strategy = "doerfler"
theta = 0.4

[bounds]
a = [1.0, 3.0]
b = [1.0, 1.0]

[[region]]
id = 0
a11 = [[0, 0, 2.0], [1, 0, 1.0]]
a12 = []
a22 = [[0, 0, 2.0], [0, 1, 1.0]]
b = [[0, 0, 1.0]]
"#;

fn main() -> afem::Result<()> {
    let problem = match std::env::args().nth(1) {
        Some(path) => load_problem(Path::new(&path))?,
        None => parse_problem(INLINE, Path::new("."))?,
    };
    let mut cfg = AdaptConfig::new(problem);
    cfg.stop.max_dofs = Some(4000);
    let log = adapt_loop(&cfg)?;
    print!("{}", format_summary(&log));
    Ok(())
}
