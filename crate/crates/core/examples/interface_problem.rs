//! Discontinuous diffusion: A = alpha I left of x = 1/2 and I on the right.
//! Refinement concentrates along the interface corners as alpha grows.

use afem::driver::{adapt_loop, AdaptConfig};
use afem::problem::interface;

fn main() -> afem::Result<()> {
    for alpha in [1.0, 10.0, 100.0] {
        let mut cfg = AdaptConfig::new(interface(alpha));
        cfg.stop.max_dofs = Some(4000);
        let log = adapt_loop(&cfg)?;
        let mesh = &log.final_mesh;
        let on_interface = (0..mesh.num_elements())
            .filter(|&t| mesh.element_coords(t).iter().any(|p| (p[0] - 0.5).abs() < 1e-12))
            .count();
        let last = log.records.last().unwrap();
        println!(
            "alpha {alpha:>5}: lambda {:.8}, dofs {}, eta {:.3e}, {on_interface} of {} elements touch x = 1/2",
            last.lambda,
            last.dofs,
            last.eta,
            mesh.num_elements()
        );
    }
    Ok(())
}
