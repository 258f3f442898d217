//! Newest-vertex bisection with closure: refine towards a corner, check
//! conformity and shape regularity, and write the result in the mesh format.

use afem::mesh::{decompose_sequence, unit_square_pair, write_mesh};

fn main() -> afem::Result<()> {
    let mut history = vec![unit_square_pair()];
    for _ in 0..12 {
        let mesh = history.last().unwrap();
        // mark everything touching the origin
        let marked: Vec<usize> = (0..mesh.num_elements())
            .filter(|&t| mesh.element_coords(t).iter().any(|p| p[0] == 0.0 && p[1] == 0.0))
            .collect();
        let next = mesh.refine(&marked)?;
        next.audit()?;
        println!(
            "marked {:>2}  elements {:>4}  min angle {:.2} deg  regularity {:.3}",
            marked.len(),
            next.num_elements(),
            next.min_angle().to_degrees(),
            next.regularity()
        );
        history.push(next);
    }
    for (k, part) in decompose_sequence(&history)?.iter().enumerate().step_by(3) {
        let (fine, intermediate, frozen) = part.sizes();
        println!("step {k}: fine {fine}, intermediate {intermediate}, frozen {frozen}");
    }
    let mut out = Vec::new();
    write_mesh(history.last().unwrap(), None, &mut out)?;
    println!("{} bytes in the mesh format, first line {:?}", out.len(), String::from_utf8_lossy(&out).lines().next());
    Ok(())
}
