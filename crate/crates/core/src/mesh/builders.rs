use super::{Point, Triangulation};

/// The unit square split along the diagonal from (0,0) to (1,1).
pub fn unit_square_pair() -> Triangulation {
    let coords = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    Triangulation::from_arrays(&coords, &[[0, 1, 2], [0, 2, 3]], &[0, 0]).expect("static mesh")
}

/// Uniform `n x n` grid on the unit square, each cell cut by its
/// (x,y) -> (x+h,y+h) diagonal. Region 0 for cells left of x = 1/2, 1 otherwise.
pub fn unit_square_grid(n: usize) -> Triangulation {
    grid(n, [0.0, 0.0], 1.0, |_, _| true, |cx, _| if cx < 0.5 { 0 } else { 1 })
}

/// The L-shaped domain (-1,1)^2 minus [0,1) x (-1,0], meshed with `2n x 2n`
/// cells of size `1/n` (lower-right quadrant removed).
pub fn lshape_grid(n: usize) -> Triangulation {
    grid(2 * n, [-1.0, -1.0], 2.0, |cx, cy| !(cx > 0.0 && cy < 0.0), |_, _| 0)
}

fn grid(
    n: usize,
    origin: Point,
    length: f64,
    keep: impl Fn(f64, f64) -> bool,
    region: impl Fn(f64, f64) -> u32,
) -> Triangulation {
    assert!(n >= 1);
    let h = length / n as f64;
    let coord = |i: usize| if i == n { length } else { i as f64 * h };
    let mut index = vec![usize::MAX; (n + 1) * (n + 1)];
    let mut coords = Vec::new();
    let mut tris = Vec::new();
    let mut regions = Vec::new();
    let mut vid = |i: usize, j: usize, coords: &mut Vec<Point>| {
        let k = j * (n + 1) + i;
        if index[k] == usize::MAX {
            index[k] = coords.len();
            coords.push([origin[0] + coord(i), origin[1] + coord(j)]);
        }
        index[k]
    };
    for j in 0..n {
        for i in 0..n {
            let cx = origin[0] + (i as f64 + 0.5) * h;
            let cy = origin[1] + (j as f64 + 0.5) * h;
            if !keep(cx, cy) {
                continue;
            }
            let a = vid(i, j, &mut coords);
            let b = vid(i + 1, j, &mut coords);
            let c = vid(i + 1, j + 1, &mut coords);
            let d = vid(i, j + 1, &mut coords);
            tris.push([a, b, c]);
            tris.push([a, c, d]);
            let r = region(cx, cy);
            regions.extend([r, r]);
        }
    }
    Triangulation::from_arrays(&coords, &tris, &regions).expect("grid mesh is valid")
}
