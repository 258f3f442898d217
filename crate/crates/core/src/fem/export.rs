//! Coordinate text format for sparse matrices:
//!
//! ```text
//! afem-matrix <n> <nnz>
//! <row> <col> <value>
//! ...
//! ```
//!
//! Indices are zero-based; values use the shortest round-trip decimal form.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;

pub fn write_matrix<W: Write>(m: &CsrMatrix, mut out: W) -> Result<()> {
    writeln!(out, "afem-matrix {} {}", m.n(), m.nnz())?;
    for (i, j, v) in m.triplets() {
        writeln!(out, "{i} {j} {v}")?;
    }
    Ok(())
}

pub fn read_matrix<R: BufRead>(input: R) -> Result<CsrMatrix> {
    let mut lines = input.lines().enumerate();
    let parse_err = |line: usize, msg: &str| Error::Parse { line: line + 1, msg: msg.to_string() };
    let (_, header) = lines.next().ok_or_else(|| parse_err(0, "empty input"))?;
    let header = header?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (n, nnz) = match fields.as_slice() {
        ["afem-matrix", n, nnz] => (
            n.parse::<usize>().map_err(|_| parse_err(0, "bad size"))?,
            nnz.parse::<usize>().map_err(|_| parse_err(0, "bad entry count"))?,
        ),
        _ => return Err(parse_err(0, "expected 'afem-matrix <n> <nnz>'")),
    };
    let mut triplets = Vec::with_capacity(nnz);
    for (no, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(parse_err(no, "expected 'row col value'"));
        }
        let i: usize = f[0].parse().map_err(|_| parse_err(no, "bad row"))?;
        let j: usize = f[1].parse().map_err(|_| parse_err(no, "bad column"))?;
        let v: f64 = f[2].parse().map_err(|_| parse_err(no, "bad value"))?;
        if i >= n || j >= n {
            return Err(parse_err(no, "index out of range"));
        }
        triplets.push((i, j, v));
    }
    if triplets.len() != nnz {
        return Err(parse_err(0, "entry count does not match header"));
    }
    Ok(CsrMatrix::from_triplets(n, &triplets))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{assemble, FeSpace};
    use crate::mesh::unit_square_grid;
    use crate::problem::CoefficientField;

    #[test]
    fn round_trip() {
        let mesh = unit_square_grid(4);
        let space = FeSpace::new(&mesh, 2);
        let forms = assemble(&space, &CoefficientField::laplace(&[0, 1])).unwrap();
        let mut buf = Vec::new();
        write_matrix(&forms.mass, &mut buf).unwrap();
        let back = read_matrix(buf.as_slice()).unwrap();
        assert_eq!(back, forms.mass);
    }
}
