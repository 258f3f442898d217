//! Plain-text mesh format.
//!
//! ```text
//! afem-mesh 1
//! V <n>
//! x y            (n lines)
//! E <m>
//! v0 v1 v2 region refedge   (m lines)
//! ETA <m>        (optional)
//! value          (m lines)
//! ```
//!
//! Coordinates are written in shortest round-trip form, so decimal input
//! survives a read/write cycle bit for bit.

use std::io::{BufRead, Write};

use super::{Point, Triangulation};
use crate::error::{Error, Result};

const HEADER: &str = "afem-mesh 1";

pub fn write_mesh<W: Write>(tri: &Triangulation, eta: Option<&[f64]>, mut out: W) -> Result<()> {
    writeln!(out, "{HEADER}")?;
    writeln!(out, "V {}", tri.num_vertices())?;
    for p in tri.vertices() {
        writeln!(out, "{} {}", p[0], p[1])?;
    }
    writeln!(out, "E {}", tri.num_elements())?;
    for el in tri.elements() {
        let [a, b, c] = el.vertices;
        writeln!(out, "{a} {b} {c} {} {}", el.region, el.refinement_edge)?;
    }
    if let Some(eta) = eta {
        if eta.len() != tri.num_elements() {
            return Err(Error::InvalidMesh(format!(
                "{} estimator values for {} elements",
                eta.len(),
                tri.num_elements()
            )));
        }
        writeln!(out, "ETA {}", eta.len())?;
        for v in eta {
            writeln!(out, "{v}")?;
        }
    }
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn next_line(&mut self) -> Result<Option<String>> {
        for l in self.inner.by_ref() {
            self.line += 1;
            let l = l?;
            let t = l.trim();
            if !t.is_empty() {
                return Ok(Some(t.to_string()));
            }
        }
        Ok(None)
    }

    fn expect_line(&mut self, what: &str) -> Result<String> {
        self.next_line()?.ok_or_else(|| self.err(format!("unexpected end of file, expected {what}")))
    }

    fn err(&self, msg: String) -> Error {
        Error::Parse { line: self.line, msg }
    }

    fn count(&mut self, tag: &str) -> Result<usize> {
        let l = self.expect_line(tag)?;
        self.parse_count(&l, tag)
    }

    fn parse_count(&self, l: &str, tag: &str) -> Result<usize> {
        let mut it = l.split_whitespace();
        if it.next() != Some(tag) {
            return Err(self.err(format!("expected '{tag} <count>', found '{l}'")));
        }
        it.next().and_then(|n| n.parse().ok()).ok_or_else(|| self.err(format!("bad count in '{l}'")))
    }

    fn fields<T: std::str::FromStr>(&mut self, n: usize, what: &str) -> Result<Vec<T>> {
        let l = self.expect_line(what)?;
        let vals: Vec<T> = l
            .split_whitespace()
            .map(|s| s.parse::<T>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| self.err(format!("malformed {what}: '{l}'")))?;
        if vals.len() != n {
            return Err(self.err(format!("expected {n} fields in {what}, found {}", vals.len())));
        }
        Ok(vals)
    }
}

/// Reads a mesh and, when present, its per-element estimator block.
pub fn read_mesh<R: BufRead>(input: R) -> Result<(Triangulation, Option<Vec<f64>>)> {
    let mut lines = Lines { inner: input.lines(), line: 0 };
    let header = lines.expect_line("header")?;
    if header != HEADER {
        return Err(lines.err(format!("expected '{HEADER}', found '{header}'")));
    }
    let nv = lines.count("V")?;
    let mut coords: Vec<Point> = Vec::with_capacity(nv);
    for _ in 0..nv {
        let v = lines.fields::<f64>(2, "vertex")?;
        coords.push([v[0], v[1]]);
    }
    let ne = lines.count("E")?;
    let mut tris = Vec::with_capacity(ne);
    let mut regions = Vec::with_capacity(ne);
    for _ in 0..ne {
        let v = lines.fields::<usize>(5, "element")?;
        if v[4] > 2 {
            return Err(lines.err(format!("refinement edge {} out of range", v[4])));
        }
        tris.push(([v[0], v[1], v[2]], v[4] as u8));
        regions.push(u32::try_from(v[3]).map_err(|_| lines.err("region id too large".into()))?);
    }
    let mut eta = None;
    if let Some(l) = lines.next_line()? {
        let m = lines.parse_count(&l, "ETA")?;
        if m != ne {
            return Err(lines.err(format!("ETA block has {m} entries for {ne} elements")));
        }
        let mut vals = Vec::with_capacity(m);
        for _ in 0..m {
            vals.push(lines.fields::<f64>(1, "estimator")?[0]);
        }
        eta = Some(vals);
    }
    let tri = Triangulation::from_tagged(&coords, &tris, &regions)?;
    Ok((tri, eta))
}

#[cfg(test)]
mod tests {
    use super::super::lshape_grid;
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let tri = lshape_grid(2).refine(&[3, 8]).unwrap();
        let eta: Vec<f64> = (0..tri.num_elements()).map(|t| 0.1 * t as f64 + 1e-17).collect();
        let mut buf = Vec::new();
        write_mesh(&tri, Some(&eta), &mut buf).unwrap();
        let (back, eta_back) = read_mesh(&buf[..]).unwrap();
        assert_eq!(back, tri);
        assert_eq!(eta_back.unwrap(), eta);
        let mut again = Vec::new();
        write_mesh(&back, Some(&eta), &mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn decimal_input_survives() {
        let text = "afem-mesh 1\nV 3\n0.1 0.2\n1.2345678901234567 0.3\n0.3 0.9\nE 1\n0 1 2 4 1\n";
        let (tri, eta) = read_mesh(text.as_bytes()).unwrap();
        assert!(eta.is_none());
        assert_eq!(tri.vertices()[1][0], 1.2345678901234567);
        let mut buf = Vec::new();
        write_mesh(&tri, None, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), text);
    }

    #[test]
    fn bad_header() {
        let err = read_mesh("afem-mesh 2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }
}
