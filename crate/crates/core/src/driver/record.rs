use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const LOG_HEADER: &str = "k,nelem,dofs,lambda,eta,eta_max,marked,hmax,dist_h1,lambda_err,wall_ms";

/// One row of `log.csv`. Diagnostics that are not available stay empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub nelem: usize,
    /// Interior degrees of freedom.
    pub dofs: usize,
    pub lambda: f64,
    pub eta: f64,
    pub eta_max: f64,
    pub marked: usize,
    pub hmax: f64,
    pub dist_h1: Option<f64>,
    /// `|lambda - lambda_ref|`.
    pub lambda_err: Option<f64>,
    pub wall_ms: Option<f64>,
}

pub fn write_log<W: Write>(records: &[IterationRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record(LOG_HEADER.split(','))?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_log<R: Read>(input: R) -> Result<Vec<IterationRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for rec in r.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}
