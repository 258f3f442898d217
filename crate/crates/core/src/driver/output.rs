use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use super::adapt::{RunLog, StopReason};
use super::record::write_log;
use crate::error::Result;
use crate::mesh::write_mesh;

/// Writes `log.csv`, `mesh.txt` (final mesh with its indicators) and `summary.txt`.
pub fn write_outputs(log: &RunLog, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_log(&log.records, BufWriter::new(File::create(dir.join("log.csv"))?))?;
    write_final(log, dir)
}

/// Writes `mesh.txt` and `summary.txt` only.
pub fn write_final(log: &RunLog, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_mesh(
        &log.final_mesh,
        Some(&log.final_estimator.values()),
        BufWriter::new(File::create(dir.join("mesh.txt"))?),
    )?;
    fs::write(dir.join("summary.txt"), format_summary(log))?;
    Ok(())
}

pub fn format_summary(log: &RunLog) -> String {
    let mut s = String::new();
    let last = log.records.last().expect("a run has at least one record");
    let _ = writeln!(s, "problem            {}", log.problem);
    let _ = writeln!(s, "degree             {}", log.degree);
    let _ = writeln!(s, "eigenvalue index   {}", log.eig_index);
    match &log.marking {
        Some(m) => {
            let _ = writeln!(s, "marking            {:?} theta={}", m.strategy, m.theta);
        }
        None => {
            let _ = writeln!(s, "marking            uniform refinement");
        }
    }
    let reason = match log.stop {
        StopReason::MaxIterations => "iteration limit",
        StopReason::MaxDofs => "dof limit",
        StopReason::Tolerance => "estimator tolerance",
        StopReason::ZeroEstimator => "estimator vanished",
    };
    let _ = writeln!(s, "stopped by         {reason}");
    let _ = writeln!(s, "iterations         {}", log.records.len());
    let _ = writeln!(s, "elements           {}", last.nelem);
    let _ = writeln!(s, "dofs               {}", last.dofs);
    let _ = writeln!(s, "lambda             {:.12}", last.lambda);
    let _ = writeln!(s, "eta                {:.6e}", last.eta);
    let _ = writeln!(s, "hmax               {:.6e}", last.hmax);
    let _ = writeln!(s, "solver residual    {:.3e}", log.final_pair.residual_norm);
    let spectrum: Vec<String> = log.final_spectrum.values.iter().map(|v| format!("{v:.10}")).collect();
    let _ = writeln!(s, "computed spectrum  {}", spectrum.join(" "));
    let _ = writeln!(s, "cluster size       {} (relative gap 1e-6)", log.final_pair.multiplicity);
    let _ = writeln!(s, "resolved cluster   {} (gap within eta^2 / lambda)", log.resolved_multiplicity);
    if let Some(r) = &log.reference {
        let _ = writeln!(s, "reference lambda   {:.12}", r.eigenvalue);
        let _ = writeln!(
            s,
            "lambda error       {:.6e} (relative {:.3e})",
            last.lambda - r.eigenvalue,
            (last.lambda - r.eigenvalue) / r.eigenvalue
        );
    }
    if let Some(r) = &log.reached {
        let note = if r.matches_target { "the requested index" } else { "NOT the requested index" };
        let _ = writeln!(s, "closest known      lambda_{} = {:.10} ({note})", r.index, r.value);
    }
    if let Some(d) = last.dist_h1 {
        let _ = writeln!(s, "H1 distance        {d:.6e}");
    }
    if let Some(e) = log.effectivity {
        let _ = writeln!(s, "effectivity        {e:.4} (energy error / eta)");
    }
    if !log.decomposition.is_empty() {
        let _ = writeln!(s, "sequence split     k: fine / intermediate / frozen (recorded run only)");
        for (k, (a, b, c)) in log.decomposition.iter().enumerate() {
            let _ = writeln!(s, "                   {k}: {a} / {b} / {c}");
        }
    }
    s
}
