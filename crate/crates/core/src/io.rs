//! CSV and JSON writers for paths, pmf tables, ruin surfaces and reports.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! values always produce identical bytes.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::ruin::{GCurve, RuinEstimate};
use crate::time_change::PmfValue;
use crate::validate::ValidationReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// One step-function path sampled at its own time points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathRecord {
    pub path_id: usize,
    pub t: Vec<f64>,
    pub value: Vec<f64>,
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// `t,value,path_id`
pub fn write_paths_csv<W: Write>(mut out: W, paths: &[PathRecord]) -> Result<()> {
    writeln!(out, "t,value,path_id")?;
    for p in paths {
        for (t, v) in p.t.iter().zip(&p.value) {
            writeln!(out, "{t},{v},{}", p.path_id)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PmfTable {
    pub t: f64,
    pub rows: Vec<PmfValue>,
    pub total: f64,
}

impl PmfTable {
    pub fn new(t: f64, rows: Vec<PmfValue>) -> Self {
        let total = rows.iter().map(|r| r.value()).sum();
        Self { t, rows, total }
    }
}

/// `n,pmf,stderr` rows followed by a `total` row. The stderr column is empty
/// for deterministic methods.
pub fn write_pmf_csv<W: Write>(mut out: W, table: &PmfTable) -> Result<()> {
    writeln!(out, "n,pmf,stderr")?;
    for (n, row) in table.rows.iter().enumerate() {
        match row {
            PmfValue::Exact { value, .. } => writeln!(out, "{n},{value},")?,
            PmfValue::Estimate(e) => writeln!(out, "{n},{},{}", e.value, e.stderr)?,
        }
    }
    writeln!(out, "total,{},", table.total)?;
    Ok(())
}

/// `u,y,G,stderr` for a Monte Carlo surface. Rows with `y = inf` carry `ψ(u)`.
pub fn write_ruin_csv<W: Write>(mut out: W, est: &RuinEstimate) -> Result<()> {
    writeln!(out, "u,y,G,stderr")?;
    for (i, u) in est.u_grid.iter().enumerate() {
        for (j, y) in est.y_grid.iter().enumerate() {
            let g = est.g[i][j];
            writeln!(out, "{u},{y},{},{}", g.value, g.stderr)?;
        }
        if est.y_grid.last().is_none_or(|y| y.is_finite()) {
            writeln!(out, "{u},inf,{},{}", est.psi[i].value, est.psi[i].stderr)?;
        }
    }
    Ok(())
}

/// `u,y,G,stderr` for solver curves; the stderr column holds the Richardson
/// error estimate.
pub fn write_curves_csv<W: Write>(mut out: W, curves: &[GCurve]) -> Result<()> {
    writeln!(out, "u,y,G,stderr")?;
    for c in curves {
        for (u, g) in c.u.iter().zip(&c.g) {
            writeln!(out, "{u},{},{g},{}", c.y, c.richardson_error)?;
        }
    }
    Ok(())
}

/// `suite,name,statistic,threshold,comparison,passed,mandatory,provenance`
pub fn write_report_csv<W: Write>(mut out: W, report: &ValidationReport) -> Result<()> {
    writeln!(out, "suite,name,statistic,threshold,comparison,passed,mandatory,provenance")?;
    for c in &report.checks {
        let comparison = match c.comparison {
            crate::validate::Comparison::AtMost => "<=",
            crate::validate::Comparison::AtLeast => ">=",
        };
        writeln!(
            out,
            "{},\"{}\",{},{},{comparison},{},{},{}",
            c.suite,
            c.name.replace('"', "\"\""),
            c.statistic,
            c.threshold,
            c.passed,
            c.mandatory,
            c.provenance
        )?;
    }
    Ok(())
}
