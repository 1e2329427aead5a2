//! CSV serialization. Data files carry 17 significant digits; convergence
//! tables carry 4, like the published tables.

use std::fs;
use std::path::Path;

use relaxcouple_core::diagnostics::ErrorSeries;
use relaxcouple_core::psystem::PSystemModel;
use relaxcouple_core::scheme::{Grid, GridState};

use crate::error::{Result, RunError};

pub fn fmt_data(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_table(x: f64) -> String {
    format!("{x:.3e}")
}

fn fmt_eoc(x: Option<f64>) -> String {
    match x {
        None => String::new(),
        Some(v) if v.is_infinite() => "inf".to_string(),
        Some(v) => format!("{v:.3}"),
    }
}

/// Writes through a temporary sibling file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e))?;
    }
    let tmp = path.with_extension("csv.tmp");
    fs::write(&tmp, contents).map_err(|e| RunError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| RunError::io(path, e))
}

/// Columns `x, rho, momentum, pressure` at cell centres.
pub fn snapshot_csv(grid: &Grid, state: &GridState, model: &PSystemModel) -> String {
    let mut out = String::from("x,rho,momentum,pressure\n");
    for k in 0..grid.n_cells() {
        let u = state.u(k);
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_data(grid.center(k)),
            fmt_data(u[0]),
            fmt_data(u[1]),
            fmt_data(model.pressure(u[0]))
        ));
    }
    out
}

pub fn errors_csv(series: &ErrorSeries) -> String {
    let mut out = String::from("t,e1,e2\n");
    for k in 0..series.len() {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_data(series.times[k]),
            fmt_data(series.e1[k]),
            fmt_data(series.e2[k])
        ));
    }
    out
}

/// One mesh of a convergence sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub cells: usize,
    pub l1_e1: f64,
    /// Order against the previous (coarser) row.
    pub eoc_e1: Option<f64>,
    pub l1_e2: f64,
    pub eoc_e2: Option<f64>,
}

pub const TABLE_HEADER: &str = "cells,l1_e1,eoc_e1,l1_e2,eoc_e2";

pub fn table_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = format!("{TABLE_HEADER}\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.cells,
            fmt_table(r.l1_e1),
            fmt_eoc(r.eoc_e1),
            fmt_table(r.l1_e2),
            fmt_eoc(r.eoc_e2)
        ));
    }
    out
}

pub fn parse_table(text: &str) -> Result<Vec<ConvergenceRow>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(TABLE_HEADER) {
        return Err(RunError::Parse("missing header".into()));
    }
    let num = |s: &str| -> Result<f64> {
        s.parse().map_err(|_| RunError::Parse(format!("bad number `{s}`")))
    };
    let opt = |s: &str| -> Result<Option<f64>> {
        match s {
            "" => Ok(None),
            "inf" => Ok(Some(f64::INFINITY)),
            s => num(s).map(Some),
        }
    };
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 5 {
                return Err(RunError::Parse(format!("expected 5 fields in `{line}`")));
            }
            Ok(ConvergenceRow {
                cells: f[0]
                    .parse()
                    .map_err(|_| RunError::Parse(format!("bad cell count `{}`", f[0])))?,
                l1_e1: num(f[1])?,
                eoc_e1: opt(f[2])?,
                l1_e2: num(f[3])?,
                eoc_e2: opt(f[4])?,
            })
        })
        .collect()
}
