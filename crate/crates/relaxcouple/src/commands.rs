//! The three subcommands, as library functions returning their results.

use std::path::PathBuf;
use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relaxcouple_core::diagnostics::{eoc, l1_time_norm, ErrorSeries};
use relaxcouple_core::psystem::{build_coupling, CouplingApproach, Experiment, PSystemModel};
use relaxcouple_core::riemann::{check_consistency, ConsistencyReport};
use relaxcouple_core::{FluxModel, StateVec};

use crate::config::RunConfig;
use crate::error::{Result, RunError};
use crate::output::{errors_csv, snapshot_csv, table_csv, write_atomic, ConvergenceRow};

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub snapshots: Vec<PathBuf>,
    pub errors: PathBuf,
    pub steps: usize,
    pub l1: (f64, f64),
}

/// Runs one simulation and writes a snapshot per output time plus the
/// interface error series.
pub fn cmd_run(config: &RunConfig) -> Result<RunSummary> {
    let ex = config.experiment()?;
    let grid = ex.grid()?;
    let out = ex.run()?;
    let mut snapshots = Vec::with_capacity(out.snapshots.len());
    for state in &out.snapshots {
        let path = config.output_dir.join(format!("snapshot_t{}.csv", state.time));
        write_atomic(&path, &snapshot_csv(&grid, state, &ex.model))?;
        snapshots.push(path);
    }
    let series = ErrorSeries::from_simulation(&out, &ex.schedule)?;
    let errors = config.output_dir.join("errors.csv");
    write_atomic(&errors, &errors_csv(&series))?;
    Ok(RunSummary {
        snapshots,
        errors,
        steps: out.steps,
        l1: l1_time_norm(&series, ex.end_time())?,
    })
}

/// `L¹` coupling errors of one run.
pub fn coupling_error_norms(ex: &Experiment) -> Result<(f64, f64)> {
    let out = ex.run()?;
    let series = ErrorSeries::from_simulation(&out, &ex.schedule)?;
    Ok(l1_time_norm(&series, ex.end_time())?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub approach: u8,
    pub rows: Vec<ConvergenceRow>,
    pub path: PathBuf,
}

/// Mesh sweep over `config.cell_list` for each approach; the runs are
/// independent and execute in parallel.
pub fn cmd_convergence(config: &RunConfig, approaches: &[u8]) -> Result<Vec<ConvergenceTable>> {
    let cells = &config.cell_list;
    if cells.is_empty() || cells.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(RunError::Config("cell list must double from row to row".into()));
    }
    for &ap in approaches {
        CouplingApproach::from_id(ap)?;
    }
    let jobs: Vec<(u8, usize)> = approaches
        .iter()
        .flat_map(|&ap| cells.iter().map(move |&n| (ap, n)))
        .collect();
    let results: Vec<Result<(f64, f64)>> = thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|&(ap, n)| s.spawn(move || coupling_error_norms(&config.experiment_for(ap, n)?)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("convergence job panicked"))
            .collect()
    });
    let norms = results.into_iter().collect::<Result<Vec<_>>>()?;

    let mut tables = Vec::with_capacity(approaches.len());
    for (i, &ap) in approaches.iter().enumerate() {
        let block = &norms[i * cells.len()..(i + 1) * cells.len()];
        let rows1: Vec<(usize, f64)> = cells.iter().copied().zip(block.iter().map(|e| e.0)).collect();
        let rows2: Vec<(usize, f64)> = cells.iter().copied().zip(block.iter().map(|e| e.1)).collect();
        let (eoc1, eoc2) = (eoc(&rows1)?, eoc(&rows2)?);
        let rows: Vec<ConvergenceRow> = (0..cells.len())
            .map(|k| ConvergenceRow {
                cells: cells[k],
                l1_e1: block[k].0,
                eoc_e1: k.checked_sub(1).map(|j| eoc1[j]),
                l1_e2: block[k].1,
                eoc_e2: k.checked_sub(1).map(|j| eoc2[j]),
            })
            .collect();
        let path = config.output_dir.join(format!("convergence_approach{ap}.csv"));
        write_atomic(&path, &table_csv(&rows))?;
        tables.push(ConvergenceTable {
            approach: ap,
            rows,
            path,
        });
    }
    Ok(tables)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyVerdict {
    pub approach: u8,
    /// One report per sampled outtake value.
    pub reports: Vec<(f64, ConsistencyReport)>,
}

impl ConsistencyVerdict {
    pub fn is_consistent(&self) -> bool {
        self.reports.iter().all(|(_, r)| r.is_consistent())
    }

    pub fn describe(&self) -> String {
        let mut s = format!("approach {}: ", self.approach);
        s += if self.is_consistent() { "consistent\n" } else { "NOT consistent\n" };
        for (e, r) in &self.reports {
            s += &format!(
                "  E = {e}: forward {}/{} ok, {} reverse counterexamples of {}, kappa = {:.3e}\n",
                r.forward_checked - r.forward_counterexamples.len(),
                r.forward_checked,
                r.reverse_counterexamples.len(),
                r.reverse_checked,
                r.kappa
            );
            if let Some(c) = r.forward_counterexamples.first().or(r.reverse_counterexamples.first()) {
                s += &format!(
                    "    counterexample U_R = {:?}, U_L = {:?}: |psi_U| = {:.3e}, |psi_Q| = {:.3e}\n",
                    c.u_r.as_slice(),
                    c.u_l.as_slice(),
                    c.psi_u_norm,
                    c.psi_q_norm
                );
            }
        }
        s
    }
}

pub const CONSISTENCY_TOL: f64 = 1e-10;

/// Checks the lifted relaxation coupling of `approach` against the turbine
/// conditions `(ρv)_R = (ρv)_L + E`, `p(ρ_R) = p(ρ_L)` on states satisfying
/// them and on random states.
pub fn cmd_consistency(model: &PSystemModel, approach: u8) -> Result<ConsistencyVerdict> {
    let approach = CouplingApproach::from_id(approach)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (lo, hi) = model.admissible_box();
    let mut reports = Vec::new();
    for e in [-0.6, -0.3, -0.1] {
        let mut samples = Vec::new();
        for i in 0..5 {
            let rho = lo[0] + (hi[0] - lo[0]) * (i as f64 + 0.5) / 5.0;
            for m_l in [-1.0, 0.2, 1.0, 1.7] {
                samples.push((state(rho, m_l + e), state(rho, m_l)));
            }
        }
        for _ in 0..200 {
            let mut draw = || state(rng.gen_range(lo[0]..hi[0]), rng.gen_range(lo[1]..hi[1]));
            samples.push((draw(), draw()));
        }
        let psi_u = |u_r: &[f64], u_l: &[f64]| {
            vec![
                u_r[1] - u_l[1] - e,
                model.pressure(u_r[0]) - model.pressure(u_l[0]),
            ]
        };
        let coupling = build_coupling(approach, e)?;
        let report = check_consistency(&psi_u, &coupling, model, model, &samples, CONSISTENCY_TOL)?;
        reports.push((e, report));
    }
    Ok(ConsistencyVerdict {
        approach: approach.id,
        reports,
    })
}

fn state(rho: f64, m: f64) -> StateVec {
    StateVec::from_slice(&[rho, m])
}
