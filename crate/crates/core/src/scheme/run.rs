use alloc::boxed::Box;
use alloc::vec::Vec;

use super::{
    central_step, cell_fluxes, cfl_dt, relaxation_step, CoupledProblem, Grid, GridState,
    SchemeConfig,
};
use crate::error::{check_len, Error, Result};

/// Interface traces `U_{-1}`, `U_0` at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceSample {
    pub time: f64,
    /// Length of the step that produced this level; zero for the initial one.
    pub dt: f64,
    pub u_left: Vec<f64>,
    pub u_right: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutput {
    /// One state per requested output time (the end time if none given).
    pub snapshots: Vec<GridState>,
    /// Traces after every step, starting with the initial data.
    pub interface: Vec<InterfaceSample>,
    /// Nominal CFL step.
    pub dt: f64,
    pub steps: usize,
}

fn sample(grid: &Grid, state: &GridState, dt: f64) -> InterfaceSample {
    InterfaceSample {
        time: state.time,
        dt,
        u_left: state.u(grid.n_left() - 1).to_vec(),
        u_right: state.u(grid.n_left()).to_vec(),
    }
}

/// Advances `initial_u` (flat cell averages at `t = 0`) to the end time.
///
/// `ε = 0` runs the central scheme; otherwise the relaxation scheme starts
/// from the equilibrium `V = F(U)`. The step is fixed by the CFL condition
/// and shortened only to land exactly on output times.
pub fn run_simulation(
    grid: &Grid,
    problem: &CoupledProblem<'_>,
    config: &SchemeConfig,
    initial_u: Vec<f64>,
) -> Result<SimulationOutput> {
    config.validate()?;
    let n = problem.dim();
    check_len(grid.n_cells() * n, initial_u.len())?;

    let v = if config.epsilon > 0.0 {
        Some(cell_fluxes(grid, problem, &initial_u)?)
    } else {
        None
    };
    let mut state = GridState::new(0.0, n, initial_u, v)?;
    if let Some(cell) = state.first_non_finite() {
        return Err(Error::BlowUp { cell, time: 0.0 });
    }

    let dt = cfl_dt(config.cfl, grid.dx(), &problem.a_left, &problem.a_right);
    let targets: Vec<f64> = if config.output_times.is_empty() {
        alloc::vec![config.end_time]
    } else {
        config.output_times.clone()
    };

    let mut snapshots = Vec::with_capacity(targets.len());
    let mut interface = Vec::new();
    interface.push(sample(grid, &state, 0.0));
    let mut next_target = 0;
    while next_target < targets.len() && targets[next_target] <= 0.0 {
        snapshots.push(state.clone());
        next_target += 1;
    }

    let mut steps = 0;
    while state.time < config.end_time {
        let target = targets.get(next_target).copied().unwrap_or(config.end_time);
        let remaining = target - state.time;
        let landing = remaining <= dt * (1.0 + 1e-9);
        let h = if landing { remaining } else { dt };
        let stepped = if config.epsilon > 0.0 {
            relaxation_step(&state, grid, problem, h, config.epsilon)
        } else {
            central_step(&state, grid, problem, h)
        };
        state = stepped.map_err(|e| Error::Step {
            step: steps,
            source: Box::new(e),
        })?;
        steps += 1;
        if landing {
            state.time = target;
        }
        interface.push(sample(grid, &state, h));
        if landing && next_target < targets.len() {
            snapshots.push(state.clone());
            next_target += 1;
        }
    }

    Ok(SimulationOutput {
        snapshots,
        interface,
        dt,
        steps,
    })
}
