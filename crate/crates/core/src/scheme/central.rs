use super::{cell_fluxes, transport, CoupledProblem, Grid, GridState};
use crate::error::{Error, Result};

/// One step of the coupled central scheme.
///
/// Equivalent to the relaxation transport applied to the equilibrium state
/// `V = F(U)`; the nodal solver receives the lifted traces
/// `(U_{-1}, F₁(U_{-1}))` and `(U_0, F₂(U_0))`.
pub fn central_step(
    state: &GridState,
    grid: &Grid,
    problem: &CoupledProblem<'_>,
    dt: f64,
) -> Result<GridState> {
    if state.n_cells() != grid.n_cells() || state.dim() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.n_cells() * problem.dim(),
            found: state.u_flat().len(),
        });
    }
    let v = cell_fluxes(grid, problem, state.u_flat())?;
    let (u, _) = transport(grid, problem, state.time, state.u_flat(), &v, dt, false)?;
    let time = state.time + dt;
    let next = GridState::new(time, state.dim(), u, None)?;
    if let Some(cell) = next.first_non_finite() {
        return Err(Error::BlowUp { cell, time });
    }
    Ok(next)
}
