use super::{cell_fluxes, transport, CoupledProblem, Grid, GridState};
use crate::error::{Error, Result};

/// One IMEX step of the relaxation scheme: explicit transport of `(U, V)`
/// followed by the implicit stiff update
/// `V ← (V* + (Δt/ε) F(U)) / (1 + Δt/ε)`.
///
/// `epsilon = ∞` switches the source off.
pub fn relaxation_step(
    state: &GridState,
    grid: &Grid,
    problem: &CoupledProblem<'_>,
    dt: f64,
    epsilon: f64,
) -> Result<GridState> {
    if !(epsilon > 0.0) {
        return Err(Error::Config("relaxation step needs a positive relaxation rate"));
    }
    let v = state
        .v_flat()
        .ok_or(Error::Config("relaxation step needs the auxiliary field V"))?;
    if state.n_cells() != grid.n_cells() || state.dim() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.n_cells() * problem.dim(),
            found: state.u_flat().len(),
        });
    }
    let (u, v_star) = transport(grid, problem, state.time, state.u_flat(), v, dt, true)?;
    let mut v = v_star.unwrap_or_default();
    let f = cell_fluxes(grid, problem, &u)?;
    let h = dt / epsilon;
    for (v, f) in v.iter_mut().zip(&f) {
        *v = (*v + h * f) / (1.0 + h);
    }
    let time = state.time + dt;
    let next = GridState::new(time, state.dim(), u, Some(v))?;
    if let Some(cell) = next.first_non_finite() {
        return Err(Error::BlowUp { cell, time });
    }
    Ok(next)
}
