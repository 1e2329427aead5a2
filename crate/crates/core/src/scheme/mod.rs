//! Finite-volume time stepping on a uniform mesh split by the interface at
//! `x = 0`: the IMEX relaxation scheme for `ε > 0` and its zero-relaxation
//! limit, the coupled central scheme.

mod central;
mod relaxation;
mod run;

pub use central::central_step;
pub use relaxation::relaxation_step;
pub use run::{run_simulation, InterfaceSample, SimulationOutput};

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::relax::{FluxModel, RelaxMatrix, RelaxState};
use crate::riemann::NodalSolver;

/// Ghost cells per outer boundary; filled by copying the adjacent cell.
pub const GHOST_CELLS: usize = 2;

/// Uniform mesh whose cell boundaries include `x = 0`.
///
/// Cells are stored left to right with storage index `k`; the cell left of
/// the interface has `k = n_left - 1` and the one right of it `k = n_left`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n_cells: usize,
    n_left: usize,
    x_min: f64,
    x_max: f64,
    dx: f64,
}

impl Grid {
    pub fn new(n_cells: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if !(x_min < 0.0 && 0.0 < x_max && x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::Config("domain must satisfy x_min < 0 < x_max"));
        }
        if n_cells < 2 || n_cells % 2 != 0 {
            return Err(Error::Config("number of cells must be even and at least 2"));
        }
        let dx = (x_max - x_min) / n_cells as f64;
        let left = -x_min / dx;
        let n_left = libm::round(left);
        if (left - n_left).abs() > 1e-9 * left.max(1.0) || n_left < 1.0 || n_left >= n_cells as f64 {
            return Err(Error::Config("interface at x = 0 must be a cell boundary"));
        }
        Ok(Self {
            n_cells,
            n_left: n_left as usize,
            x_min,
            x_max,
            dx,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    /// Number of cells on the left half-axis.
    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn center(&self, k: usize) -> f64 {
        self.x_min + (k as f64 + 0.5) * self.dx
    }

    /// Signed cell index with `-1` left of the interface and `0` right of it.
    pub fn signed_index(&self, k: usize) -> i64 {
        k as i64 - self.n_left as i64
    }

    pub fn is_left(&self, k: usize) -> bool {
        k < self.n_left
    }
}

/// Cell averages at one time level, stored flat (`dim` values per cell).
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub time: f64,
    dim: usize,
    u: Vec<f64>,
    v: Option<Vec<f64>>,
}

impl GridState {
    pub fn new(time: f64, dim: usize, u: Vec<f64>, v: Option<Vec<f64>>) -> Result<Self> {
        if dim == 0 || u.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: u.len(),
            });
        }
        if let Some(v) = &v {
            check_len(u.len(), v.len())?;
        }
        Ok(Self { time, dim, u, v })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_cells(&self) -> usize {
        self.u.len() / self.dim
    }

    pub fn u(&self, k: usize) -> &[f64] {
        &self.u[k * self.dim..(k + 1) * self.dim]
    }

    pub fn v(&self, k: usize) -> Option<&[f64]> {
        self.v.as_ref().map(|v| &v[k * self.dim..(k + 1) * self.dim])
    }

    pub fn u_flat(&self) -> &[f64] {
        &self.u
    }

    pub fn v_flat(&self) -> Option<&[f64]> {
        self.v.as_deref()
    }

    pub fn has_v(&self) -> bool {
        self.v.is_some()
    }

    /// `Σ_k U_k Δx` per component.
    pub fn total(&self, dx: f64) -> Vec<f64> {
        (0..self.dim)
            .map(|c| (0..self.n_cells()).map(|k| self.u(k)[c]).sum::<f64>() * dx)
            .collect()
    }

    /// First non-finite cell, if any.
    pub fn first_non_finite(&self) -> Option<usize> {
        let bad_u = self.u.iter().position(|x| !x.is_finite());
        let bad_v = self
            .v
            .as_ref()
            .and_then(|v| v.iter().position(|x| !x.is_finite()));
        match (bad_u, bad_v) {
            (Some(a), Some(b)) => Some(a.min(b) / self.dim),
            (Some(a), None) | (None, Some(a)) => Some(a / self.dim),
            (None, None) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    pub cfl: f64,
    /// Relaxation rate; zero selects the central scheme.
    pub epsilon: f64,
    pub end_time: f64,
    pub output_times: Vec<f64>,
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::Config("CFL number must lie in (0, 1)"));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::Config("relaxation rate must be non-negative"));
        }
        if !(self.end_time >= 0.0 && self.end_time.is_finite()) {
            return Err(Error::Config("end time must be finite and non-negative"));
        }
        if self.output_times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("output times must be strictly increasing"));
        }
        if self
            .output_times
            .iter()
            .any(|t| !(*t >= 0.0 && *t <= self.end_time))
        {
            return Err(Error::Config("output times must lie in [0, end_time]"));
        }
        Ok(())
    }
}

/// Flux models, relaxation matrices and nodal solver of a coupled problem.
pub struct CoupledProblem<'a> {
    pub flux_left: &'a dyn FluxModel,
    pub flux_right: &'a dyn FluxModel,
    pub a_left: RelaxMatrix,
    pub a_right: RelaxMatrix,
    pub solver: &'a dyn NodalSolver,
}

impl CoupledProblem<'_> {
    pub fn dim(&self) -> usize {
        self.flux_left.dim()
    }

    fn check(&self) -> Result<()> {
        let n = self.dim();
        for len in [self.flux_right.dim(), self.a_left.dim(), self.a_right.dim()] {
            check_len(n, len)?;
        }
        Ok(())
    }
}

/// `Δt = cfl · Δx / max_{i,j} sqrt(a_j^i)`.
pub fn cfl_dt(cfl: f64, dx: f64, a_left: &RelaxMatrix, a_right: &RelaxMatrix) -> f64 {
    cfl * dx / a_left.max_speed().max(a_right.max_speed())
}

/// Copies `field` (flat, `dim` per cell) into a buffer with ghost layers
/// mirroring the boundary cells.
pub(crate) fn with_ghosts(field: &[f64], dim: usize) -> Vec<f64> {
    let n_cells = field.len() / dim;
    let mut out = Vec::with_capacity(field.len() + 2 * GHOST_CELLS * dim);
    for _ in 0..GHOST_CELLS {
        out.extend_from_slice(&field[..dim]);
    }
    out.extend_from_slice(field);
    for _ in 0..GHOST_CELLS {
        out.extend_from_slice(&field[(n_cells - 1) * dim..]);
    }
    out
}

/// Flux of the relaxation transport part across one face:
/// `(½(V_l+V_r) − ½√A(U_r−U_l), ½A(U_l+U_r) − ½√A(V_r−V_l))` per component.
#[inline]
fn face_flux(a: f64, sa: f64, ul: f64, vl: f64, ur: f64, vr: f64) -> (f64, f64) {
    (
        0.5 * (vl + vr) - 0.5 * sa * (ur - ul),
        0.5 * a * (ul + ur) - 0.5 * sa * (vr - vl),
    )
}

/// One explicit step of the linear transport `Q_t + S Q_x = 0` with the
/// interface handled by the nodal solver. Returns updated `U` and, when
/// `update_v` is set, the transported `V*`.
pub(crate) fn transport(
    grid: &Grid,
    problem: &CoupledProblem<'_>,
    time: f64,
    u: &[f64],
    v: &[f64],
    dt: f64,
    update_v: bool,
) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    problem.check()?;
    let n = problem.dim();
    let n_cells = grid.n_cells();
    let n_left = grid.n_left();
    check_len(n_cells * n, u.len())?;
    check_len(n_cells * n, v.len())?;

    let q_minus = RelaxState::from_slices(
        &u[(n_left - 1) * n..n_left * n],
        &v[(n_left - 1) * n..n_left * n],
    );
    let q_plus = RelaxState::from_slices(&u[n_left * n..(n_left + 1) * n], &v[n_left * n..(n_left + 1) * n]);
    let sol = problem
        .solver
        .solve(time, &q_minus, &q_plus)
        .map_err(|e| Error::Interface {
            time,
            source: Box::new(e),
        })?;

    let up = with_ghosts(u, n);
    let vp = with_ghosts(v, n);
    // Face k separates cells k-1 and k; faces 0 and n_cells border ghosts.
    let n_faces = n_cells + 1;
    let mut fu = vec![0.0; n_faces * n];
    let mut fv = vec![0.0; n_faces * n];
    for k in 0..n_faces {
        if k == n_left {
            continue;
        }
        let a = if k < n_left { &problem.a_left } else { &problem.a_right };
        let l = (k + GHOST_CELLS - 1) * n;
        let r = (k + GHOST_CELLS) * n;
        for c in 0..n {
            let (f, g) = face_flux(
                a.diag()[c],
                a.sqrt_diag()[c],
                up[l + c],
                vp[l + c],
                up[r + c],
                vp[r + c],
            );
            fu[k * n + c] = f;
            fv[k * n + c] = g;
        }
    }
    // Interface: the left cell sees (Q_{-1}, Q_R), the right cell (Q_L, Q_0).
    let mut fu_minus = vec![0.0; n];
    let mut fv_minus = vec![0.0; n];
    let mut fu_plus = vec![0.0; n];
    let mut fv_plus = vec![0.0; n];
    for c in 0..n {
        let (f, g) = face_flux(
            problem.a_left.diag()[c],
            problem.a_left.sqrt_diag()[c],
            q_minus.u[c],
            q_minus.v[c],
            sol.q_r.u[c],
            sol.q_r.v[c],
        );
        fu_minus[c] = f;
        fv_minus[c] = g;
        let (f, g) = face_flux(
            problem.a_right.diag()[c],
            problem.a_right.sqrt_diag()[c],
            sol.q_l.u[c],
            sol.q_l.v[c],
            q_plus.u[c],
            q_plus.v[c],
        );
        fu_plus[c] = f;
        fv_plus[c] = g;
    }

    let ratio = dt / grid.dx();
    let mut u_new = vec![0.0; u.len()];
    let mut v_new = if update_v { vec![0.0; v.len()] } else { Vec::new() };
    for k in 0..n_cells {
        let (ful, fvl) = if k == n_left {
            (&fu_plus[..], &fv_plus[..])
        } else {
            (&fu[k * n..(k + 1) * n], &fv[k * n..(k + 1) * n])
        };
        let (fur, fvr) = if k + 1 == n_left {
            (&fu_minus[..], &fv_minus[..])
        } else {
            (&fu[(k + 1) * n..(k + 2) * n], &fv[(k + 1) * n..(k + 2) * n])
        };
        for c in 0..n {
            u_new[k * n + c] = u[k * n + c] - ratio * (fur[c] - ful[c]);
            if update_v {
                v_new[k * n + c] = v[k * n + c] - ratio * (fvr[c] - fvl[c]);
            }
        }
    }
    Ok((u_new, update_v.then_some(v_new)))
}

/// `F_i(U_k)` for every cell, using the flux of the cell's half-axis.
pub(crate) fn cell_fluxes(grid: &Grid, problem: &CoupledProblem<'_>, u: &[f64]) -> Result<Vec<f64>> {
    let n = problem.dim();
    let mut out = vec![0.0; u.len()];
    for k in 0..grid.n_cells() {
        let model = if grid.is_left(k) { problem.flux_left } else { problem.flux_right };
        model.flux_into(&u[k * n..(k + 1) * n], &mut out[k * n..(k + 1) * n])?;
    }
    Ok(out)
}
