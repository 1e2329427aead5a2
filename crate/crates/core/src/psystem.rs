//! Gas pipe with a momentum-consuming turbine at `x = 0`.
//!
//! The isentropic gas equations (`p`-system) with `p(ρ) = α ρ^γ` hold on
//! both half-axes; the turbine removes momentum `E ≤ 0` while keeping the
//! pressure continuous. Four relaxation coupling conditions are provided:
//! the linear approaches 1–3 and the nonlinear, consistent approach 4.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::linalg::{norm_inf, Matrix};
use crate::relax::{FluxModel, RelaxMatrix, RelaxState, StateVec};
use crate::riemann::{
    solve_linear, trace_scale, CouplingFunction, LinearCoupling, NodalSolver, RiemannSolution,
};
use crate::scheme::{run_simulation, CoupledProblem, Grid, SchemeConfig, SimulationOutput};

/// Below this density the approach-4 condition, which divides by `ρ_L`, is
/// treated as vacuum.
pub const RHO_FLOOR: f64 = 1e-12;

/// `|c|` below which the linear coefficient of the approach-4 solve counts
/// as degenerate.
pub const DEGENERATE_COEFFICIENT: f64 = 1e-10;

/// Pressure law `p(ρ) = α ρ^γ` together with the largest density used to
/// fix the relaxation speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PSystemModel {
    pub alpha: f64,
    pub gamma: f64,
    pub rho_max: f64,
}

impl PSystemModel {
    pub fn new(alpha: f64, gamma: f64, rho_max: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Config("pressure coefficient must be positive"));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::Config("adiabatic exponent must be non-negative"));
        }
        if !(rho_max > 0.0 && rho_max.is_finite()) {
            return Err(Error::Config("maximal density must be positive"));
        }
        Ok(Self {
            alpha,
            gamma,
            rho_max,
        })
    }

    pub fn pressure(&self, rho: f64) -> f64 {
        self.alpha * libm::pow(rho, self.gamma)
    }

    pub fn pressure_derivative(&self, rho: f64) -> f64 {
        if self.gamma == 0.0 {
            0.0
        } else {
            self.alpha * self.gamma * libm::pow(rho, self.gamma - 1.0)
        }
    }
}

impl FluxModel for PSystemModel {
    fn dim(&self) -> usize {
        2
    }

    fn flux_into(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(2, u.len())?;
        check_len(2, out.len())?;
        let (rho, m) = (u[0], u[1]);
        if rho < 0.0 || rho.is_nan() {
            return Err(Error::Domain("negative density"));
        }
        let convective = if rho == 0.0 {
            if m != 0.0 {
                return Err(Error::Vacuum);
            }
            0.0
        } else {
            m * m / rho
        };
        out[0] = m;
        out[1] = convective + self.pressure(rho);
        Ok(())
    }

    fn jacobian(&self, u: &[f64]) -> Result<Matrix> {
        check_len(2, u.len())?;
        let (rho, m) = (u[0], u[1]);
        if rho < 0.0 || rho.is_nan() {
            return Err(Error::Domain("negative density"));
        }
        if rho == 0.0 && m != 0.0 {
            return Err(Error::Vacuum);
        }
        if rho == 0.0 && self.gamma < 1.0 && self.gamma != 0.0 {
            return Err(Error::Domain("pressure derivative unbounded at vacuum"));
        }
        let (v, dp) = if rho == 0.0 {
            (0.0, if self.gamma == 1.0 { self.alpha } else { 0.0 })
        } else {
            (m / rho, self.pressure_derivative(rho))
        };
        Ok(Matrix::from_rows(&[&[0.0, 1.0], &[dp - v * v, 2.0 * v]]))
    }

    /// Densities in `[ρ_max/10, ρ_max]`, velocities up to one in magnitude.
    fn admissible_box(&self) -> (Vec<f64>, Vec<f64>) {
        (
            vec![0.1 * self.rho_max, -self.rho_max],
            vec![self.rho_max, self.rho_max],
        )
    }
}

/// `a = max_{ρ ∈ [0, ρ_max]} p′(ρ)`, the squared maximal sound speed.
pub fn relax_rate_a(model: &PSystemModel) -> Result<f64> {
    if model.gamma == 0.0 {
        return Err(Error::Config("constant pressure has no sound speed"));
    }
    if model.gamma < 1.0 {
        return Err(Error::Config("pressure derivative unbounded near vacuum"));
    }
    Ok(model.pressure_derivative(model.rho_max))
}

/// Piecewise-linear momentum outtake: ramp up to a plateau, ramp down from
/// `ramp_down_start` until it vanishes at `zero_time`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuttakeSchedule {
    pub ramp_rate: f64,
    pub plateau: f64,
    pub ramp_down_start: f64,
    pub zero_time: f64,
}

impl Default for OuttakeSchedule {
    fn default() -> Self {
        Self {
            ramp_rate: 3.0,
            plateau: 0.6,
            ramp_down_start: 0.3,
            zero_time: 0.5,
        }
    }
}

impl OuttakeSchedule {
    /// Outtake `−E(t) ≥ 0`.
    pub fn outtake(&self, t: f64) -> f64 {
        if t < self.ramp_down_start {
            self.plateau.min(self.ramp_rate * t).max(0.0)
        } else {
            (self.ramp_rate * (self.zero_time - t)).max(0.0)
        }
    }

    /// Signed momentum change `E(t) ≤ 0` entering the coupling conditions.
    pub fn e_value(&self, t: f64) -> f64 {
        -self.outtake(t)
    }
}

/// One of the four relaxation coupling approaches:
/// `ρ_R = ρ_L`, `(ρv)_R = (ρv)_L + β₁E`, `V₁R = V₁L + β₂E` and either
/// `V₂R = V₂L` or, for approach 4, `V₂R = V₂L + E(2(ρv)_L + E)/ρ_L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CouplingApproach {
    pub id: u8,
    pub beta1: u8,
    pub beta2: u8,
    pub nonlinear_v2: bool,
}

impl CouplingApproach {
    pub const ALL: [u8; 4] = [1, 2, 3, 4];

    pub fn from_id(id: u8) -> Result<Self> {
        let (beta1, beta2, nonlinear_v2) = match id {
            1 => (1, 0, false),
            2 => (0, 1, false),
            3 => (1, 1, false),
            4 => (1, 1, true),
            _ => return Err(Error::Config("coupling approach must be 1, 2, 3 or 4")),
        };
        Ok(Self {
            id,
            beta1,
            beta2,
            nonlinear_v2,
        })
    }

    /// `P = (0, β₁E, β₂E, 0)`.
    pub fn offset(&self, e: f64) -> Vec<f64> {
        vec![0.0, f64::from(self.beta1) * e, f64::from(self.beta2) * e, 0.0]
    }
}

/// Approach-4 coupling function
/// `Ψ_Q = Q_R − Q_L − P − (0, 0, 0, E(2(ρv)_L + E)/ρ_L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Approach4Coupling {
    pub e: f64,
}

impl Approach4Coupling {
    /// Second component of `g^V(U_L)`.
    pub fn g_v2(&self, u_l: &[f64]) -> f64 {
        self.e * (2.0 * u_l[1] + self.e) / u_l[0]
    }
}

impl CouplingFunction for Approach4Coupling {
    fn dim(&self) -> usize {
        2
    }

    fn residual(&self, q_r: &RelaxState, q_l: &RelaxState) -> Vec<f64> {
        let g = self.g_v2(&q_l.u);
        vec![
            q_r.u[0] - q_l.u[0],
            q_r.u[1] - q_l.u[1] - self.e,
            q_r.v[0] - q_l.v[0] - self.e,
            q_r.v[1] - q_l.v[1] - g,
        ]
    }

    fn jacobians(&self, _q_r: &RelaxState, q_l: &RelaxState) -> Option<(Matrix, Matrix)> {
        let (rho, m) = (q_l.u[0], q_l.u[1]);
        let mut j_l = Matrix::identity(4).scale(-1.0);
        j_l[(3, 0)] = self.e * (2.0 * m + self.e) / (rho * rho);
        j_l[(3, 1)] = -2.0 * self.e / rho;
        Some((Matrix::identity(4), j_l))
    }
}

/// Coupling function of an approach at a fixed outtake value.
#[derive(Debug, Clone, PartialEq)]
pub enum PSystemCoupling {
    Linear(LinearCoupling),
    Approach4(Approach4Coupling),
}

impl CouplingFunction for PSystemCoupling {
    fn dim(&self) -> usize {
        2
    }

    fn residual(&self, q_r: &RelaxState, q_l: &RelaxState) -> Vec<f64> {
        match self {
            PSystemCoupling::Linear(c) => c.residual(q_r, q_l),
            PSystemCoupling::Approach4(c) => c.residual(q_r, q_l),
        }
    }

    fn jacobians(&self, q_r: &RelaxState, q_l: &RelaxState) -> Option<(Matrix, Matrix)> {
        match self {
            PSystemCoupling::Linear(c) => c.jacobians(q_r, q_l),
            PSystemCoupling::Approach4(c) => c.jacobians(q_r, q_l),
        }
    }
}

pub fn build_coupling(approach: CouplingApproach, e: f64) -> Result<PSystemCoupling> {
    if !(e <= 0.0) {
        return Err(Error::Domain("momentum change must be non-positive"));
    }
    if approach.nonlinear_v2 {
        Ok(PSystemCoupling::Approach4(Approach4Coupling { e }))
    } else {
        Ok(PSystemCoupling::Linear(LinearCoupling::identity(
            approach.offset(e),
        )?))
    }
}

fn check_traces(q0_minus: &RelaxState, q0_plus: &RelaxState) -> Result<()> {
    check_len(2, q0_minus.dim())?;
    check_len(2, q0_plus.dim())
}

/// Coupling data from `Σ∓` with `A = aI` on both sides:
/// `Q_R = Q₀⁻ + (−Σ⁻/√a, Σ⁻)` and `Q_L = Q₀⁺ + (Σ⁺/√a, Σ⁺)`.
fn data_from_sigma(
    q0_minus: &RelaxState,
    q0_plus: &RelaxState,
    s: f64,
    sigma_minus: [f64; 2],
    sigma_plus: [f64; 2],
) -> (RelaxState, RelaxState) {
    let q_r = RelaxState::from_slices(
        &[
            q0_minus.u[0] - sigma_minus[0] / s,
            q0_minus.u[1] - sigma_minus[1] / s,
        ],
        &[q0_minus.v[0] + sigma_minus[0], q0_minus.v[1] + sigma_minus[1]],
    );
    let q_l = RelaxState::from_slices(
        &[q0_plus.u[0] + sigma_plus[0] / s, q0_plus.u[1] + sigma_plus[1] / s],
        &[q0_plus.v[0] + sigma_plus[0], q0_plus.v[1] + sigma_plus[1]],
    );
    (q_r, q_l)
}

/// Closed-form solver for approaches 1–3:
/// `Σ∓ = −½√a(P^U + U₀⁺ − U₀⁻) ± ½(P^V + V₀⁺ − V₀⁻)`.
pub fn solve_linear_psystem(
    approach: CouplingApproach,
    q0_minus: &RelaxState,
    q0_plus: &RelaxState,
    a: f64,
    e: f64,
) -> Result<RiemannSolution> {
    if approach.nonlinear_v2 {
        return Err(Error::Config("approach 4 has no linear solver"));
    }
    check_traces(q0_minus, q0_plus)?;
    let coupling = build_coupling(approach, e)?;
    let p = approach.offset(e);
    let s = libm::sqrt(a);
    let mut sigma_minus = [0.0; 2];
    let mut sigma_plus = [0.0; 2];
    for j in 0..2 {
        let du = p[j] + q0_plus.u[j] - q0_minus.u[j];
        let dv = p[2 + j] + q0_plus.v[j] - q0_minus.v[j];
        sigma_minus[j] = -0.5 * s * du + 0.5 * dv;
        sigma_plus[j] = -0.5 * s * du - 0.5 * dv;
    }
    let (q_r, q_l) = data_from_sigma(q0_minus, q0_plus, s, sigma_minus, sigma_plus);
    let residual_norm = norm_inf(&coupling.residual(&q_r, &q_l)) / trace_scale(q0_minus, q0_plus);
    Ok(RiemannSolution {
        q_r,
        q_l,
        sigma_minus: StateVec::from_slice(&sigma_minus),
        sigma_plus: StateVec::from_slice(&sigma_plus),
        residual_norm,
        iterations: 0,
    })
}

/// Closed-form solver for approach 4.
///
/// The `V` equations decouple: the first fixes `σ₁⁺` and with it `ρ_L`,
/// after which the second is linear in `σ₂⁺`. `Σ⁻` follows from the `U`
/// equations.
pub fn solve_approach4(
    q0_minus: &RelaxState,
    q0_plus: &RelaxState,
    a: f64,
    e: f64,
) -> Result<RiemannSolution> {
    check_traces(q0_minus, q0_plus)?;
    if !(e <= 0.0) {
        return Err(Error::Domain("momentum change must be non-positive"));
    }
    let s = libm::sqrt(a);
    // d = U₀⁻ − U₀⁺ − P^U and w = V₀⁺ − V₀⁻ + P^V.
    let d = [q0_minus.u[0] - q0_plus.u[0], q0_minus.u[1] - q0_plus.u[1] - e];
    let w = [q0_plus.v[0] - q0_minus.v[0] + e, q0_plus.v[1] - q0_minus.v[1]];

    let sigma1 = 0.5 * (s * d[0] - w[0]);
    let rho_l = q0_plus.u[0] + sigma1 / s;
    if !(rho_l > RHO_FLOOR) {
        return Err(Error::InterfaceVacuum { rho: rho_l });
    }
    let coefficient = -2.0 - 2.0 * e / (s * rho_l);
    if !(coefficient.abs() > DEGENERATE_COEFFICIENT) {
        return Err(Error::DegenerateNode { coefficient });
    }
    let m0 = q0_plus.u[1];
    let sigma2 = (w[1] - s * d[1] + e * (2.0 * m0 + e) / rho_l) / coefficient;

    let sigma_plus = [sigma1, sigma2];
    let sigma_minus = [s * d[0] - sigma1, s * d[1] - sigma2];
    let (q_r, q_l) = data_from_sigma(q0_minus, q0_plus, s, sigma_minus, sigma_plus);
    let residual_norm =
        norm_inf(&Approach4Coupling { e }.residual(&q_r, &q_l)) / trace_scale(q0_minus, q0_plus);
    Ok(RiemannSolution {
        q_r,
        q_l,
        sigma_minus: StateVec::from_slice(&sigma_minus),
        sigma_plus: StateVec::from_slice(&sigma_plus),
        residual_norm,
        iterations: 0,
    })
}

/// Nodal solver for the turbine with outtake `E(t)` evaluated at the start
/// of each step.
#[derive(Debug, Clone, PartialEq)]
pub struct PSystemSolver {
    pub approach: CouplingApproach,
    pub schedule: OuttakeSchedule,
    pub a: f64,
}

impl NodalSolver for PSystemSolver {
    fn solve(&self, time: f64, q0_minus: &RelaxState, q0_plus: &RelaxState) -> Result<RiemannSolution> {
        let e = self.schedule.e_value(time);
        if self.approach.nonlinear_v2 {
            solve_approach4(q0_minus, q0_plus, self.a, e)
        } else {
            solve_linear_psystem(self.approach, q0_minus, q0_plus, self.a, e)
        }
    }
}

/// Same as [`PSystemSolver`] for approaches 1–3 but through the generic
/// dense linear solver; used as an oracle.
pub fn solve_linear_generic(
    approach: CouplingApproach,
    q0_minus: &RelaxState,
    q0_plus: &RelaxState,
    a: f64,
    e: f64,
) -> Result<RiemannSolution> {
    let am = RelaxMatrix::uniform(a, 2)?;
    match build_coupling(approach, e)? {
        PSystemCoupling::Linear(c) => solve_linear(&c, q0_minus, q0_plus, &am, &am),
        PSystemCoupling::Approach4(_) => Err(Error::Config("approach 4 has no linear solver")),
    }
}

/// A gas pipe with a turbine at `x = 0` and piecewise-constant initial
/// data. [`Experiment::new`] gives the reference setup: constant state
/// `(1, 1)` on `[-200, 200]`, linear pressure law and the default outtake.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub model: PSystemModel,
    pub schedule: OuttakeSchedule,
    pub approach: CouplingApproach,
    pub x_min: f64,
    pub x_max: f64,
    pub cells: usize,
    pub cfl: f64,
    pub epsilon: f64,
    /// Initial `(ρ, ρv)` left and right of the interface.
    pub left: [f64; 2],
    pub right: [f64; 2],
    pub output_times: Vec<f64>,
}

impl Experiment {
    pub const ALPHA: f64 = 146820.4;
    pub const OUTPUT_TIMES: [f64; 3] = [0.0716, 0.2864, 0.55];

    pub fn new(approach: u8) -> Result<Self> {
        Ok(Self {
            model: PSystemModel::new(Self::ALPHA, 1.0, 2.0)?,
            schedule: OuttakeSchedule::default(),
            approach: CouplingApproach::from_id(approach)?,
            x_min: -200.0,
            x_max: 200.0,
            cells: 1000,
            cfl: 0.49,
            epsilon: 0.0,
            left: [1.0, 1.0],
            right: [1.0, 1.0],
            output_times: Self::OUTPUT_TIMES.to_vec(),
        })
    }

    pub fn end_time(&self) -> f64 {
        self.output_times.last().copied().unwrap_or(0.0)
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.cells, self.x_min, self.x_max)
    }

    pub fn run(&self) -> Result<SimulationOutput> {
        let grid = self.grid()?;
        let a = relax_rate_a(&self.model)?;
        let solver = PSystemSolver {
            approach: self.approach,
            schedule: self.schedule,
            a,
        };
        let problem = CoupledProblem {
            flux_left: &self.model,
            flux_right: &self.model,
            a_left: RelaxMatrix::uniform(a, 2)?,
            a_right: RelaxMatrix::uniform(a, 2)?,
            solver: &solver,
        };
        let config = SchemeConfig {
            cfl: self.cfl,
            epsilon: self.epsilon,
            end_time: self.end_time(),
            output_times: self.output_times.clone(),
        };
        let mut u0 = Vec::with_capacity(2 * self.cells);
        for k in 0..self.cells {
            u0.extend_from_slice(if grid.is_left(k) { &self.left } else { &self.right });
        }
        run_simulation(&grid, &problem, &config, u0)
    }
}
