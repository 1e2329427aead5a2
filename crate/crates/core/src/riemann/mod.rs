//! Nodal Riemann solvers for the coupled relaxation system.
//!
//! A solver maps the trace data `(Q₀⁻, Q₀⁺)` next to the interface to
//! coupling data `(Q_R, Q_L)` that lies on the Lax curves through the traces
//! and satisfies the coupling condition `Ψ_Q(Q_R, Q_L) = 0`.
//!
//! Residual norms reported here are infinity norms scaled by
//! `max(1, ‖(Q₀⁻, Q₀⁺)‖∞)`, so that tolerances stay meaningful for traces
//! whose auxiliary components are large (the gas-network case has
//! `V₂ ≈ 1.5e5`).

mod consistency;
mod general;
mod linear;

pub use consistency::{check_consistency, ConsistencyReport, Counterexample, StateCondition};
pub use general::{
    contraction_bound, solve_fixed_point, CouplingFunction, FixedPointOptions, FixedPointSolver,
    Parametrized, Preconditioner,
};
pub use linear::{
    block_lu_inverse, solve_kirchhoff, solve_linear, truncated_r_minus, truncated_r_plus,
    KirchhoffSolver, LinearCoupling, LinearSolver,
};

use crate::error::Result;
use crate::relax::{RelaxState, StateVec};

/// Coupling data produced by a nodal Riemann solver.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannSolution {
    pub q_r: RelaxState,
    pub q_l: RelaxState,
    pub sigma_minus: StateVec,
    pub sigma_plus: StateVec,
    /// Scaled infinity norm of the coupling residual at the output.
    pub residual_norm: f64,
    /// Fixed-point iterations used; zero for closed-form solvers.
    pub iterations: usize,
}

/// A Riemann solver usable by the time-stepping schemes.
///
/// `time` is the start of the current step; couplings with time-dependent
/// parameters evaluate them there.
pub trait NodalSolver {
    fn solve(&self, time: f64, q0_minus: &RelaxState, q0_plus: &RelaxState)
        -> Result<RiemannSolution>;
}

impl<T: NodalSolver + ?Sized> NodalSolver for &T {
    fn solve(
        &self,
        time: f64,
        q0_minus: &RelaxState,
        q0_plus: &RelaxState,
    ) -> Result<RiemannSolution> {
        (**self).solve(time, q0_minus, q0_plus)
    }
}

/// Normalisation used for residual tolerances.
pub fn trace_scale(q0_minus: &RelaxState, q0_plus: &RelaxState) -> f64 {
    q0_minus.max_abs().max(q0_plus.max_abs()).max(1.0)
}

pub(crate) fn split_sigma(sigma: &[f64]) -> (StateVec, StateVec) {
    let n = sigma.len() / 2;
    (
        StateVec::from_slice(&sigma[..n]),
        StateVec::from_slice(&sigma[n..]),
    )
}
