use alloc::vec;
use alloc::vec::Vec;

use super::linear::{truncated_r_minus, truncated_r_plus};
use super::{split_sigma, trace_scale, NodalSolver, RiemannSolution};
use crate::error::{check_len, Error, Result};
use crate::linalg::{norm_inf, Matrix};
use crate::relax::{lax_parametrize, RelaxMatrix, RelaxState};

/// A relaxation coupling function `Ψ_Q : R²ⁿ × R²ⁿ → R²ⁿ`.
pub trait CouplingFunction {
    /// Model dimension `n`.
    fn dim(&self) -> usize;

    fn residual(&self, q_r: &RelaxState, q_l: &RelaxState) -> Vec<f64>;

    /// Partial Jacobians `(∂Ψ/∂Q_R, ∂Ψ/∂Q_L)`, when available in closed form.
    fn jacobians(&self, _q_r: &RelaxState, _q_l: &RelaxState) -> Option<(Matrix, Matrix)> {
        None
    }

    fn is_differentiable(&self) -> bool {
        true
    }
}

impl<T: CouplingFunction + ?Sized> CouplingFunction for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn residual(&self, q_r: &RelaxState, q_l: &RelaxState) -> Vec<f64> {
        (**self).residual(q_r, q_l)
    }

    fn jacobians(&self, q_r: &RelaxState, q_l: &RelaxState) -> Option<(Matrix, Matrix)> {
        (**self).jacobians(q_r, q_l)
    }

    fn is_differentiable(&self) -> bool {
        (**self).is_differentiable()
    }
}

/// The coupling function composed with the Lax-curve parametrization,
/// `Ψ̃_Q[Σ; Q₀] = Ψ_Q(Q_R(Σ; Q₀), Q_L(Σ; Q₀))`.
pub struct Parametrized<'a> {
    pub coupling: &'a dyn CouplingFunction,
    pub q0_minus: &'a RelaxState,
    pub q0_plus: &'a RelaxState,
    pub a_left: &'a RelaxMatrix,
    pub a_right: &'a RelaxMatrix,
}

/// Relative step used for finite-difference Jacobians in `Σ`.
const FD_STEP: f64 = 1e-6;

impl Parametrized<'_> {
    pub fn coupling_data(&self, sigma: &[f64]) -> Result<(RelaxState, RelaxState)> {
        let n = self.q0_minus.dim();
        lax_parametrize(
            &sigma[..n],
            &sigma[n..],
            self.q0_minus,
            self.q0_plus,
            self.a_left,
            self.a_right,
        )
    }

    pub fn eval(&self, sigma: &[f64]) -> Result<Vec<f64>> {
        let (q_r, q_l) = self.coupling_data(sigma)?;
        Ok(self.coupling.residual(&q_r, &q_l))
    }

    /// `D_Σ Ψ̃` from the analytic partial Jacobians when the coupling
    /// provides them, otherwise from central differences.
    pub fn jacobian(&self, sigma: &[f64]) -> Result<Matrix> {
        let (q_r, q_l) = self.coupling_data(sigma)?;
        match self.coupling.jacobians(&q_r, &q_l) {
            Some((j_r, j_l)) => Ok(j_r
                .mul(&truncated_r_minus(self.a_left))
                .add(&j_l.mul(&truncated_r_plus(self.a_right)))),
            None => self.fd_jacobian(sigma),
        }
    }

    pub fn fd_jacobian(&self, sigma: &[f64]) -> Result<Matrix> {
        let m = sigma.len();
        let mut jac = Matrix::zeros(m, m);
        let mut probe = sigma.to_vec();
        for k in 0..m {
            let h = FD_STEP * sigma[k].abs().max(1.0);
            probe[k] = sigma[k] + h;
            let up = self.eval(&probe)?;
            probe[k] = sigma[k] - h;
            let down = self.eval(&probe)?;
            probe[k] = sigma[k];
            for i in 0..m {
                jac[(i, k)] = (up[i] - down[i]) / (2.0 * h);
            }
        }
        Ok(jac)
    }
}

/// Choice of the matrix `A(Q₀)` in `Σ ← Σ − A(Q₀) Ψ̃_Q[Σ; Q₀]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Preconditioner {
    /// Inverse Jacobian recomputed at every iterate.
    #[default]
    Newton,
    /// Inverse Jacobian at the starting point, frozen.
    Chord,
    /// A user-supplied matrix.
    Fixed(Matrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointOptions {
    /// Bound on the scaled residual norm.
    pub tol: f64,
    pub max_iter: usize,
    /// Starting parameters; zero when absent.
    pub sigma0: Option<Vec<f64>>,
    pub preconditioner: Preconditioner,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 100,
            sigma0: None,
            preconditioner: Preconditioner::Newton,
        }
    }
}

fn invert_jacobian(jac: &Matrix) -> Result<Matrix> {
    jac.inverse().map_err(|e| match e {
        Error::Singular { condition } => Error::IllPosedCoupling { condition },
        other => other,
    })
}

/// Riemann solver for a general coupling function by the preconditioned
/// fixed-point iteration on the Lax-curve parameters.
///
/// When the root problem has several solutions the result is the limit
/// reached from `options.sigma0`.
pub fn solve_fixed_point(
    c: &dyn CouplingFunction,
    q0_minus: &RelaxState,
    q0_plus: &RelaxState,
    a_left: &RelaxMatrix,
    a_right: &RelaxMatrix,
    options: &FixedPointOptions,
) -> Result<RiemannSolution> {
    let n = c.dim();
    for len in [q0_minus.dim(), q0_plus.dim(), a_left.dim(), a_right.dim()] {
        check_len(n, len)?;
    }
    let param = Parametrized {
        coupling: c,
        q0_minus,
        q0_plus,
        a_left,
        a_right,
    };
    let mut sigma = match &options.sigma0 {
        Some(s) => {
            check_len(2 * n, s.len())?;
            s.clone()
        }
        None => vec![0.0; 2 * n],
    };
    let scale = trace_scale(q0_minus, q0_plus);
    let frozen = match &options.preconditioner {
        Preconditioner::Newton => None,
        Preconditioner::Chord => Some(invert_jacobian(&param.jacobian(&sigma)?)?),
        Preconditioner::Fixed(m) => {
            check_len(2 * n, m.rows())?;
            Some(m.clone())
        }
    };
    let mut iterations = 0;
    loop {
        let residual = param.eval(&sigma)?;
        if residual.iter().any(|r| !r.is_finite()) {
            return Err(Error::Diverged { iterations });
        }
        let residual_norm = norm_inf(&residual) / scale;
        if residual_norm <= options.tol {
            let (q_r, q_l) = param.coupling_data(&sigma)?;
            let (sigma_minus, sigma_plus) = split_sigma(&sigma);
            return Ok(RiemannSolution {
                q_r,
                q_l,
                sigma_minus,
                sigma_plus,
                residual_norm,
                iterations,
            });
        }
        if iterations == options.max_iter {
            return Err(Error::NotConverged {
                iterations,
                residual: residual_norm,
            });
        }
        let step = match &frozen {
            Some(m) => m.mul_vec(&residual),
            None => invert_jacobian(&param.jacobian(&sigma)?)?.mul_vec(&residual),
        };
        for (s, d) in sigma.iter_mut().zip(&step) {
            *s -= d;
        }
        iterations += 1;
        if sigma.iter().any(|s| !s.is_finite()) {
            return Err(Error::Diverged { iterations });
        }
    }
}

/// Sampled estimate of `sup_Σ ‖I − A(Q₀) D_Σ Ψ̃_Q[Σ; Q₀]‖∞`.
///
/// `A(Q₀)` is the fixed matrix for [`Preconditioner::Fixed`] and the
/// inverse Jacobian at `Σ = 0` otherwise. A value below one certifies the
/// contraction property on the sampled set. `D_Σ` is always taken by
/// central differences so the bound is independent of any analytic
/// Jacobian the coupling supplies.
pub fn contraction_bound(
    c: &dyn CouplingFunction,
    q0_minus: &RelaxState,
    q0_plus: &RelaxState,
    a_left: &RelaxMatrix,
    a_right: &RelaxMatrix,
    preconditioner: &Preconditioner,
    sigma_samples: &[Vec<f64>],
) -> Result<f64> {
    let n = c.dim();
    let param = Parametrized {
        coupling: c,
        q0_minus,
        q0_plus,
        a_left,
        a_right,
    };
    let precond = match preconditioner {
        Preconditioner::Fixed(m) => m.clone(),
        Preconditioner::Newton | Preconditioner::Chord => {
            invert_jacobian(&param.fd_jacobian(&vec![0.0; 2 * n])?)?
        }
    };
    let identity = Matrix::identity(2 * n);
    let mut bound: f64 = 0.0;
    for sigma in sigma_samples {
        check_len(2 * n, sigma.len())?;
        let jac = param.fd_jacobian(sigma)?;
        bound = bound.max(identity.sub(&precond.mul(&jac)).norm_inf());
    }
    Ok(bound)
}

/// [`solve_fixed_point`] for a time-independent coupling as a [`NodalSolver`].
pub struct FixedPointSolver<C> {
    pub coupling: C,
    pub a_left: RelaxMatrix,
    pub a_right: RelaxMatrix,
    pub options: FixedPointOptions,
}

impl<C: CouplingFunction> NodalSolver for FixedPointSolver<C> {
    fn solve(&self, _time: f64, q0_minus: &RelaxState, q0_plus: &RelaxState) -> Result<RiemannSolution> {
        solve_fixed_point(
            &self.coupling,
            q0_minus,
            q0_plus,
            &self.a_left,
            &self.a_right,
            &self.options,
        )
    }
}
