use alloc::vec::Vec;

use super::general::CouplingFunction;
use crate::error::{check_len, Result};
use crate::linalg::norm_inf;
use crate::relax::{FluxModel, RelaxState, StateVec};

/// A sample pair `(U_R, U_L)` on which the two coupling conditions disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub u_r: StateVec,
    pub u_l: StateVec,
    pub psi_u_norm: f64,
    pub psi_q_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    /// Every sample with `‖Ψ_U‖ ≤ tol` has a lifted residual `≤ tol·κ`.
    pub forward_ok: bool,
    pub forward_counterexamples: Vec<Counterexample>,
    /// Samples with lifted residual `≤ tol` but `‖Ψ_U‖ > tol·κ`.
    pub reverse_counterexamples: Vec<Counterexample>,
    /// Tolerance amplification: the largest infinity norm of the flux
    /// Jacobians over the samples (at least one), i.e. the Lipschitz
    /// constant of the lift `U ↦ (U, F(U))`.
    pub kappa: f64,
    pub forward_checked: usize,
    pub reverse_checked: usize,
}

impl ConsistencyReport {
    pub fn is_consistent(&self) -> bool {
        self.forward_ok && self.reverse_counterexamples.is_empty()
    }
}

/// Coupling condition `Ψ_U(U_R, U_L)` on conserved states.
pub type StateCondition<'a> = dyn Fn(&[f64], &[f64]) -> Vec<f64> + 'a;

/// Compares an original coupling condition `Ψ_U` with the relaxation
/// coupling `Ψ_Q` evaluated on the equilibrium lift
/// `((U_R, F₁(U_R)), (U_L, F₂(U_L)))`.
pub fn check_consistency(
    psi_u: &StateCondition,
    c: &dyn CouplingFunction,
    flux_left: &dyn FluxModel,
    flux_right: &dyn FluxModel,
    u_samples: &[(StateVec, StateVec)],
    tol: f64,
) -> Result<ConsistencyReport> {
    let n = c.dim();
    check_len(n, flux_left.dim())?;
    check_len(n, flux_right.dim())?;

    let mut kappa: f64 = 1.0;
    let mut evaluated = Vec::with_capacity(u_samples.len());
    for (u_r, u_l) in u_samples {
        check_len(n, u_r.dim())?;
        check_len(n, u_l.dim())?;
        kappa = kappa
            .max(flux_left.jacobian(u_r)?.norm_inf())
            .max(flux_right.jacobian(u_l)?.norm_inf());
        let q_r = RelaxState::new(u_r.clone(), flux_left.flux(u_r)?)?;
        let q_l = RelaxState::new(u_l.clone(), flux_right.flux(u_l)?)?;
        let psi_q_norm = norm_inf(&c.residual(&q_r, &q_l));
        let psi_u_norm = norm_inf(&psi_u(u_r, u_l));
        evaluated.push(Counterexample {
            u_r: u_r.clone(),
            u_l: u_l.clone(),
            psi_u_norm,
            psi_q_norm,
        });
    }

    let bound = tol * kappa;
    let mut report = ConsistencyReport {
        forward_ok: true,
        forward_counterexamples: Vec::new(),
        reverse_counterexamples: Vec::new(),
        kappa,
        forward_checked: 0,
        reverse_checked: 0,
    };
    for sample in evaluated {
        if sample.psi_u_norm <= tol {
            report.forward_checked += 1;
            if sample.psi_q_norm > bound {
                report.forward_ok = false;
                report.forward_counterexamples.push(sample.clone());
            }
        }
        if sample.psi_q_norm <= tol {
            report.reverse_checked += 1;
            if sample.psi_u_norm > bound {
                report.reverse_counterexamples.push(sample);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relax::LinearFlux;
    use crate::riemann::LinearCoupling;
    use alloc::vec;

    /// `Ψ_U` defined as the lifted `Ψ_Q` itself.
    #[test]
    fn tautological_coupling_is_consistent() {
        let flux = LinearFlux::scaled_identity(2.0, 1);
        let c = LinearCoupling::identity(vec![0.1, 0.2]).unwrap();
        let psi_u = |u_r: &[f64], u_l: &[f64]| {
            let q_r = RelaxState::from_slices(u_r, &[2.0 * u_r[0]]);
            let q_l = RelaxState::from_slices(u_l, &[2.0 * u_l[0]]);
            c.residual(&q_r, &q_l)
        };
        let s = |x: f64| StateVec::new(vec![x]).unwrap();
        let samples = vec![(s(0.1), s(0.0)), (s(1.0), s(0.5)), (s(0.3), s(0.3))];
        let report = check_consistency(&psi_u, &c, &flux, &flux, &samples, 1e-12).unwrap();
        assert!(report.is_consistent());
        assert_eq!(report.kappa, 2.0);
        assert_eq!((report.forward_checked, report.reverse_checked), (1, 1));
    }

    #[test]
    fn kirchhoff_relaxation_coupling_over_constrains() {
        // Original condition: flux continuity only; F_1(u) = u, F_2(u) = 2u.
        let f1 = LinearFlux::scaled_identity(1.0, 1);
        let f2 = LinearFlux::scaled_identity(2.0, 1);
        let c = LinearCoupling::kirchhoff(1);
        let psi_u = |u_r: &[f64], u_l: &[f64]| vec![u_r[0] - 2.0 * u_l[0]];
        let s = |x: f64| StateVec::new(vec![x]).unwrap();
        let samples = vec![(s(1.0), s(0.5))];
        let report = check_consistency(&psi_u, &c, &f1, &f2, &samples, 1e-12).unwrap();
        assert!(!report.forward_ok);
        assert_eq!(report.forward_counterexamples.len(), 1);
        assert!(report.reverse_counterexamples.is_empty());
    }
}
