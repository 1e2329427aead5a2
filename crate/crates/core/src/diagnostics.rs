//! Interface coupling errors of the gas-turbine problem and their
//! convergence under mesh refinement.

use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::psystem::OuttakeSchedule;
use crate::scheme::SimulationOutput;

/// `(E¹, E²) = (|(U₋₁ − U₀)₂ − E|, |(U₋₁ − U₀)₁|)`: the violation of the
/// momentum jump and of density continuity by the cells next to the
/// interface.
pub fn coupling_errors(u_left: &[f64], u_right: &[f64], e: f64) -> Result<(f64, f64)> {
    check_len(2, u_left.len())?;
    check_len(2, u_right.len())?;
    let e1 = ((u_left[1] - u_right[1]) - e).abs();
    let e2 = (u_left[0] - u_right[0]).abs();
    Ok((e1, e2))
}

/// Coupling errors at every time level of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSeries {
    pub times: Vec<f64>,
    pub e1: Vec<f64>,
    pub e2: Vec<f64>,
    /// Quadrature weight of each sample: the step that produced it, and the
    /// nominal step for the initial level.
    pub weights: Vec<f64>,
    /// Nominal time step.
    pub dt: f64,
}

impl ErrorSeries {
    pub fn new(times: Vec<f64>, e1: Vec<f64>, e2: Vec<f64>, weights: Vec<f64>, dt: f64) -> Result<Self> {
        check_len(times.len(), e1.len())?;
        check_len(times.len(), e2.len())?;
        check_len(times.len(), weights.len())?;
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Domain("sample times must increase"));
        }
        if e1.iter().chain(&e2).chain(&weights).any(|x| !(*x >= 0.0)) {
            return Err(Error::Domain("errors and weights must be non-negative"));
        }
        Ok(Self {
            times,
            e1,
            e2,
            weights,
            dt,
        })
    }

    /// Errors of a p-system run, with `E` taken from `schedule` at each
    /// sample time.
    pub fn from_simulation(output: &SimulationOutput, schedule: &OuttakeSchedule) -> Result<Self> {
        let len = output.interface.len();
        let (mut times, mut e1, mut e2, mut weights) = (
            Vec::with_capacity(len),
            Vec::with_capacity(len),
            Vec::with_capacity(len),
            Vec::with_capacity(len),
        );
        for s in &output.interface {
            let (a, b) = coupling_errors(&s.u_left, &s.u_right, schedule.e_value(s.time))?;
            times.push(s.time);
            e1.push(a);
            e2.push(b);
            weights.push(if s.dt > 0.0 { s.dt } else { output.dt });
        }
        Self::new(times, e1, e2, weights, output.dt)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Scales both error components by `c ≥ 0`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            e1: self.e1.iter().map(|x| c * x).collect(),
            e2: self.e2.iter().map(|x| c * x).collect(),
            ..self.clone()
        }
    }
}

/// Time-discrete `L¹` norms `Σ_k Δt_k Eⁱ(t^k)` over samples up to `horizon`.
pub fn l1_time_norm(series: &ErrorSeries, horizon: f64) -> Result<(f64, f64)> {
    let covered = series.times.last().copied().unwrap_or(f64::NEG_INFINITY);
    if covered < horizon - 1e-9 * horizon.abs().max(1.0) {
        return Err(Error::Domain("error series ends before the horizon"));
    }
    let mut l1 = (0.0, 0.0);
    for k in 0..series.len() {
        if series.times[k] > horizon + 1e-12 {
            break;
        }
        l1.0 += series.weights[k] * series.e1[k];
        l1.1 += series.weights[k] * series.e2[k];
    }
    Ok(l1)
}

/// `EOC_k = log₂(e_k / e_{k+1})` for rows `(cells, error)` on doubling
/// meshes. A vanishing finer error yields `+∞`.
pub fn eoc(rows: &[(usize, f64)]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(rows.len().saturating_sub(1));
    for w in rows.windows(2) {
        let ((n0, e0), (n1, e1)) = (w[0], w[1]);
        if n1 != 2 * n0 {
            return Err(Error::Domain("meshes must double between rows"));
        }
        if !(e0 >= 0.0 && e1 >= 0.0) {
            return Err(Error::Domain("errors must be non-negative"));
        }
        out.push(if e1 == 0.0 {
            f64::INFINITY
        } else {
            libm::log2(e0 / e1)
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn coupling_error_examples() {
        assert_eq!(coupling_errors(&[1.0, 1.0], &[1.0, 1.0], 0.0).unwrap(), (0.0, 0.0));
        let (e1, e2) = coupling_errors(&[1.0, 1.0], &[1.0, 0.4], -0.6).unwrap();
        assert!((e1 - 1.2).abs() < 1e-15);
        assert_eq!(e2, 0.0);
        let (e1, e2) = coupling_errors(&[1.001, 1.0], &[1.0, 1.0], 0.0).unwrap();
        assert_eq!(e1, 0.0);
        assert!((e2 - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn constant_integrand() {
        let dt = 0.01;
        let n = 56;
        let times: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
        let s = ErrorSeries::new(times, vec![2.0; n], vec![1.0; n], vec![dt; n], dt).unwrap();
        let (a, b) = l1_time_norm(&s, 0.55).unwrap();
        assert!((a - 1.1).abs() <= 2.0 * dt + 1e-12);
        assert!((b - 0.55).abs() <= dt + 1e-12);
        assert!(l1_time_norm(&s, 0.6).is_err());
    }

    #[test]
    fn eoc_examples() {
        let halving = eoc(&[(100, 4.0), (200, 2.0), (400, 1.0)]).unwrap();
        assert_eq!(halving, vec![1.0, 1.0]);
        let t1 = eoc(&[(100, 1.278e-2), (200, 6.325e-3)]).unwrap()[0];
        assert!((t1 - 1.01).abs() < 5e-3);
        let t2 = eoc(&[(100, 8.685e-8), (200, 4.307e-8)]).unwrap()[0];
        assert!((t2 - 1.01).abs() < 5e-3);
        assert_eq!(eoc(&[(100, 1.0), (200, 0.0)]).unwrap()[0], f64::INFINITY);
        assert!(eoc(&[(100, 1.0), (300, 0.5)]).is_err());
        assert!(eoc(&[(100, 1.0)]).unwrap().is_empty());
    }
}
