//! Relaxation-system building blocks: state vectors, the diagonal relaxation
//! matrix, its eigenstructure, characteristic variables and the linear Lax
//! curves through a trace state.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Deref;

use crate::error::{check_len, Error, Result};
use crate::linalg::{symmetric_eigenvalues, Matrix};

/// Conserved-variable vector `U` (or auxiliary vector `V`) of a model of
/// dimension `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVec(Vec<f64>);

impl StateVec {
    /// Rejects empty or non-finite input.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Domain("state vector must have at least one component"));
        }
        if components.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("state vector components must be finite"));
        }
        Ok(Self(components))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    /// Wraps a slice without validation; used on hot paths where finiteness
    /// is checked separately.
    pub fn from_slice(c: &[f64]) -> Self {
        Self(c.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for StateVec {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<StateVec> for Vec<f64> {
    fn from(s: StateVec) -> Self {
        s.0
    }
}

/// Relaxation unknown `Q = (U, V)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxState {
    pub u: StateVec,
    pub v: StateVec,
}

impl RelaxState {
    pub fn new(u: StateVec, v: StateVec) -> Result<Self> {
        check_len(u.dim(), v.dim())?;
        Ok(Self { u, v })
    }

    /// Builds a state from plain slices without finiteness validation.
    pub fn from_slices(u: &[f64], v: &[f64]) -> Self {
        assert_eq!(u.len(), v.len(), "U and V must have equal length");
        Self {
            u: StateVec::from_slice(u),
            v: StateVec::from_slice(v),
        }
    }

    /// Stacks `(U, V)` into a single vector of length `2n`.
    pub fn from_stacked(q: &[f64]) -> Self {
        let n = q.len() / 2;
        Self::from_slices(&q[..n], &q[n..])
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    pub fn stacked(&self) -> Vec<f64> {
        let mut q = Vec::with_capacity(2 * self.dim());
        q.extend_from_slice(&self.u);
        q.extend_from_slice(&self.v);
        q
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(self.v.iter()).all(|x| x.is_finite())
    }

    /// Largest absolute component of `U` and `V`.
    pub fn max_abs(&self) -> f64 {
        self.u.iter().chain(self.v.iter()).fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Diagonal relaxation matrix `A = diag(a_1, ..., a_n)` with `a_j > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxMatrix {
    diag: Vec<f64>,
    sqrt: Vec<f64>,
}

impl RelaxMatrix {
    pub fn new(diag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Domain("relaxation matrix must be non-empty"));
        }
        if diag.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::Domain("relaxation matrix entries must be positive and finite"));
        }
        let sqrt = diag.iter().map(|a| libm::sqrt(*a)).collect();
        Ok(Self { diag, sqrt })
    }

    /// `a I` of dimension `n`.
    pub fn uniform(a: f64, n: usize) -> Result<Self> {
        Self::new(vec![a; n])
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Entry-wise square roots, i.e. the diagonal of `sqrt(A)`.
    pub fn sqrt_diag(&self) -> &[f64] {
        &self.sqrt
    }

    /// Largest characteristic speed `max_j sqrt(a_j)`.
    pub fn max_speed(&self) -> f64 {
        self.sqrt.iter().copied().fold(0.0, f64::max)
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_diag(&self.diag)
    }
}

/// Eigen decomposition `S = R Λ L` of `S = [[0, I], [A, 0]]`.
///
/// Columns and eigenvalues are ordered with the negative block first, each
/// block by component index.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenStructure {
    pub r_minus: Matrix,
    pub r_plus: Matrix,
    pub l_minus: Matrix,
    pub l_plus: Matrix,
    pub lambdas: Vec<f64>,
}

impl EigenStructure {
    /// `[R⁻ R⁺]` as one `2n x 2n` matrix.
    pub fn right(&self) -> Matrix {
        let n = self.r_minus.cols();
        Matrix::from_fn(2 * n, 2 * n, |i, j| {
            if j < n {
                self.r_minus[(i, j)]
            } else {
                self.r_plus[(i, j - n)]
            }
        })
    }

    /// `[L⁻; L⁺]` as one `2n x 2n` matrix.
    pub fn left(&self) -> Matrix {
        let n = self.l_minus.rows();
        Matrix::from_fn(2 * n, 2 * n, |i, j| {
            if i < n {
                self.l_minus[(i, j)]
            } else {
                self.l_plus[(i - n, j)]
            }
        })
    }
}

/// The block matrix `S = [[0, I], [A, 0]]` of the relaxation system.
pub fn system_matrix(a: &RelaxMatrix) -> Matrix {
    let n = a.dim();
    Matrix::from_fn(2 * n, 2 * n, |i, j| {
        if i < n && j == i + n {
            1.0
        } else if i >= n && j == i - n {
            a.diag[j]
        } else {
            0.0
        }
    })
}

pub fn eigenstructure(a: &RelaxMatrix) -> EigenStructure {
    let n = a.dim();
    let s = a.sqrt_diag();
    let mut r_minus = Matrix::zeros(2 * n, n);
    let mut r_plus = Matrix::zeros(2 * n, n);
    let mut l_minus = Matrix::zeros(n, 2 * n);
    let mut l_plus = Matrix::zeros(n, 2 * n);
    for j in 0..n {
        r_minus[(j, j)] = -1.0 / s[j];
        r_minus[(n + j, j)] = 1.0;
        r_plus[(j, j)] = 1.0 / s[j];
        r_plus[(n + j, j)] = 1.0;
        l_minus[(j, j)] = -0.5 * s[j];
        l_minus[(j, n + j)] = 0.5;
        l_plus[(j, j)] = 0.5 * s[j];
        l_plus[(j, n + j)] = 0.5;
    }
    let lambdas = s.iter().map(|x| -x).chain(s.iter().copied()).collect();
    EigenStructure {
        r_minus,
        r_plus,
        l_minus,
        l_plus,
        lambdas,
    }
}

/// Characteristic variables `W∓ = (V ∓ sqrt(A) U) / 2`.
pub fn characteristic_vars(q: &RelaxState, a: &RelaxMatrix) -> Result<(StateVec, StateVec)> {
    check_len(a.dim(), q.dim())?;
    let s = a.sqrt_diag();
    let w_minus = (0..q.dim())
        .map(|j| 0.5 * (q.v[j] - s[j] * q.u[j]))
        .collect();
    let w_plus = (0..q.dim())
        .map(|j| 0.5 * (q.v[j] + s[j] * q.u[j]))
        .collect();
    Ok((StateVec(w_minus), StateVec(w_plus)))
}

/// Inverse of [`characteristic_vars`].
pub fn from_characteristic(
    w_minus: &[f64],
    w_plus: &[f64],
    a: &RelaxMatrix,
) -> Result<RelaxState> {
    check_len(a.dim(), w_minus.len())?;
    check_len(a.dim(), w_plus.len())?;
    let s = a.sqrt_diag();
    let u = (0..a.dim()).map(|j| (w_plus[j] - w_minus[j]) / s[j]).collect();
    let v = (0..a.dim()).map(|j| w_plus[j] + w_minus[j]).collect();
    Ok(RelaxState {
        u: StateVec(u),
        v: StateVec(v),
    })
}

/// Coupling data on the Lax curves through the traces:
/// `Q_R = Q₀⁻ + R₁⁻ Σ⁻` and `Q_L = Q₀⁺ + R₂⁺ Σ⁺`.
pub fn lax_parametrize(
    sigma_minus: &[f64],
    sigma_plus: &[f64],
    q0_minus: &RelaxState,
    q0_plus: &RelaxState,
    a_left: &RelaxMatrix,
    a_right: &RelaxMatrix,
) -> Result<(RelaxState, RelaxState)> {
    let n = q0_minus.dim();
    for len in [
        sigma_minus.len(),
        sigma_plus.len(),
        q0_plus.dim(),
        a_left.dim(),
        a_right.dim(),
    ] {
        check_len(n, len)?;
    }
    let sl = a_left.sqrt_diag();
    let sr = a_right.sqrt_diag();
    let q_r = RelaxState {
        u: StateVec((0..n).map(|j| q0_minus.u[j] - sigma_minus[j] / sl[j]).collect()),
        v: StateVec((0..n).map(|j| q0_minus.v[j] + sigma_minus[j]).collect()),
    };
    let q_l = RelaxState {
        u: StateVec((0..n).map(|j| q0_plus.u[j] + sigma_plus[j] / sr[j]).collect()),
        v: StateVec((0..n).map(|j| q0_plus.v[j] + sigma_plus[j]).collect()),
    };
    Ok((q_r, q_l))
}

/// Projections `L₁⁺ (Q_R − Q₀⁻)` and `L₂⁻ (Q_L − Q₀⁺)`; both vanish exactly
/// when the coupling data lies on the admissible Lax curves.
pub fn lax_membership_defect(
    q_r: &RelaxState,
    q_l: &RelaxState,
    q0_minus: &RelaxState,
    q0_plus: &RelaxState,
    a_left: &RelaxMatrix,
    a_right: &RelaxMatrix,
) -> (Vec<f64>, Vec<f64>) {
    let n = q_r.dim();
    let sl = a_left.sqrt_diag();
    let sr = a_right.sqrt_diag();
    let left = (0..n)
        .map(|j| {
            0.5 * sl[j] * (q_r.u[j] - q0_minus.u[j]) + 0.5 * (q_r.v[j] - q0_minus.v[j])
        })
        .collect();
    let right = (0..n)
        .map(|j| {
            -0.5 * sr[j] * (q_l.u[j] - q0_plus.u[j]) + 0.5 * (q_l.v[j] - q0_plus.v[j])
        })
        .collect();
    (left, right)
}

/// A flux function `F_i` on one half-axis.
pub trait FluxModel {
    fn dim(&self) -> usize;

    /// Writes `F(u)` into `out`.
    fn flux_into(&self, u: &[f64], out: &mut [f64]) -> Result<()>;

    fn jacobian(&self, u: &[f64]) -> Result<Matrix>;

    /// Component-wise lower and upper bounds of the states the model is
    /// meant to be sampled on.
    fn admissible_box(&self) -> (Vec<f64>, Vec<f64>);

    fn flux(&self, u: &[f64]) -> Result<StateVec> {
        let mut out = vec![0.0; self.dim()];
        self.flux_into(u, &mut out)?;
        Ok(StateVec(out))
    }
}

/// Linear flux `F(u) = M u`.
#[derive(Debug, Clone)]
pub struct LinearFlux {
    pub matrix: Matrix,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LinearFlux {
    pub fn new(matrix: Matrix) -> Self {
        let n = matrix.rows();
        Self {
            matrix,
            lower: vec![-1.0; n],
            upper: vec![1.0; n],
        }
    }

    /// `F(u) = c u` in `n` components.
    pub fn scaled_identity(c: f64, n: usize) -> Self {
        Self::new(Matrix::identity(n).scale(c))
    }
}

impl FluxModel for LinearFlux {
    fn dim(&self) -> usize {
        self.matrix.rows()
    }

    fn flux_into(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(self.dim(), u.len())?;
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.matrix.row(i).iter().zip(u).map(|(a, b)| a * b).sum();
        }
        Ok(())
    }

    fn jacobian(&self, u: &[f64]) -> Result<Matrix> {
        check_len(self.dim(), u.len())?;
        Ok(self.matrix.clone())
    }

    fn admissible_box(&self) -> (Vec<f64>, Vec<f64>) {
        (self.lower.clone(), self.upper.clone())
    }
}

/// Tolerance on the smallest eigenvalue of the symmetric part of
/// `A − DF²` below which the subcharacteristic condition counts as violated.
pub const PSD_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SubcharacteristicReport {
    pub ok: bool,
    pub worst_eigenvalue: f64,
    pub worst_state: Option<StateVec>,
}

/// Checks `A − DF(U)² ⪰ 0` on every sample, testing the symmetric part.
pub fn check_subcharacteristic(
    a: &RelaxMatrix,
    model: &dyn FluxModel,
    samples: &[StateVec],
) -> Result<SubcharacteristicReport> {
    let mut worst = f64::INFINITY;
    let mut worst_state = None;
    for u in samples {
        let df = model.jacobian(u)?;
        let m = a.to_matrix().sub(&df.mul(&df));
        let sym = m.add(&m.transpose()).scale(0.5);
        let min = symmetric_eigenvalues(&sym)[0];
        if min < worst {
            worst = min;
            worst_state = Some(u.clone());
        }
    }
    Ok(SubcharacteristicReport {
        ok: worst >= -PSD_TOLERANCE,
        worst_eigenvalue: worst,
        worst_state,
    })
}

/// Largest relative deviation of `model.jacobian` from a central
/// finite difference of `model.flux` with step `h * max(1, |u_k|)`.
pub fn jacobian_fd_error(model: &dyn FluxModel, u: &[f64], h: f64) -> Result<f64> {
    let n = model.dim();
    let exact = model.jacobian(u)?;
    let scale = exact.max_abs().max(1.0);
    let mut worst: f64 = 0.0;
    let mut up = u.to_vec();
    let mut down = u.to_vec();
    for k in 0..n {
        let step = h * u[k].abs().max(1.0);
        up[k] = u[k] + step;
        down[k] = u[k] - step;
        let fp = model.flux(&up)?;
        let fm = model.flux(&down)?;
        for i in 0..n {
            let fd = (fp[i] - fm[i]) / (2.0 * step);
            worst = worst.max((fd - exact[(i, k)]).abs() / scale);
        }
        up[k] = u[k];
        down[k] = u[k];
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-14 * (1.0 + b.abs())
    }

    #[test]
    fn eigenstructure_identity_matrix() {
        let es = eigenstructure(&RelaxMatrix::new(vec![1.0]).unwrap());
        assert_eq!(es.lambdas, vec![-1.0, 1.0]);
        assert_eq!(es.r_minus, Matrix::from_rows(&[&[-1.0], &[1.0]]));
        assert_eq!(es.r_plus, Matrix::from_rows(&[&[1.0], &[1.0]]));
    }

    #[test]
    fn eigenstructure_scalar_four() {
        let es = eigenstructure(&RelaxMatrix::new(vec![4.0]).unwrap());
        assert_eq!(es.lambdas, vec![-2.0, 2.0]);
        assert_eq!(es.l_minus, Matrix::from_rows(&[&[-1.0, 0.5]]));
        assert_eq!(es.l_plus, Matrix::from_rows(&[&[1.0, 0.5]]));
    }

    #[test]
    fn eigenvalue_ordering_two_components() {
        let es = eigenstructure(&RelaxMatrix::new(vec![1.0, 4.0]).unwrap());
        assert_eq!(es.lambdas, vec![-1.0, -2.0, 1.0, 2.0]);
    }

    #[test]
    fn non_positive_entries_are_domain_errors() {
        assert!(matches!(RelaxMatrix::new(vec![1.0, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(RelaxMatrix::new(vec![-2.0]), Err(Error::Domain(_))));
        assert!(matches!(RelaxMatrix::new(vec![f64::NAN]), Err(Error::Domain(_))));
    }

    #[test]
    fn sqrt_entries_square_back() {
        let a = RelaxMatrix::new(vec![146820.4, 2.0, 1e-3]).unwrap();
        for (s, d) in a.sqrt_diag().iter().zip(a.diag()) {
            assert!(close(s * s, *d));
        }
    }

    #[test]
    fn characteristic_examples() {
        let zero = RelaxState::from_slices(&[0.0], &[0.0]);
        let a1 = RelaxMatrix::new(vec![1.0]).unwrap();
        let (wm, wp) = characteristic_vars(&zero, &a1).unwrap();
        assert_eq!((wm[0], wp[0]), (0.0, 0.0));

        let q = RelaxState::from_slices(&[1.0], &[0.0]);
        let (wm, wp) = characteristic_vars(&q, &a1).unwrap();
        assert_eq!((wm[0], wp[0]), (-0.5, 0.5));

        let a4 = RelaxMatrix::new(vec![4.0]).unwrap();
        let q = RelaxState::from_slices(&[1.0], &[2.0]);
        let (wm, wp) = characteristic_vars(&q, &a4).unwrap();
        assert_eq!((wm[0], wp[0]), (0.0, 2.0));
    }

    #[test]
    fn characteristic_dimension_mismatch() {
        let q = RelaxState::from_slices(&[1.0, 2.0], &[0.0, 0.0]);
        let a = RelaxMatrix::new(vec![1.0]).unwrap();
        assert!(matches!(
            characteristic_vars(&q, &a),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn lax_parametrize_examples() {
        let a1 = RelaxMatrix::new(vec![1.0]).unwrap();
        let q0 = RelaxState::from_slices(&[0.3], &[-0.2]);
        let (qr, ql) = lax_parametrize(&[0.0], &[0.0], &q0, &q0, &a1, &a1).unwrap();
        assert_eq!((qr, ql), (q0.clone(), q0.clone()));

        let zero = RelaxState::from_slices(&[0.0], &[0.0]);
        let (qr, _) = lax_parametrize(&[2.0], &[0.0], &zero, &zero, &a1, &a1).unwrap();
        assert_eq!(qr, RelaxState::from_slices(&[-2.0], &[2.0]));

        let a4 = RelaxMatrix::new(vec![4.0]).unwrap();
        let one = RelaxState::from_slices(&[1.0], &[1.0]);
        let (_, ql) = lax_parametrize(&[0.0], &[2.0], &zero, &one, &a4, &a4).unwrap();
        assert_eq!(ql, RelaxState::from_slices(&[2.0], &[3.0]));
    }

    #[test]
    fn subcharacteristic_scalar_examples() {
        let model = LinearFlux::scaled_identity(1.0, 1);
        let samples = [StateVec::new(vec![0.5]).unwrap()];
        let ok = check_subcharacteristic(&RelaxMatrix::new(vec![1.0]).unwrap(), &model, &samples)
            .unwrap();
        assert!(ok.ok);
        assert_eq!(ok.worst_eigenvalue, 0.0);

        let bad = check_subcharacteristic(&RelaxMatrix::new(vec![0.25]).unwrap(), &model, &samples)
            .unwrap();
        assert!(!bad.ok);
        assert!(close(bad.worst_eigenvalue, -0.75));
        assert_eq!(bad.worst_state, Some(samples[0].clone()));
    }

    #[test]
    fn state_vec_validation() {
        assert!(StateVec::new(vec![]).is_err());
        assert!(StateVec::new(vec![1.0, f64::INFINITY]).is_err());
        assert!(RelaxState::new(StateVec::zeros(2), StateVec::zeros(1)).is_err());
    }
}
