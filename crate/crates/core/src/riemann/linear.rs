use alloc::vec::Vec;

use super::general::CouplingFunction;
use super::{split_sigma, trace_scale, NodalSolver, RiemannSolution};
use crate::error::{check_len, Error, Result};
use crate::linalg::{norm_inf, Matrix, MAX_CONDITION};
use crate::relax::{lax_parametrize, RelaxMatrix, RelaxState, StateVec};

/// Affine-linear coupling `Ψ_Q = B_R Q_R − B_L Q_L − P`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCoupling {
    pub b_r: Matrix,
    pub b_l: Matrix,
    pub p: Vec<f64>,
}

impl LinearCoupling {
    pub fn new(b_r: Matrix, b_l: Matrix, p: Vec<f64>) -> Result<Self> {
        let m = p.len();
        if m == 0 || m % 2 != 0 {
            return Err(Error::Domain("coupling vector length must be 2n with n >= 1"));
        }
        for (r, c) in [(b_r.rows(), b_r.cols()), (b_l.rows(), b_l.cols())] {
            check_len(m, r)?;
            check_len(m, c)?;
        }
        Ok(Self { b_r, b_l, p })
    }

    /// `Q_R − Q_L = P`.
    pub fn identity(p: Vec<f64>) -> Result<Self> {
        let m = p.len();
        Self::new(Matrix::identity(m), Matrix::identity(m), p)
    }

    /// Kirchhoff condition `Q_R = Q_L` in `n` components.
    pub fn kirchhoff(n: usize) -> Self {
        Self::identity(alloc::vec![0.0; 2 * n]).expect("valid shapes")
    }

    pub fn dim(&self) -> usize {
        self.p.len() / 2
    }

    /// `B = B_R R̃⁻ − B_L R̃⁺`.
    pub fn system_matrix(&self, a_left: &RelaxMatrix, a_right: &RelaxMatrix) -> Matrix {
        self.b_r
            .mul(&truncated_r_minus(a_left))
            .sub(&self.b_l.mul(&truncated_r_plus(a_right)))
    }
}

impl CouplingFunction for LinearCoupling {
    fn dim(&self) -> usize {
        LinearCoupling::dim(self)
    }

    fn residual(&self, q_r: &RelaxState, q_l: &RelaxState) -> Vec<f64> {
        let r = self.b_r.mul_vec(&q_r.stacked());
        let l = self.b_l.mul_vec(&q_l.stacked());
        r.iter()
            .zip(&l)
            .zip(&self.p)
            .map(|((a, b), p)| a - b - p)
            .collect()
    }

    fn jacobians(&self, _q_r: &RelaxState, _q_l: &RelaxState) -> Option<(Matrix, Matrix)> {
        Some((self.b_r.clone(), self.b_l.scale(-1.0)))
    }
}

/// `R̃⁻ = [R₁⁻ 0]`, mapping `Σ = (Σ⁻, Σ⁺)` to `R₁⁻ Σ⁻`.
pub fn truncated_r_minus(a_left: &RelaxMatrix) -> Matrix {
    let n = a_left.dim();
    let s = a_left.sqrt_diag();
    let mut m = Matrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        m[(j, j)] = -1.0 / s[j];
        m[(n + j, j)] = 1.0;
    }
    m
}

/// `R̃⁺ = [0 R₂⁺]`, mapping `Σ` to `R₂⁺ Σ⁺`.
pub fn truncated_r_plus(a_right: &RelaxMatrix) -> Matrix {
    let n = a_right.dim();
    let s = a_right.sqrt_diag();
    let mut m = Matrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        m[(j, n + j)] = 1.0 / s[j];
        m[(n + j, n + j)] = 1.0;
    }
    m
}

fn solution_from_sigma(
    coupling: &dyn CouplingFunction,
    sigma: &[f64],
    q0_minus: &RelaxState,
    q0_plus: &RelaxState,
    a_left: &RelaxMatrix,
    a_right: &RelaxMatrix,
    iterations: usize,
) -> Result<RiemannSolution> {
    let (sigma_minus, sigma_plus) = split_sigma(sigma);
    let (q_r, q_l) = lax_parametrize(&sigma_minus, &sigma_plus, q0_minus, q0_plus, a_left, a_right)?;
    let residual_norm = norm_inf(&coupling.residual(&q_r, &q_l)) / trace_scale(q0_minus, q0_plus);
    Ok(RiemannSolution {
        q_r,
        q_l,
        sigma_minus,
        sigma_plus,
        residual_norm,
        iterations,
    })
}

/// Explicit Riemann solver for an affine-linear coupling: solves
/// `(B_R R̃⁻ − B_L R̃⁺) Σ = P + B_L Q₀⁺ − B_R Q₀⁻`.
pub fn solve_linear(
    c: &LinearCoupling,
    q0_minus: &RelaxState,
    q0_plus: &RelaxState,
    a_left: &RelaxMatrix,
    a_right: &RelaxMatrix,
) -> Result<RiemannSolution> {
    let n = c.dim();
    for len in [q0_minus.dim(), q0_plus.dim(), a_left.dim(), a_right.dim()] {
        check_len(n, len)?;
    }
    let b = c.system_matrix(a_left, a_right);
    let lu = b
        .lu()
        .map_err(|_| Error::IllPosedCoupling { condition: f64::INFINITY })?;
    let condition = b.norm_inf() * lu.inverse().norm_inf();
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllPosedCoupling { condition });
    }
    let bl_q = c.b_l.mul_vec(&q0_plus.stacked());
    let br_q = c.b_r.mul_vec(&q0_minus.stacked());
    let rhs: Vec<f64> = (0..2 * n).map(|i| c.p[i] + bl_q[i] - br_q[i]).collect();
    let mut sigma = lu.solve(&rhs);
    // One step of iterative refinement.
    let bs = b.mul_vec(&sigma);
    let defect: Vec<f64> = (0..2 * n).map(|i| rhs[i] - bs[i]).collect();
    for (s, d) in sigma.iter_mut().zip(lu.solve(&defect)) {
        *s += d;
    }
    solution_from_sigma(c, &sigma, q0_minus, q0_plus, a_left, a_right, 0)
}

/// Inverse of `B = [[B¹¹, B¹²], [B²¹, B²²]]` through its block LU
/// factorization with Schur complement `S = B²² − B²¹ (B¹¹)⁻¹ B¹²`.
///
/// Fails with [`Error::BlockPivotRequired`] when `B¹¹` or `S` is singular;
/// callers then fall back to [`Matrix::inverse`].
pub fn block_lu_inverse(b11: &Matrix, b12: &Matrix, b21: &Matrix, b22: &Matrix) -> Result<Matrix> {
    let n = b11.rows();
    for m in [b11, b12, b21, b22] {
        check_len(n, m.rows())?;
        check_len(n, m.cols())?;
    }
    let b11_inv = b11.inverse().map_err(|_| Error::BlockPivotRequired)?;
    let schur = b22.sub(&b21.mul(&b11_inv).mul(b12));
    let s_inv = schur.inverse().map_err(|_| Error::BlockPivotRequired)?;
    let b21_b11inv = b21.mul(&b11_inv);
    let b11inv_b12 = b11_inv.mul(b12);
    let top_left = b11_inv.add(&b11inv_b12.mul(&s_inv).mul(&b21_b11inv));
    let top_right = b11inv_b12.mul(&s_inv).scale(-1.0);
    let bottom_left = s_inv.mul(&b21_b11inv).scale(-1.0);
    Ok(Matrix::from_blocks(&top_left, &top_right, &bottom_left, &s_inv))
}

/// Closed-form solver for the Kirchhoff condition `Q_R = Q_L` with a common
/// relaxation matrix on both sides.
pub fn solve_kirchhoff(
    q0_minus: &RelaxState,
    q0_plus: &RelaxState,
    a: &RelaxMatrix,
) -> Result<RiemannSolution> {
    let n = a.dim();
    check_len(n, q0_minus.dim())?;
    check_len(n, q0_plus.dim())?;
    let s = a.sqrt_diag();
    let (um, vm, up, vp) = (&q0_minus.u, &q0_minus.v, &q0_plus.u, &q0_plus.v);
    let u: Vec<f64> = (0..n)
        .map(|j| 0.5 * (um[j] + up[j]) + 0.5 * (vm[j] - vp[j]) / s[j])
        .collect();
    let v: Vec<f64> = (0..n)
        .map(|j| 0.5 * (vm[j] + vp[j]) + 0.5 * s[j] * (um[j] - up[j]))
        .collect();
    let sigma_minus: Vec<f64> = (0..n).map(|j| v[j] - vm[j]).collect();
    let sigma_plus: Vec<f64> = (0..n).map(|j| v[j] - vp[j]).collect();
    let q = RelaxState::from_slices(&u, &v);
    // Q_R and Q_L are the same vector, so the residual vanishes identically.
    Ok(RiemannSolution {
        q_r: q.clone(),
        q_l: q,
        sigma_minus: StateVec::from_slice(&sigma_minus),
        sigma_plus: StateVec::from_slice(&sigma_plus),
        residual_norm: 0.0,
        iterations: 0,
    })
}

/// [`solve_kirchhoff`] as a [`NodalSolver`].
#[derive(Debug, Clone)]
pub struct KirchhoffSolver {
    pub a: RelaxMatrix,
}

impl NodalSolver for KirchhoffSolver {
    fn solve(&self, _time: f64, q0_minus: &RelaxState, q0_plus: &RelaxState) -> Result<RiemannSolution> {
        solve_kirchhoff(q0_minus, q0_plus, &self.a)
    }
}

/// [`solve_linear`] for a fixed coupling as a [`NodalSolver`].
#[derive(Debug, Clone)]
pub struct LinearSolver {
    pub coupling: LinearCoupling,
    pub a_left: RelaxMatrix,
    pub a_right: RelaxMatrix,
}

impl NodalSolver for LinearSolver {
    fn solve(&self, _time: f64, q0_minus: &RelaxState, q0_plus: &RelaxState) -> Result<RiemannSolution> {
        solve_linear(&self.coupling, q0_minus, q0_plus, &self.a_left, &self.a_right)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn a(x: f64) -> RelaxMatrix {
        RelaxMatrix::new(vec![x]).unwrap()
    }

    #[test]
    fn already_coupled_traces_are_fixed() {
        let q = RelaxState::from_slices(&[0.7, -1.2], &[3.0, 0.4]);
        let am = RelaxMatrix::new(vec![2.0, 5.0]).unwrap();
        let sol = solve_linear(&LinearCoupling::kirchhoff(2), &q, &q, &am, &am).unwrap();
        assert!(norm_inf(&sol.sigma_minus) < 1e-15 && norm_inf(&sol.sigma_plus) < 1e-15);
        assert_eq!(sol.q_r, q);
        assert_eq!(sol.q_l, q);
    }

    #[test]
    fn scalar_kirchhoff_hand_values() {
        let qm = RelaxState::from_slices(&[1.0], &[0.0]);
        let qp = RelaxState::from_slices(&[0.0], &[0.0]);
        let expected = RelaxState::from_slices(&[0.5], &[0.5]);
        let lin = solve_linear(&LinearCoupling::kirchhoff(1), &qm, &qp, &a(1.0), &a(1.0)).unwrap();
        assert_eq!(lin.q_r, expected);
        assert_eq!(lin.q_l, expected);
        let k = solve_kirchhoff(&qm, &qp, &a(1.0)).unwrap();
        assert_eq!(k.q_r, expected);
        assert_eq!(k.q_l, expected);

        let qp = RelaxState::from_slices(&[0.0], &[2.0]);
        let k = solve_kirchhoff(&qm, &qp, &a(4.0)).unwrap();
        assert_eq!(k.q_r, RelaxState::from_slices(&[0.0], &[2.0]));
        assert_eq!(k.q_l, k.q_r);
    }

    #[test]
    fn kirchhoff_constant_data() {
        let q = RelaxState::from_slices(&[1.5, -0.25], &[2.0, 7.0]);
        let k = solve_kirchhoff(&q, &q, &RelaxMatrix::new(vec![3.0, 9.0]).unwrap()).unwrap();
        assert_eq!(k.q_r, q);
        assert_eq!(k.q_l, q);
    }

    #[test]
    fn singular_system_matrix_is_ill_posed() {
        // B_R = B_L = 0 leaves Σ undetermined.
        let c = LinearCoupling::new(Matrix::zeros(2, 2), Matrix::zeros(2, 2), vec![0.0, 0.0]).unwrap();
        let q = RelaxState::from_slices(&[1.0], &[1.0]);
        assert!(matches!(
            solve_linear(&c, &q, &q, &a(1.0), &a(1.0)),
            Err(Error::IllPosedCoupling { .. })
        ));
        // Only U is coupled: the V rows vanish.
        let half = Matrix::from_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let c = LinearCoupling::new(half.clone(), half, vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            solve_linear(&c, &q, &q, &a(1.0), &a(1.0)),
            Err(Error::IllPosedCoupling { .. })
        ));
    }

    #[test]
    fn block_lu_identity_and_hand_inverse() {
        let i = Matrix::identity(2);
        let z = Matrix::zeros(2, 2);
        assert_eq!(block_lu_inverse(&i, &z, &z, &i).unwrap(), Matrix::identity(4));

        let two = Matrix::from_rows(&[&[2.0]]);
        let one = Matrix::from_rows(&[&[1.0]]);
        let inv = block_lu_inverse(&two, &one, &one, &one).unwrap();
        let expected = Matrix::from_rows(&[&[1.0, -1.0], &[-1.0, 2.0]]);
        assert!(inv.sub(&expected).max_abs() < 1e-15);
    }

    #[test]
    fn block_lu_requires_regular_leading_block() {
        let z = Matrix::zeros(1, 1);
        let one = Matrix::from_rows(&[&[1.0]]);
        // [[0, 1], [1, 0]] is regular but needs a row swap.
        assert_eq!(
            block_lu_inverse(&z, &one, &one, &z),
            Err(Error::BlockPivotRequired)
        );
        // Regular B¹¹ with singular Schur complement.
        assert_eq!(
            block_lu_inverse(&one, &one, &one, &one),
            Err(Error::BlockPivotRequired)
        );
    }

    #[test]
    fn system_matrix_matches_block_form() {
        let al = RelaxMatrix::new(vec![4.0, 9.0]).unwrap();
        let ar = RelaxMatrix::new(vec![1.0, 16.0]).unwrap();
        let b_r = Matrix::from_fn(4, 4, |i, j| (i * 4 + j) as f64 * 0.1 + if i == j { 1.0 } else { 0.0 });
        let b_l = Matrix::from_fn(4, 4, |i, j| (i as f64 - j as f64) * 0.3);
        let c = LinearCoupling::new(b_r.clone(), b_l.clone(), vec![0.0; 4]).unwrap();
        let b = c.system_matrix(&al, &ar);
        let sl_inv = Matrix::from_diag(&[0.5, 1.0 / 3.0]);
        let sr_inv = Matrix::from_diag(&[1.0, 0.25]);
        let blk = |m: &Matrix, r, c| m.block(r, c, 2);
        let b11 = blk(&b_r, 0, 2).sub(&blk(&b_r, 0, 0).mul(&sl_inv));
        let b12 = blk(&b_l, 0, 2).scale(-1.0).sub(&blk(&b_l, 0, 0).mul(&sr_inv));
        let b21 = blk(&b_r, 2, 2).sub(&blk(&b_r, 2, 0).mul(&sl_inv));
        let b22 = blk(&b_l, 2, 2).scale(-1.0).sub(&blk(&b_l, 2, 0).mul(&sr_inv));
        let expected = Matrix::from_blocks(&b11, &b12, &b21, &b22);
        assert!(b.sub(&expected).max_abs() < 1e-15);
    }
}
