#![allow(dead_code, clippy::needless_range_loop)]

use proptest::prelude::*;
use relaxcouple_core::{Matrix, RelaxMatrix, RelaxState};

/// Gauss–Jordan inverse with full pivoting, written independently of the
/// library's LU.
pub fn gauss_jordan_inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.rows();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut col_perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (mut pi, mut pj, mut best) = (k, k, 0.0);
        for i in k..n {
            for j in k..n {
                if a[i][j].abs() > best {
                    (pi, pj, best) = (i, j, a[i][j].abs());
                }
            }
        }
        if best < 1e-300 {
            return None;
        }
        a.swap(k, pi);
        inv.swap(k, pi);
        for row in a.iter_mut() {
            row.swap(k, pj);
        }
        col_perm.swap(k, pj);
        let p = a[k][k];
        for j in 0..n {
            a[k][j] /= p;
            inv[k][j] /= p;
        }
        for i in 0..n {
            if i != k {
                let f = a[i][k];
                for j in 0..n {
                    a[i][j] -= f * a[k][j];
                    inv[i][j] -= f * inv[k][j];
                }
            }
        }
    }
    // Undo the column permutation, which permutes rows of the inverse.
    let mut out = Matrix::zeros(n, n);
    for (k, &orig) in col_perm.iter().enumerate() {
        for j in 0..n {
            out[(orig, j)] = inv[k][j];
        }
    }
    Some(out)
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn relax_matrix(n: usize) -> impl Strategy<Value = RelaxMatrix> {
    prop::collection::vec(0.25f64..16.0, n).prop_map(|d| RelaxMatrix::new(d).unwrap())
}

pub fn relax_state(n: usize, scale: f64) -> impl Strategy<Value = RelaxState> {
    (
        prop::collection::vec(-scale..scale, n),
        prop::collection::vec(-scale..scale, n),
    )
        .prop_map(|(u, v)| RelaxState::from_slices(&u, &v))
}

/// Traces of the gas-turbine problem: densities near one, moderate
/// momenta and auxiliary variables near equilibrium `V = F(U)`.
pub fn gas_trace(alpha: f64) -> impl Strategy<Value = RelaxState> {
    (0.5f64..1.5, -2.0f64..2.0, -1.0f64..1.0, -50.0f64..50.0).prop_map(move |(rho, m, d1, d2)| {
        RelaxState::from_slices(&[rho, m], &[m + d1, m * m / rho + alpha * rho + d2])
    })
}
