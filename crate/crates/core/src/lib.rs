//! Relaxation schemes for hyperbolic systems coupled at a point interface.
//!
//! Two systems `U_t + F₁(U)_x = 0` on `x < 0` and `U_t + F₂(U)_x = 0` on
//! `x > 0` are joined by a coupling condition at `x = 0`. The Jin–Xin
//! relaxation turns both into linear transport, so the interface problem
//! becomes a nodal Riemann problem for a linear system ([`riemann`]). The
//! finite-volume schemes in [`scheme`] use it at the interface; the
//! [`psystem`] module instantiates everything for a gas pipe with a
//! prescribed outtake and [`diagnostics`] measures how well the coupling is
//! met.

#![no_std]
// `!(x > y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod diagnostics;
pub mod error;
pub mod linalg;
pub mod psystem;
pub mod relax;
pub mod riemann;
pub mod scheme;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use relax::{FluxModel, RelaxMatrix, RelaxState, StateVec};
pub use riemann::{NodalSolver, RiemannSolution};
pub use scheme::{CoupledProblem, Grid, GridState, SchemeConfig};
