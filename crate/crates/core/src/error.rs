use alloc::boxed::Box;
use core::fmt;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Vectors or matrices whose sizes do not agree.
    DimensionMismatch { expected: usize, found: usize },
    /// Input outside the mathematical domain of an operation.
    Domain(&'static str),
    /// A configuration that cannot be run (bad CFL, odd cell count, ...).
    Config(&'static str),
    /// A matrix that is singular or too ill-conditioned to invert.
    Singular { condition: f64 },
    /// Block LU preconditions violated; a pivoted dense solve is required.
    BlockPivotRequired,
    /// Riemann solver system matrix is singular for this coupling.
    IllPosedCoupling { condition: f64 },
    /// Fixed-point iteration hit its iteration cap.
    NotConverged { iterations: usize, residual: f64 },
    /// Fixed-point iterate became non-finite.
    Diverged { iterations: usize },
    /// Density at the interface fell below the vacuum floor.
    InterfaceVacuum { rho: f64 },
    /// Vacuum state with nonzero momentum.
    Vacuum,
    /// Degenerate linear coefficient in a nodal closed-form solve.
    DegenerateNode { coefficient: f64 },
    /// Non-finite value produced by a time step.
    BlowUp { cell: usize, time: f64 },
    /// A nodal Riemann solver failed during a time step.
    Interface { time: f64, source: Box<Error> },
    /// A step failed; carries the step index.
    Step { step: usize, source: Box<Error> },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Singular { condition } => {
                write!(f, "matrix is singular (condition estimate {condition:e})")
            }
            Error::BlockPivotRequired => write!(
                f,
                "leading block or Schur complement singular; use a pivoted dense solve"
            ),
            Error::IllPosedCoupling { condition } => write!(
                f,
                "Riemann solver ill-posed for this coupling (condition estimate {condition:e})"
            ),
            Error::NotConverged {
                iterations,
                residual,
            } => write!(
                f,
                "fixed-point iteration did not converge in {iterations} iterations (residual {residual:e})"
            ),
            Error::Diverged { iterations } => {
                write!(f, "fixed-point iterate became non-finite after {iterations} iterations")
            }
            Error::InterfaceVacuum { rho } => {
                write!(f, "vacuum at the interface (rho = {rho:e})")
            }
            Error::Vacuum => write!(f, "vacuum state with nonzero momentum"),
            Error::DegenerateNode { coefficient } => {
                write!(f, "ill-posed node: linear coefficient {coefficient:e}")
            }
            Error::BlowUp { cell, time } => {
                write!(f, "non-finite state in cell {cell} at t = {time}")
            }
            Error::Interface { time, source } => {
                write!(f, "interface solve failed at t = {time}: {source}")
            }
            Error::Step { step, source } => write!(f, "step {step} failed: {source}"),
        }
    }
}

impl core::error::Error for Error {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            Error::Interface { source, .. } | Error::Step { source, .. } => Some(source.as_ref()),
            _ => None,
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
