//! Convex quadratic programming kernel.

mod problem;
mod solver;

pub use problem::{kkt_residuals, KktResiduals, QpProblem, QpSolution, QpStatus};
pub use solver::{phase1_feasible, solve_qp, solve_qp_with, SolverOptions};
