//! Scorecard development by divergence maximization.
//!
//! Builds credit-style scorecards whose attribute weights maximize the
//! divergence between good and bad score distributions, subject to
//! score-engineering constraints (centering, fixed weights, monotone
//! patterns, in-weights, range targets). Every formulation reduces to
//! a convex quadratic program solved by a dense primal active-set
//! method; weight-of-evidence scale is restored analytically or via a
//! one-dimensional root search.

pub mod config;
pub mod constraints;
pub mod data;
pub mod error;
pub mod fixtures;
pub mod layout;
pub mod linalg;
pub mod moments;
pub mod problems;
pub mod qp;
pub mod report;

pub use config::RunConfig;
pub use constraints::ConstraintSet;
pub use data::Dataset;
pub use error::{Error, Result};
pub use layout::{EngineeringSpec, ScorecardLayout};
pub use moments::MomentSet;
pub use problems::{ProblemKind, ScorecardSolution};
pub use qp::{solve_qp, QpProblem, QpSolution, QpStatus};
