//! Self-contained second-order cone programming solver.

mod cones;
mod equilibrate;
mod ldl;
mod program;
mod solver;

pub use program::{Cone, ConeLayout, ConicProgram, SparseMatrix};
pub use solver::{residuals, solve, KktResiduals, SolverConfig, SolverResult, SolverStatus};
