//! Successive convex approximation of the secrecy-rate maximisation.

mod algorithm;
pub mod expr;
mod init;
mod layout;
pub mod lift;
mod subproblem;

pub use algorithm::{run_sca, run_sca_with, ScaIteration, ScaStatus, ScaTrace, AUDIT_TOL};
pub use init::{initialize, initialize_with, mbs_power_min, InitOutcome};
pub use layout::SubproblemLayout;
pub use lift::{quad_over_lin_minorant, real_lift, taylor_quadratic_minorant, Affine, RealLift};
pub use subproblem::{
    build_subproblem, exp_chain_values, exp_soc_block, hyperbolic_balanced, hyperbolic_rows, lift_expansion_point,
    mu_sinr_soc, Beams, EhMode, ExpansionPoint, ObjectiveMode, ScaConfig, Subproblem,
};
