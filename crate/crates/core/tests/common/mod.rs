//! Test-only oracles, independent of the crate's solver and evaluators.
#![allow(dead_code)]

pub mod analytic;
pub mod barrier;
pub mod instances;
pub mod sca_util;
pub mod socp_gen;
