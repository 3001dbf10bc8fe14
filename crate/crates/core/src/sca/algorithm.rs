//! The successive convex approximation loop.

use std::time::Instant;

use serde::Serialize;

use super::init::{initialize_with, InitOutcome};
use super::subproblem::{build_subproblem, lift_expansion_point, ExpansionPoint, ScaConfig};
use crate::channel::ChannelSet;
use crate::conic::{solve, SolverStatus};
use crate::model::{audit, secrecy_margin, BeamformingSolution, ConstraintAudit, NetworkConfig};
use crate::Result;

/// Tolerance used when auditing the returned solution.
pub const AUDIT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaStatus {
    Converged,
    MaxIterations,
    /// A subproblem solve did not reach optimality; the trace stops there.
    SolverFailure,
    /// Phase 1 found no feasible starting point.
    Infeasible,
}

impl ScaStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScaStatus::Converged => "converged",
            ScaStatus::MaxIterations => "max_iterations",
            ScaStatus::SolverFailure => "solver_failure",
            ScaStatus::Infeasible => "infeasible",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScaIteration {
    pub iteration: usize,
    /// Optimal subproblem objective; absent when the solve failed.
    pub objective: Option<f64>,
    /// Secrecy rate of the subproblem's beamformers.
    pub secrecy_rate: Option<f64>,
    pub solver_status: SolverStatus,
    pub solver_iterations: usize,
    /// Expansion point the subproblem was built around.
    pub expansion: ExpansionPoint,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScaTrace {
    pub status: ScaStatus,
    pub with_an: bool,
    pub init_secrecy_rate: Option<f64>,
    /// Subproblem objective at the lifted starting point.
    pub init_objective: Option<f64>,
    pub iterations: Vec<ScaIteration>,
    /// Best audited iterate by secrecy rate, the starting point included.
    pub solution: Option<BeamformingSolution>,
    /// Iteration that produced `solution`; `None` for the starting point.
    pub best_iteration: Option<usize>,
    /// Secrecy rate of `solution`, clamped at zero.
    pub secrecy_rate: f64,
    /// True when the IR rate does not exceed the best eavesdropper rate.
    pub secrecy_infeasible: bool,
    pub audit: Option<ConstraintAudit>,
    /// Steps whose objective dropped by more than ten times the solver tolerance.
    pub monotonicity_violations: usize,
    pub num_vars: usize,
    pub num_rows: usize,
    pub message: Option<String>,
    /// Seconds spent in phase 1 and in the loop.
    #[serde(skip)]
    pub wall_time: f64,
}

impl ScaTrace {
    pub fn objectives(&self) -> Vec<f64> {
        self.iterations.iter().filter_map(|it| it.objective).collect()
    }

    pub fn converged(&self) -> bool {
        self.status == ScaStatus::Converged
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Runs the full scheme (beamformers and AN).
pub fn run_sca(ch: &ChannelSet, cfg: &NetworkConfig, scfg: &ScaConfig) -> Result<ScaTrace> {
    run_sca_with(ch, cfg, scfg, true)
}

/// Phase 1 followed by the SCA loop; `with_an = false` removes the AN vector.
pub fn run_sca_with(ch: &ChannelSet, cfg: &NetworkConfig, scfg: &ScaConfig, with_an: bool) -> Result<ScaTrace> {
    let start = Instant::now();
    scfg.validate()?;
    let mut trace = ScaTrace {
        status: ScaStatus::Infeasible,
        with_an,
        init_secrecy_rate: None,
        init_objective: None,
        iterations: Vec::new(),
        solution: None,
        best_iteration: None,
        secrecy_rate: 0.0,
        secrecy_infeasible: false,
        audit: None,
        monotonicity_violations: 0,
        num_vars: 0,
        num_rows: 0,
        message: None,
        wall_time: 0.0,
    };
    let (mut point, init_rate) = match initialize_with(ch, cfg, with_an, &scfg.solver)? {
        InitOutcome::Feasible { point, secrecy_rate } => (point, secrecy_rate),
        InitOutcome::Infeasible { reason } => {
            trace.message = Some(reason);
            trace.wall_time = start.elapsed().as_secs_f64();
            return Ok(trace);
        }
    };
    trace.init_secrecy_rate = Some(init_rate);
    let mut best = point.solution();
    let mut best_margin = secrecy_margin(&best, ch, cfg);
    let tol = 10.0 * scfg.solver.tol_gap.max(scfg.solver.tol_feas);
    let mut prev: Option<f64> = None;
    trace.status = ScaStatus::MaxIterations;

    for n in 0..scfg.max_iters {
        let sp = build_subproblem(ch, cfg, &point, scfg, with_an)?;
        if n == 0 {
            trace.num_vars = sp.program.num_vars();
            trace.num_rows = sp.program.num_rows();
            let x0 = lift_expansion_point(&sp, ch, cfg, &point);
            let obj0 = sp.objective(&x0);
            trace.init_objective = Some(obj0);
            prev = Some(obj0);
        }
        let res = solve(&sp.program, &scfg.solver)?;
        if !res.status.has_solution() {
            trace.iterations.push(ScaIteration {
                iteration: n,
                objective: None,
                secrecy_rate: None,
                solver_status: res.status,
                solver_iterations: res.iterations,
                expansion: point.clone(),
            });
            trace.status = ScaStatus::SolverFailure;
            trace.message = Some(format!("subproblem {n} ended with status {}", res.status.as_str()));
            break;
        }
        let obj = sp.objective(&res.x);
        let sol = sp.solution(&res.x);
        trace.iterations.push(ScaIteration {
            iteration: n,
            objective: Some(obj),
            secrecy_rate: Some(secrecy_margin(&sol, ch, cfg).max(0.0)),
            solver_status: res.status,
            solver_iterations: res.iterations,
            expansion: point.clone(),
        });
        point = sp.expansion_point(&res.x);
        let margin = secrecy_margin(&sol, ch, cfg);
        if margin > best_margin && audit(&sol, ch, cfg, AUDIT_TOL)?.feasible {
            best = sol;
            best_margin = margin;
            trace.best_iteration = Some(n);
        }
        if let Some(p) = prev {
            let scale = p.abs().max(1.0);
            if obj < p - tol * scale {
                trace.monotonicity_violations += 1;
            }
            if (obj - p).abs() <= scfg.eps_sca * scale {
                trace.status = ScaStatus::Converged;
                break;
            }
        }
        prev = Some(obj);
    }

    trace.secrecy_rate = best_margin.max(0.0);
    trace.secrecy_infeasible = best_margin <= 0.0;
    trace.audit = Some(audit(&best, ch, cfg, AUDIT_TOL)?);
    trace.solution = Some(best);
    trace.wall_time = start.elapsed().as_secs_f64();
    Ok(trace)
}
