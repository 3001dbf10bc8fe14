//! Seed scanning and cone-membership checks shared by the integration tests.

use secure_swipt::channel::{generate_channel_set, ChannelSet};
use secure_swipt::conic::{Cone, ConicProgram};
use secure_swipt::model::{dbm_to_watts, NetworkConfig};
use secure_swipt::sca::{initialize, ExpansionPoint, InitOutcome};

/// Default scenario at the given budget.
pub fn scenario_at(p_dbm: f64) -> NetworkConfig {
    let mut cfg = NetworkConfig::default_scenario();
    cfg.p_th = dbm_to_watts(p_dbm);
    cfg
}

/// First `n` seeds from `start` whose phase 1 succeeds.
pub fn feasible_seeds(cfg: &NetworkConfig, n: usize, start: u64) -> Vec<(u64, ChannelSet, ExpansionPoint)> {
    let mut out = Vec::new();
    let mut seed = start;
    while out.len() < n {
        assert!(seed < start + 50 * n as u64 + 200, "too few feasible seeds");
        let ch = generate_channel_set(cfg, seed).unwrap();
        if let InitOutcome::Feasible { point, .. } = initialize(&ch, cfg).unwrap() {
            out.push((seed, ch, point));
        }
        seed += 1;
    }
    out
}

/// `s = b − Ax`.
pub fn slacks(prog: &ConicProgram, x: &[f64]) -> Vec<f64> {
    let ax = prog.a.mul_vec(x);
    prog.b.iter().zip(&ax).map(|(b, a)| b - a).collect()
}

/// Worst cone violation of `s`, relative to the magnitude of each block.
pub fn worst_cone_violation(prog: &ConicProgram, s: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for (cone, r) in prog.cones.ranges() {
        let v = &s[r];
        let size = v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let viol = match cone {
            Cone::Zero(_) => v.iter().fold(0.0f64, |m, x| m.max(x.abs())),
            Cone::Nonneg(_) => v.iter().fold(0.0f64, |m, x| m.max(-x)),
            Cone::Soc(_) => {
                let tail = v[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
                (tail - v[0]).max(0.0)
            }
        };
        worst = worst.max(viol / size);
    }
    worst
}
