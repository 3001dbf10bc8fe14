use std::process::Command;

use secure_swipt::baselines::Scheme;
use secure_swipt::harness::*;
use secure_swipt::sca::SubproblemLayout;

fn small_sweep() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.trials = 4;
    cfg.seed = 3;
    cfg.sweep_p_th_dbm = vec![40.0, 45.0];
    cfg.jobs = 2;
    cfg
}

#[test]
fn identical_config_gives_identical_rows_for_any_pool_size() {
    let cfg = small_sweep();
    let a = sweep_power(&cfg).unwrap();
    let b = sweep_power(&ExperimentConfig { jobs: 1, ..cfg.clone() }).unwrap();
    assert_eq!(a.rows, b.rows);
    assert_eq!(a.rows.len(), 2 * 4 * 3);
}

#[test]
fn rows_respect_the_iteration_cap_and_report_their_feasibility() {
    let cfg = small_sweep();
    let out = sweep_power(&cfg).unwrap();
    for r in &out.rows {
        assert!(r.iterations <= cfg.sca.max_iters);
        if r.feasible {
            let v = r.worst_violation.expect("feasible rows carry an audit");
            assert!(v <= 1e-6, "{r:?}");
            assert!(r.secrecy_rate >= 0.0);
        } else {
            assert_eq!(r.secrecy_rate, 0.0);
        }
        if r.scheme == Scheme::Zf {
            assert_eq!(r.iterations, 0);
        }
    }
    assert_eq!(out.rows.len(), out.timings.len());
}

#[test]
fn tables_round_trip_and_reaggregate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_sweep();
    let out = sweep_power(&cfg).unwrap();
    let summary = summarize("sweep-power", &cfg, &out);
    emit_outputs(dir.path(), &summary, &out).unwrap();

    let text = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), RESULTS_HEADER);
    let rows = read_results(&dir.path().join("results.csv")).unwrap();
    assert_eq!(rows, out.rows);
    assert_eq!(aggregate(&rows), summary.aggregates);
    let timings = read_timings(&dir.path().join("timings.csv")).unwrap();
    assert_eq!(timings.len(), out.timings.len());

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(json["metadata"]["rows"], rows.len());
    assert_eq!(json["aggregates"].as_array().unwrap().len(), 2 * 3);
    assert_eq!(json["config"]["trials"], 4);
}

#[test]
fn aggregates_count_infeasible_rows_as_zero() {
    let row = |seed, feasible, rate| ResultRow {
        axis: Axis::PThDbm,
        sweep_value: 40.0,
        seed,
        scheme: Scheme::Proposed,
        status: if feasible { "converged" } else { "infeasible" }.into(),
        feasible,
        secrecy_rate: rate,
        iterations: 3,
        worst_violation: None,
        num_vars: 1,
        num_rows: 1,
    };
    let a = &aggregate(&[row(0, true, 2.0), row(1, true, 4.0), row(2, false, 0.0), row(3, false, 0.0)])[0];
    assert_eq!((a.trials, a.feasible, a.converged), (4, 2, 2));
    assert_eq!(a.mean_rate, Some(3.0));
    assert!((a.stderr_rate.unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(a.mean_rate_all, 1.5);
    assert_eq!(median(&[3.0, 1.0, 2.0, 10.0]), Some(2.5));
    assert_eq!(mean_stderr(&[]), None);
}

#[test]
fn config_files_and_overrides() {
    let text =
        "# budget sweep\nnetwork.p_th_dbm = 45\nrun.trials = 7\nrun.schemes = proposed, zf\nsweep.p_th_dbm = 30, 35\n";
    let mut cfg = ExperimentConfig::parse_str(text).unwrap();
    assert_eq!(cfg.p_th_dbm, 45.0);
    assert_eq!(cfg.trials, 7);
    assert_eq!(cfg.schemes, vec![Scheme::Proposed, Scheme::Zf]);
    assert_eq!(cfg.sweep_p_th_dbm, vec![30.0, 35.0]);
    cfg.apply_override("sca.q=4").unwrap();
    assert_eq!(cfg.sca.q, 4);
    assert_eq!(ExperimentConfig::parse_str(&cfg.to_text()).unwrap().to_text(), cfg.to_text());
    assert!(cfg.apply_override("sca.q").is_err());
    assert!(cfg.apply_override("network.unknown=1").is_err());
    assert!(ExperimentConfig::parse_str("network.n_f = 1\n").and_then(|c| c.validate()).is_err());
}

#[test]
fn k_sweep_counts_follow_the_layout() {
    let mut cfg = ExperimentConfig::default();
    cfg.trials = 2;
    cfg.sweep_k = vec![1, 4];
    cfg.jobs = 1;
    let out = runtime_vs_k(&cfg).unwrap();
    for r in &out.rows {
        let k = r.sweep_value as usize;
        let (m, q, n) = (cfg.m, cfg.sca.q, cfg.sweep_k_n_f);
        assert_eq!(r.num_vars, SubproblemLayout::predicted_vars(m, k, cfg.n_m, n, q, true));
        assert_eq!(r.num_rows, SubproblemLayout::predicted_rows(m, k, cfg.n_m, n, q, true));
    }
    let v1 = out.rows.iter().find(|r| r.sweep_value == 1.0).unwrap().num_vars;
    let v4 = out.rows.iter().find(|r| r.sweep_value == 4.0).unwrap().num_vars;
    assert!(v4 > v1);
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_secure-swipt")).args(args).output().unwrap()
}

#[test]
fn cli_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let o = cli(&[
            "run",
            "--seed",
            "3",
            "--trials",
            "2",
            "--set",
            "network.p_th_dbm=45",
            "--traces",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(std::fs::read(out.join("results.csv")).unwrap());
        assert!(out.join("summary.json").exists());
        assert!(out.join("trace_3.json").exists());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn cli_rejects_bad_input() {
    let o = cli(&["run", "--scheme", "sdr"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("sdr"));
    let o = cli(&["sweep-power", "--set", "run.trials=0"]);
    assert!(!o.status.success());
}
