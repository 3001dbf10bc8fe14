mod common;

use common::instances::{feasible_seeds, scenario_at, slacks, worst_cone_violation};
use common::sca_util::{abs2, cn, exp_block_bound, hyperbolic_member, random_point, tight_rows};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use secure_swipt::channel::generate_channel_set;
use secure_swipt::conic::{solve, SolverConfig};
use secure_swipt::model::*;
use secure_swipt::sca::lift::stack;
use secure_swipt::sca::*;

#[test]
fn taylor_minorant_is_tangent_and_below() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10_000 {
        let n = rng.random_range(1..6);
        let a = cn(&mut rng, n);
        let w_ref = cn(&mut rng, n);
        let w = cn(&mut rng, n);
        let f = taylor_quadratic_minorant(&a, &w_ref);
        let exact_ref = abs2(&a, &w_ref);
        assert!((f.eval(&stack(&w_ref)) - exact_ref).abs() <= 1e-12 * exact_ref.max(1.0));
        assert!(f.eval(&stack(&w)) <= abs2(&a, &w) + 1e-12);
    }
}

#[test]
fn quad_over_lin_minorant_is_tangent_and_below() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10_000 {
        let (mu_r, eta_r) = (rng.random_range(-5.0..5.0), rng.random_range(0.01..5.0));
        let (mu, eta) = (rng.random_range(-5.0..5.0), rng.random_range(0.01..5.0));
        let (a, b) = quad_over_lin_minorant(mu_r, eta_r);
        let exact_ref = mu_r * mu_r / eta_r;
        assert!((a * mu_r + b * eta_r - exact_ref).abs() <= 1e-12 * exact_ref.max(1.0));
        assert!(a * mu + b * eta <= mu * mu / eta + 1e-12);
    }
}

#[test]
fn real_lift_matches_complex_inner_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let a = cn(&mut rng, 4);
        let b = cn(&mut rng, 4);
        let w = cn(&mut rng, 4);
        let direct = inner(&a, &w);
        let (re, im) = real_lift(&a).eval(&stack(&w));
        assert!((re - direct.re).abs() < 1e-14 && (im - direct.im).abs() < 1e-14);
        let sum: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let (la, lb, ls) = (real_lift(&a), real_lift(&b), real_lift(&sum));
        for j in 0..8 {
            assert!((ls.re[j] - la.re[j] - lb.re[j]).abs() < 1e-15);
            assert!((ls.im[j] - la.im[j] - lb.im[j]).abs() < 1e-15);
        }
    }
}

#[test]
fn hyperbolic_cone_is_the_product_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    assert!(hyperbolic_member(0.0, 0.0, 0.0));
    assert!(hyperbolic_member(2.0, 1.0, 4.0));
    assert!(!hyperbolic_member(2.0, 1.0, 3.9));
    for _ in 0..100_000 {
        // integer data keeps both tests exact in floating point
        let z = rng.random_range(-40i64..=40) as f64;
        let x = rng.random_range(0i64..=40) as f64;
        let y = rng.random_range(0i64..=40) as f64;
        assert_eq!(hyperbolic_member(z, x, y), z * z <= x * y, "({z}, {x}, {y})");
    }
}

#[test]
fn exp_block_tracks_powers_of_two() {
    for i in 0..=16 {
        let c = 0.5 * i as f64;
        let (status, bound) = exp_block_bound(6, c);
        assert!(status.has_solution(), "c = {c}: {status:?}");
        let rel = (bound - 2f64.powf(c)).abs() / 2f64.powf(c);
        assert!(rel <= 1e-3, "c = {c}: bound {bound}, rel {rel:.2e}");
    }
}

#[test]
fn exp_block_error_shrinks_with_order() {
    let err = |q: usize| {
        let (_, bound) = exp_block_bound(q, 8.0);
        (bound - 256.0).abs() / 256.0
    };
    let e: Vec<f64> = [4, 6, 8].iter().map(|&q| err(q)).collect();
    assert!(e[0] > e[1] && e[1] > e[2], "errors {e:?}");
}

#[test]
fn exp_block_admits_zero_rate_for_nonpositive_c() {
    for c in [-3.0, -0.5, 0.0] {
        let (status, bound) = exp_block_bound(6, c);
        assert!(status.has_solution());
        assert!(bound <= 1.0 + 1e-8, "c = {c}: {bound}");
    }
}

#[test]
fn toy_layout_matches_hand_count() {
    let mut cfg = NetworkConfig::default_scenario().with_users(1, 1);
    cfg.n_m = 2;
    cfg.n_f = 2;
    // w_1, w_I, v_E: 3 × 4 reals; γ γ_I γ_E s_I s_1 s_E μ_I η_I t_1 t_1,0 t_e,1 c: 12; τ_0..τ_5: 6
    assert_eq!(SubproblemLayout::predicted_vars(1, 1, 2, 2, 2, true), 30);
    let l = SubproblemLayout::new(1, 1, 2, 2, 2, true);
    assert_eq!(l.num_vars, 30);
    let ch = generate_channel_set(&cfg, 0).unwrap();
    let sol = BeamformingSolution { w_m: vec![ch.h_m[0].clone()], w_i: ch.h_i.clone(), v_e: ch.g_k[0].clone() };
    let pt = ExpansionPoint::from_solution(&sol.scaled(1e3), &ch, &cfg);
    let scfg = ScaConfig { q: 2, ..ScaConfig::default() };
    for with_an in [true, false] {
        let sp = build_subproblem(&ch, &cfg, &pt, &scfg, with_an).unwrap();
        assert_eq!(sp.program.num_vars(), SubproblemLayout::predicted_vars(1, 1, 2, 2, 2, with_an));
        assert_eq!(sp.program.num_rows(), SubproblemLayout::predicted_rows(1, 1, 2, 2, 2, with_an));
    }
}

#[test]
fn default_layout_counts_grow_with_k() {
    let cfg = NetworkConfig::default_scenario();
    for k in 1..=4 {
        let c = NetworkConfig { n_f: 5, ..cfg.clone() }.with_users(2, k);
        let ch = generate_channel_set(&c, 1).unwrap();
        let sol = BeamformingSolution { w_m: ch.h_m.clone(), w_i: ch.h_i.clone(), v_e: ch.g_k[0].clone() };
        let pt = ExpansionPoint::from_solution(&sol, &ch, &c);
        let sp = build_subproblem(&ch, &c, &pt, &ScaConfig::default(), true).unwrap();
        assert_eq!(sp.program.num_vars(), SubproblemLayout::predicted_vars(2, k, 10, 5, 6, true));
        assert_eq!(sp.program.num_rows(), SubproblemLayout::predicted_rows(2, k, 10, 5, 6, true));
        assert_eq!(sp.layout.num_vars, sp.program.num_vars());
    }
}

#[test]
fn minorant_rows_are_tight_at_the_expansion_point() {
    let cfg = NetworkConfig::default_scenario();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..20 {
        let ch = generate_channel_set(&cfg, seed).unwrap();
        let pt = random_point(&mut rng, &ch, &cfg);
        for mode in [ObjectiveMode::GammaDiff, ObjectiveMode::Gamma] {
            let scfg = ScaConfig { objective_mode: mode, ..ScaConfig::default() };
            let sp = build_subproblem(&ch, &cfg, &pt, &scfg, true).unwrap();
            let x0 = lift_expansion_point(&sp, &ch, &cfg, &pt);
            let s = slacks(&sp.program, &x0);
            let rows = tight_rows(&sp);
            assert_eq!(rows.len(), 2 + cfg.k * cfg.m + cfg.k + 1);
            for (r, _) in rows {
                let size: f64 = sp.program.b[r].abs()
                    + sp.program.a.triplets().filter(|t| t.0 == r).map(|(_, j, a)| (a * x0[j]).abs()).sum::<f64>();
                assert!(s[r].abs() <= 1e-10 * size.max(1e-300), "row {r}: {} of {size}", s[r]);
            }
        }
    }
}

#[test]
fn initial_points_pass_the_audit_and_lift_feasibly() {
    let cfg = scenario_at(45.0);
    for (seed, ch, pt) in feasible_seeds(&cfg, 5, 0) {
        let a = audit(&pt.solution(), &ch, &cfg, 1e-6).unwrap();
        assert!(a.feasible, "seed {seed}: {a:?}");
        let sp = build_subproblem(&ch, &cfg, &pt, &ScaConfig::default(), true).unwrap();
        let x0 = lift_expansion_point(&sp, &ch, &cfg, &pt);
        let v = worst_cone_violation(&sp.program, &slacks(&sp.program, &x0));
        assert!(v <= 1e-8, "seed {seed}: lifted point violates by {v:.2e}");
    }
}

#[test]
fn one_step_ascent_and_inner_restriction() {
    let cfg = scenario_at(45.0);
    let scfg = ScaConfig::default();
    for (seed, ch, pt) in feasible_seeds(&cfg, 3, 10) {
        let sp = build_subproblem(&ch, &cfg, &pt, &scfg, true).unwrap();
        let x0 = lift_expansion_point(&sp, &ch, &cfg, &pt);
        let r = solve(&sp.program, &scfg.solver).unwrap();
        assert!(r.status.has_solution(), "seed {seed}: {:?}", r.status);
        let (o0, o1) = (sp.objective(&x0), sp.objective(&r.x));
        assert!(o1 >= o0 - 1e-7 * o0.abs().max(1.0), "seed {seed}: {o0} -> {o1}");
        // segment between two feasible points stays feasible; every point on
        // it must satisfy the original constraints
        for i in 0..=10 {
            let t = i as f64 / 10.0;
            let x: Vec<f64> = x0.iter().zip(&r.x).map(|(a, b)| (1.0 - t) * a + t * b).collect();
            let sol = sp.solution(&x);
            let a = audit(&sol, &ch, &cfg, 1e-6).unwrap();
            assert!(a.feasible, "seed {seed}, t = {t}: {a:?}");
            let l = &sp.layout;
            let gi = sp.value(&x, l.gamma_i);
            assert!(gi <= sinr_ir(&sol, &ch, &cfg) * (1.0 + 1e-6) + 1e-9, "seed {seed}: gamma_I above the SINR");
            let ge = sp.value(&x, l.gamma_e);
            for k in 0..cfg.k {
                assert!(sinr_er(&sol, &ch, &cfg, k) <= ge * (1.0 + 1e-6) + 1e-9);
            }
        }
    }
}

#[test]
fn mu_cone_round_trips_through_the_audit() {
    let cfg = NetworkConfig::default_scenario();
    for seed in 0..5 {
        let ch = generate_channel_set(&cfg, seed).unwrap();
        let interference = [1e-9, 3e-10];
        let w_m = mbs_power_min(&ch, &cfg, &interference, &SolverConfig::default()).unwrap().unwrap();
        let sol = BeamformingSolution { w_m, ..BeamformingSolution::zeros(&cfg) };
        for m in 0..cfg.m {
            let h = inner(&ch.h_m[m], &sol.w_m[m]);
            assert!(h.im.abs() <= 1e-12 * h.norm(), "phase not aligned");
            let signal = h.norm_sqr();
            let other: f64 = (0..cfg.m).filter(|&i| i != m).map(|i| inner(&ch.h_m[m], &sol.w_m[i]).norm_sqr()).sum();
            let sinr = signal / (other + interference[m] + cfg.sigma2_m[m]);
            assert!(sinr >= cfg.gamma[m] * (1.0 - 1e-9), "seed {seed}, MU {m}: {sinr}");
        }
    }
}

#[test]
fn phase1_succeeds_without_harvesting_requirements() {
    let mut cfg = scenario_at(45.0);
    cfg.q = vec![0.0; cfg.k];
    let ok = (0..100)
        .filter(|&seed| {
            let ch = generate_channel_set(&cfg, seed).unwrap();
            matches!(initialize(&ch, &cfg).unwrap(), InitOutcome::Feasible { .. })
        })
        .count();
    assert!(ok >= 95, "{ok}/100");
}

#[test]
fn budget_below_macro_floor_is_infeasible() {
    let mut cfg = NetworkConfig::default_scenario();
    let ch = generate_channel_set(&cfg, 3).unwrap();
    let w = mbs_power_min(&ch, &cfg, &[0.0; 2], &SolverConfig::default()).unwrap().unwrap();
    let floor: f64 = w.iter().map(|v| norm_sqr(v)).sum();
    cfg.p_th = 0.5 * floor;
    assert!(matches!(initialize(&ch, &cfg).unwrap(), InitOutcome::Infeasible { .. }));
    let trace = run_sca(&ch, &cfg, &ScaConfig::default()).unwrap();
    assert_eq!(trace.status, ScaStatus::Infeasible);
    assert!(trace.solution.is_none());
}

#[test]
fn without_eavesdroppers_secrecy_equals_ir_rate() {
    let cfg = scenario_at(40.0).with_users(2, 0);
    let ch = generate_channel_set(&cfg, 2).unwrap();
    let trace = run_sca(&ch, &cfg, &ScaConfig::default()).unwrap();
    let sol = trace.solution.as_ref().expect("feasible without harvesting");
    let ir = (1.0 + sinr_ir(sol, &ch, &cfg)).log2();
    assert!((trace.secrecy_rate - ir).abs() <= 1e-12 * ir);
    assert!(trace.audit.as_ref().unwrap().feasible);
}

#[test]
fn sca_is_monotone_and_converges() {
    let cfg = scenario_at(45.0);
    let scfg = ScaConfig::default();
    for (seed, ch, _) in feasible_seeds(&cfg, 4, 20) {
        let t = run_sca(&ch, &cfg, &scfg).unwrap();
        assert_eq!(t.status, ScaStatus::Converged, "seed {seed}: {:?}", t.message);
        assert!(t.iterations.len() <= 30);
        assert_eq!(t.monotonicity_violations, 0, "seed {seed}");
        let mut prev = t.init_objective.unwrap();
        for o in t.objectives() {
            assert!(o >= prev - 1e-7 * prev.abs().max(1.0), "seed {seed}: {prev} -> {o}");
            prev = o;
        }
        assert!(t.audit.as_ref().unwrap().feasible);
        assert!(t.secrecy_rate >= t.init_secrecy_rate.unwrap() - 1e-6);
    }
}

#[test]
fn gamma_mode_raises_the_rate_monotonically() {
    let cfg = scenario_at(45.0);
    let scfg = ScaConfig { objective_mode: ObjectiveMode::Gamma, ..ScaConfig::default() };
    let (seed, ch, _) = feasible_seeds(&cfg, 1, 30).remove(0);
    let t = run_sca(&ch, &cfg, &scfg).unwrap();
    assert_eq!(t.monotonicity_violations, 0, "seed {seed}");
    assert!(t.secrecy_rate >= t.init_secrecy_rate.unwrap() - 1e-6);
}

#[test]
fn trace_serialises_every_iteration() {
    let cfg = scenario_at(45.0);
    let (_, ch, _) = feasible_seeds(&cfg, 1, 0).remove(0);
    let t = run_sca(&ch, &cfg, &ScaConfig { max_iters: 3, ..ScaConfig::default() }).unwrap();
    let v: serde_json::Value = serde_json::from_str(&t.to_json().unwrap()).unwrap();
    assert_eq!(v["iterations"].as_array().unwrap().len(), t.iterations.len());
    assert_eq!(v["status"], t.status.as_str());
    assert!(v["iterations"][0]["expansion"]["w_i"][0].as_array().unwrap().len() == 2);
}

#[test]
fn layout_variable_map_names_every_index() {
    let l = SubproblemLayout::new(2, 2, 10, 4, 6, true);
    let names = l.variable_names();
    assert_eq!(names.len(), l.num_vars);
    let unique: std::collections::HashSet<_> = names.iter().collect();
    assert_eq!(unique.len(), names.len());
    assert!(l.variable_map().lines().count() >= l.num_vars);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn minorant_lower_bounds_hold(
        a in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..6),
        seed in 0u64..1000,
    ) {
        let a: Vec<Complex64> = a.into_iter().map(|(r, i)| Complex64::new(r, i)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w_ref = cn(&mut rng, a.len());
        let w = cn(&mut rng, a.len());
        let f = taylor_quadratic_minorant(&a, &w_ref);
        prop_assert!(f.eval(&stack(&w)) <= abs2(&a, &w) + 1e-12);
    }

    #[test]
    fn hyperbolic_equivalence_on_reals(z in -10.0f64..10.0, x in 0.0f64..10.0, y in 0.0f64..10.0) {
        // away from the boundary both tests agree
        prop_assume!((z * z - x * y).abs() > 1e-9);
        prop_assert_eq!(hyperbolic_member(z, x, y), z * z <= x * y);
    }
}
