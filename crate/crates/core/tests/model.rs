use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use secure_swipt::channel::{generate_channel_set, ChannelSet};
use secure_swipt::model::*;

/// `|aᴴw|²` from separate real and imaginary sums.
fn gain(a: &[Complex64], w: &[Complex64]) -> f64 {
    let re: f64 = a.iter().zip(w).map(|(a, w)| a.re * w.re + a.im * w.im).sum();
    let im: f64 = a.iter().zip(w).map(|(a, w)| a.re * w.im - a.im * w.re).sum();
    re * re + im * im
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn random_solution(rng: &mut ChaCha8Rng, cfg: &NetworkConfig, amp: f64) -> BeamformingSolution {
    let mut v = |n: usize| -> Vec<Complex64> {
        (0..n).map(|_| Complex64::new(rng.random_range(-amp..amp), rng.random_range(-amp..amp))).collect()
    };
    BeamformingSolution { w_m: (0..cfg.m).map(|_| v(cfg.n_m)).collect(), w_i: v(cfg.n_f), v_e: v(cfg.n_f) }
}

fn instance(seed: u64) -> (NetworkConfig, ChannelSet, BeamformingSolution) {
    let cfg = NetworkConfig::default_scenario();
    let ch = generate_channel_set(&cfg, seed).unwrap();
    let sol = random_solution(&mut ChaCha8Rng::seed_from_u64(seed), &cfg, 3.0);
    (cfg, ch, sol)
}

#[test]
fn sinrs_match_scalar_oracles() {
    for seed in 0..50 {
        let (cfg, ch, s) = instance(seed);
        for m in 0..cfg.m {
            let mut den = cfg.sigma2_m[m] + gain(&ch.l_m[m], &s.w_i) + gain(&ch.l_m[m], &s.v_e);
            for i in 0..cfg.m {
                if i != m {
                    den += gain(&ch.h_m[m], &s.w_m[i]);
                }
            }
            assert!(rel(sinr_mu(&s, &ch, &cfg, m), gain(&ch.h_m[m], &s.w_m[m]) / den) < 1e-12);
        }
        let den_i = cfg.sigma2_i + s.w_m.iter().map(|w| gain(&ch.h_i0, w)).sum::<f64>() + gain(&ch.h_i, &s.v_e);
        assert!(rel(sinr_ir(&s, &ch, &cfg), gain(&ch.h_i, &s.w_i) / den_i) < 1e-12);
        for k in 0..cfg.k {
            let den =
                cfg.sigma2_e[k] + s.w_m.iter().map(|w| gain(&ch.g_k0[k], w)).sum::<f64>() + gain(&ch.g_k[k], &s.v_e);
            assert!(rel(sinr_er(&s, &ch, &cfg, k), gain(&ch.g_k[k], &s.w_i) / den) < 1e-12);
            let e = cfg.xi * (gain(&ch.g_k[k], &s.w_i) + gain(&ch.g_k[k], &s.v_e) + cfg.sigma2_e[k]);
            assert!(rel(harvested_energy(&s, &ch, &cfg, k), e) < 1e-12);
        }
        let p: f64 =
            s.w_m.iter().chain([&s.w_i, &s.v_e]).flat_map(|v| v.iter()).map(|c| c.re * c.re + c.im * c.im).sum();
        assert!(rel(total_power(&s), p) < 1e-14);
    }
}

#[test]
fn secrecy_rate_composes_the_sinrs() {
    for seed in 0..50 {
        let (cfg, ch, s) = instance(seed);
        let eve = (0..cfg.k).map(|k| (1.0 + sinr_er(&s, &ch, &cfg, k)).log2()).fold(f64::NEG_INFINITY, f64::max);
        let expected = ((1.0 + sinr_ir(&s, &ch, &cfg)).log2() - eve).max(0.0);
        assert_eq!(secrecy_rate(&s, &ch, &cfg), expected);
    }
}

#[test]
fn degenerate_cases() {
    let (cfg, ch, s) = instance(1);
    let zero = BeamformingSolution::zeros(&cfg);
    assert_eq!(total_power(&zero), 0.0);
    assert_eq!(sinr_mu(&zero, &ch, &cfg, 0), 0.0);
    assert_eq!(sinr_ir(&zero, &ch, &cfg), 0.0);
    assert_eq!(harvested_energy(&zero, &ch, &cfg, 0), cfg.xi * cfg.sigma2_e[0]);
    assert!(rel(total_power(&s.scaled(2f64.sqrt())), 2.0 * total_power(&s)) < 1e-14);

    // M = 1 without FBS transmission
    let one = cfg.clone().with_users(1, 2);
    let ch1 = generate_channel_set(&one, 1).unwrap();
    let only = BeamformingSolution { w_m: vec![ch1.h_m[0].clone()], ..BeamformingSolution::zeros(&one) };
    let expected = gain(&ch1.h_m[0], &ch1.h_m[0]) / one.sigma2_m[0];
    assert!(rel(sinr_mu(&only, &ch1, &one, 0), expected) < 1e-12);

    // ER identical to the IR with equal noise: zero secrecy
    let mut twin = ch.clone();
    twin.g_k[0] = twin.h_i.clone();
    twin.g_k0[0] = twin.h_i0.clone();
    assert_eq!(secrecy_rate(&s, &twin, &cfg), 0.0);
}

#[test]
fn interference_free_sinrs() {
    let cfg = NetworkConfig::default_scenario();
    let ch = generate_channel_set(&cfg, 2).unwrap();
    // w_m along a vector orthogonal to h_I0, v_E orthogonal to h_I
    let perp = |a: &[Complex64], v: &[Complex64]| -> Vec<Complex64> {
        let c = inner(a, v) / norm_sqr(a);
        v.iter().zip(a).map(|(v, a)| v - a * c).collect()
    };
    let sol = BeamformingSolution {
        w_m: ch.h_m.iter().map(|h| perp(&ch.h_i0, h)).collect(),
        w_i: ch.h_i.clone(),
        v_e: perp(&ch.h_i, &ch.g_k[0]),
    };
    let expected = gain(&ch.h_i, &sol.w_i) / cfg.sigma2_i;
    assert!(rel(sinr_ir(&sol, &ch, &cfg), expected) < 1e-9);
}

#[test]
fn audit_reports_signed_slacks() {
    let (mut cfg, ch, s) = instance(3);
    let a = audit(&BeamformingSolution::zeros(&cfg), &ch, &cfg, 1e-6).unwrap();
    assert!(!a.feasible);
    assert!(a.sinr_slack.iter().all(|&v| v < 0.0));
    cfg.p_th = total_power(&s);
    let a = audit(&s, &ch, &cfg, 1e-6).unwrap();
    assert_eq!(a.power_slack, 0.0);
    assert_eq!(a.sinr_slack.len(), cfg.m);
    assert_eq!(a.eh_slack.len(), cfg.k);
}

#[test]
fn audit_rejects_wrong_shapes() {
    let (cfg, ch, mut s) = instance(4);
    s.w_i.push(Complex64::new(0.0, 0.0));
    assert!(audit(&s, &ch, &cfg, 1e-6).is_err());
}

#[test]
fn config_validation() {
    let good = NetworkConfig::default_scenario();
    good.validate().unwrap();
    assert!(NetworkConfig { xi: 0.0, ..good.clone() }.validate().is_err());
    assert!(NetworkConfig { xi: 1.5, ..good.clone() }.validate().is_err());
    assert!(NetworkConfig { n_f: 2, ..good.clone() }.validate().is_err());
    assert!(NetworkConfig { n_m: 1, ..good.clone() }.validate().is_err());
    assert!(NetworkConfig { p_th: -1.0, ..good.clone() }.validate().is_err());
    assert!(NetworkConfig { gamma: vec![0.1], ..good.clone() }.validate().is_err());
    let d = good.distances;
    assert!(NetworkConfig { distances: Distances { fbs_er_m: 0.0, ..d }, ..good.clone() }.validate().is_err());
    // reference parameters
    assert!(rel(good.gamma[0], 0.1) < 1e-15);
    assert!(rel(good.q[0], 10f64.powf(1.5) * 1e-3) < 1e-15);
    assert!(rel(good.sigma2_i, 1e-13) < 1e-12);
    assert_eq!((good.n_m, good.n_f, good.m, good.k), (10, 4, 2, 2));
}

#[test]
fn db_conversions() {
    assert!(rel(dbm_to_watts(40.0), 10.0) < 1e-15);
    assert!(rel(db_to_linear(-10.0), 0.1) < 1e-15);
    assert!((watts_to_dbm(dbm_to_watts(23.0)) - 23.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn secrecy_rate_is_nonnegative(seed in 0u64..10_000, amp in 0.01f64..30.0) {
        let cfg = NetworkConfig::default_scenario();
        let ch = generate_channel_set(&cfg, seed % 50).unwrap();
        let s = random_solution(&mut ChaCha8Rng::seed_from_u64(seed), &cfg, amp);
        prop_assert!(secrecy_rate(&s, &ch, &cfg) >= 0.0);
    }

    #[test]
    fn common_phase_rotation_is_invisible(seed in 0u64..1000, theta in 0.0f64..6.3, which in 0usize..4) {
        let (cfg, ch, mut s) = instance(seed % 20);
        let r0 = secrecy_margin(&s, &ch, &cfg);
        let e = Complex64::from_polar(1.0, theta);
        let v = match which {
            0 => &mut s.w_i,
            1 => &mut s.v_e,
            i => &mut s.w_m[i - 2],
        };
        v.iter_mut().for_each(|c| *c *= e);
        prop_assert!((secrecy_margin(&s, &ch, &cfg) - r0).abs() <= 1e-12 * r0.abs().max(1.0));
    }

    #[test]
    fn harvested_energy_grows_with_an_power(seed in 0u64..1000, a in 0.0f64..10.0, b in 0.0f64..10.0) {
        prop_assume!(a <= b);
        let (cfg, ch, s) = instance(seed % 20);
        for k in 0..cfg.k {
            let with = |t: f64| {
                let v_e = s.v_e.iter().map(|c| c * t).collect();
                harvested_energy(&BeamformingSolution { v_e, ..s.clone() }, &ch, &cfg, k)
            };
            prop_assert!(with(a) <= with(b));
        }
    }

    #[test]
    fn mu_sinr_falls_as_fbs_power_grows(seed in 0u64..1000, a in 0.0f64..10.0, b in 0.0f64..10.0) {
        prop_assume!(a <= b);
        let (cfg, ch, s) = instance(seed % 20);
        for m in 0..cfg.m {
            let with = |t: f64| {
                let w_i = s.w_i.iter().map(|c| c * t).collect();
                sinr_mu(&BeamformingSolution { w_i, ..s.clone() }, &ch, &cfg, m)
            };
            prop_assert!(with(a) >= with(b));
        }
    }
}
