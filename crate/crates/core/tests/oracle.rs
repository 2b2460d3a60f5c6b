// Checks the library against independent reference computations: a plain
// state-vector simulator over (re, im) pairs, a literal payoff table, finite
// differences and brute-force deviation scans.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use qbayes::bell::{bell_report, chsh_value, correlator, enumerate_variants, quartets};
use qbayes::equilibrium::{best_response, verify_equilibrium, SolverConfig};
use qbayes::game::{builtin_extended_bos, CoordinatorParams, StrategyProfile};
use qbayes::payoff::{cross_gradient, delta_pair, payoffs, payoffs_at};
use qbayes::probability::{
    classical_joint, decompose, quantum_joint, quantum_joint_nparty, single_player_probs,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = (f64, f64);

fn mul(a: C, b: C) -> C {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn add(a: C, b: C) -> C {
    (a.0 + b.0, a.1 + b.1)
}

// <m|U_theta|j> with U = [[cos, -sin], [sin, cos]] of the half angle.
fn rot(theta: f64, m: usize, j: usize) -> f64 {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    match (m, j) {
        (0, 0) | (1, 1) => c,
        (0, 1) => -s,
        _ => s,
    }
}

/// Tensor in `[sector][moves]` order, player 0 the most significant bit.
fn oracle_joint(angles: &[[f64; 2]], gamma: f64, phi: f64) -> Vec<f64> {
    let n = angles.len();
    let dim = 1 << n;
    let bit = |idx: usize, k: usize| (idx >> (n - 1 - k)) & 1;
    let c0: C = ((gamma / 2.0).cos(), 0.0);
    let c1: C = (
        phi.cos() * (gamma / 2.0).sin(),
        phi.sin() * (gamma / 2.0).sin(),
    );
    let mut out = Vec::with_capacity(dim * dim);
    for s in 0..dim {
        for m in 0..dim {
            let mut amp0 = 1.0;
            let mut amp1 = 1.0;
            for k in 0..n {
                let theta = angles[k][bit(s, k)];
                amp0 *= rot(theta, bit(m, k), 0);
                amp1 *= rot(theta, bit(m, k), 1);
            }
            let z = add(mul(c0, (amp0, 0.0)), mul(c1, (amp1, 0.0)));
            out.push(z.0 * z.0 + z.1 * z.1);
        }
    }
    out
}

// Battle of Sexes in [00], Chicken-like shadows, moves 00 01 10 11.
const ALICE: [[f64; 4]; 4] = [
    [3.0, 0.0, 0.0, 1.0],
    [-3.0, 0.0, 0.0, -1.0],
    [-3.0, 0.0, 0.0, -1.0],
    [-1.0, 0.0, 0.0, -3.0],
];
const BOB: [[f64; 4]; 4] = [
    [1.0, 0.0, 0.0, 3.0],
    [-1.0, 0.0, 0.0, -3.0],
    [-1.0, 0.0, 0.0, -3.0],
    [-3.0, 0.0, 0.0, -1.0],
];

fn oracle_payoffs(p: &[f64]) -> [f64; 2] {
    let mut out = [0.0; 2];
    for s in 0..4 {
        for m in 0..4 {
            out[0] += 0.25 * ALICE[s][m] * p[4 * s + m];
            out[1] += 0.25 * BOB[s][m] * p[4 * s + m];
        }
    }
    out
}

fn random_angles(rng: &mut ChaCha8Rng, n: usize) -> Vec<[f64; 2]> {
    (0..n)
        .map(|_| [rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI)])
        .collect()
}

fn eq29() -> StrategyProfile {
    StrategyProfile::two_player([0.0, 1.5 * PI], [FRAC_PI_4, 3.0 * FRAC_PI_4]).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn two_player_tensor_matches_state_vector() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let angles = random_angles(&mut rng, 2);
        let (g, f) = (rng.gen_range(0.0..PI), rng.gen_range(0.0..PI));
        let profile = StrategyProfile::new(angles.clone()).unwrap();
        let coord = CoordinatorParams::new(g, f).unwrap();
        let got = quantum_joint(&profile, &coord).unwrap();
        assert!(max_diff(got.values(), &oracle_joint(&angles, g, f)) < 1e-12);
    }
}

#[test]
fn three_player_tensor_matches_state_vector() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let angles = random_angles(&mut rng, 3);
        let (g, f) = (rng.gen_range(0.0..PI), rng.gen_range(0.0..PI));
        let profile = StrategyProfile::new(angles.clone()).unwrap();
        let coord = CoordinatorParams::new(g, f).unwrap();
        let got = quantum_joint_nparty(&profile, &coord, 3).unwrap();
        assert!(max_diff(got.values(), &oracle_joint(&angles, g, f)) < 1e-12);
    }
}

#[test]
fn maximally_entangled_grid() {
    let coord = CoordinatorParams::new(FRAC_PI_2, 0.0).unwrap();
    for i in 0..10 {
        for j in 0..10 {
            let a = i as f64 * PI / 9.0;
            let b = j as f64 * PI / 9.0;
            let p = StrategyProfile::two_player([a, 0.0], [b, 0.0]).unwrap();
            let t = quantum_joint(&p, &coord).unwrap();
            let expect = 0.5 * ((a - b) / 2.0).cos().powi(2);
            assert!((t.get(0, 0) - expect).abs() < 1e-12, "{a} {b}");
            assert!((t.get(0, 3) - expect).abs() < 1e-12);
        }
    }
}

#[test]
fn classical_tensor_is_product_of_marginals() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let angles = random_angles(&mut rng, 2);
        let profile = StrategyProfile::new(angles.clone()).unwrap();
        let single = single_player_probs(&profile);
        let t = classical_joint(&profile);
        for s in 0..4 {
            for m in 0..4 {
                let expect = single.get(0, s >> 1, m >> 1) * single.get(1, s & 1, m & 1);
                assert!((t.get(s, m) - expect).abs() < 1e-14);
            }
        }
        assert!(max_diff(t.values(), &oracle_joint(&angles, 0.0, 0.0)) < 1e-12);
    }
}

#[test]
fn single_player_values() {
    let p = StrategyProfile::two_player([0.0, PI], [FRAC_PI_2, 2.0 * PI / 3.0]).unwrap();
    let s = single_player_probs(&p);
    assert!((s.get(0, 0, 0) - 1.0).abs() < 1e-15);
    assert!(s.get(0, 1, 0).abs() < 1e-15);
    assert!((s.get(1, 0, 1) - 0.5).abs() < 1e-15);
    assert!((s.get(1, 1, 1) - 0.75).abs() < 1e-15);
}

#[test]
fn decomposition_sums_to_tensor() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..200 {
        let angles = random_angles(&mut rng, 2);
        let (g, f) = (rng.gen_range(0.0..PI), rng.gen_range(0.0..PI));
        let profile = StrategyProfile::new(angles.clone()).unwrap();
        let coord = CoordinatorParams::new(g, f).unwrap();
        let d = decompose(&profile, &coord).unwrap();
        assert!(max_diff(&d.total(), &oracle_joint(&angles, g, f)) < 1e-12);
    }
}

#[test]
fn interference_at_quarter_turns() {
    let coord = CoordinatorParams::new(FRAC_PI_2, 0.0).unwrap();
    let p = StrategyProfile::two_player([FRAC_PI_2, 0.0], [FRAC_PI_2, 0.0]).unwrap();
    let d = decompose(&p, &coord).unwrap();
    let expect = [0.25, -0.25, -0.25, 0.25];
    assert!(max_diff(&d.interference[..4], &expect) < 1e-15);
    assert!(max_diff(&d.pseudo_classical[..4], &[0.25; 4]) < 1e-15);
}

#[test]
fn payoffs_match_literal_table() {
    let spec = builtin_extended_bos();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..300 {
        let angles = random_angles(&mut rng, 2);
        let (g, f) = (rng.gen_range(0.0..PI), rng.gen_range(0.0..PI));
        let profile = StrategyProfile::new(angles.clone()).unwrap();
        let coord = CoordinatorParams::new(g, f).unwrap();
        let got = payoffs_at(&spec, &profile, &coord).unwrap();
        let want = oracle_payoffs(&oracle_joint(&angles, g, f));
        assert!(max_diff(&got, &want) < 1e-12);
    }
}

#[test]
fn sector_payoffs_of_pure_profiles() {
    let spec = builtin_extended_bos();
    let cases = [
        ([0.0, 0.0], [0.0, 0.0], [3.0, 1.0]),
        ([PI, 0.0], [PI, 0.0], [1.0, 3.0]),
        ([0.0, 0.0], [PI, 0.0], [0.0, 0.0]),
    ];
    for (a, b, want) in cases {
        let p = StrategyProfile::two_player(a, b).unwrap();
        let v = payoffs(&classical_joint(&p), &spec).unwrap();
        assert!((v.sector[0][0] - want[0]).abs() < 1e-15);
        assert!((v.sector[1][0] - want[1]).abs() < 1e-15);
    }
}

#[test]
fn delta_values() {
    let d = delta_pair(&classical_joint(
        &StrategyProfile::two_player([0.0, 0.0], [PI, PI]).unwrap(),
    ))
    .unwrap();
    assert!(d.delta00.abs() < 1e-15 && d.delta11.abs() < 1e-15);
    let d = delta_pair(&classical_joint(
        &StrategyProfile::uniform(2, FRAC_PI_2).unwrap(),
    ))
    .unwrap();
    assert!((d.delta00 + 0.5).abs() < 1e-15 && (d.delta11 + 0.5).abs() < 1e-15);
    let t = quantum_joint(&eq29(), &CoordinatorParams::maximal()).unwrap();
    let d = delta_pair(&t).unwrap();
    let half = (SQRT_2 - 1.0) / 2.0;
    assert!((d.delta00 - half).abs() < 1e-12 && (d.delta11 - half).abs() < 1e-12);
    let v = oracle_joint(
        &[[0.0, 1.5 * PI], [FRAC_PI_4, 3.0 * FRAC_PI_4]],
        FRAC_PI_2,
        0.0,
    );
    let delta00 = v[0] - v[4] - v[8] - v[12 + 3];
    assert!((delta00 - half).abs() < 1e-12);
}

#[test]
fn analytic_gradient_matches_finite_differences() {
    let spec = builtin_extended_bos();
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let h = 1e-5;
    for _ in 0..100 {
        let angles = random_angles(&mut rng, 2);
        let (g, f) = (rng.gen_range(0.0..PI), rng.gen_range(0.0..PI));
        let profile = StrategyProfile::new(angles.clone()).unwrap();
        let coord = CoordinatorParams::new(g, f).unwrap();
        for owner in 0..2 {
            for ty in 0..2 {
                let mut up = angles.clone();
                let mut dn = angles.clone();
                up[owner][ty] += h;
                dn[owner][ty] -= h;
                let fu = oracle_payoffs(&oracle_joint(&up, g, f));
                let fd = oracle_payoffs(&oracle_joint(&dn, g, f));
                for k in 0..2 {
                    let fdiff = (fu[k] - fd[k]) / (2.0 * h);
                    let a = cross_gradient(&profile, &coord, &spec, k, owner, ty).unwrap();
                    assert!((a - fdiff).abs() < 1e-8, "{a} vs {fdiff}");
                }
            }
        }
    }
}

#[test]
fn best_response_beats_fine_scan() {
    let spec = builtin_extended_bos();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..40 {
        let angles = random_angles(&mut rng, 2);
        let (g, f) = (rng.gen_range(0.0..PI), rng.gen_range(0.0..PI));
        let profile = StrategyProfile::new(angles.clone()).unwrap();
        let coord = CoordinatorParams::new(g, f).unwrap();
        for player in 0..2 {
            for ty in 0..2 {
                let br = best_response(&spec, &coord, &profile, player, ty).unwrap();
                let mut scan = f64::NEG_INFINITY;
                for i in 0..=3600 {
                    let mut a = angles.clone();
                    a[player][ty] = i as f64 * 2.0 * PI / 3600.0;
                    scan = scan.max(oracle_payoffs(&oracle_joint(&a, g, f))[player]);
                }
                let mut a = angles.clone();
                a[player][ty] = br.angle;
                let at_br = oracle_payoffs(&oracle_joint(&a, g, f))[player];
                assert!(at_br >= scan - 1e-12);
                assert!((at_br - br.payoff).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn best_response_examples() {
    let spec = builtin_extended_bos();
    let classical = CoordinatorParams::classical();
    let p = StrategyProfile::two_player([0.0, 0.0], [0.0, PI]).unwrap();
    let br = best_response(&spec, &classical, &p, 0, 0).unwrap();
    assert!(br.angle.abs() < 1e-12);

    // Bob plays β⁰ = β¹: Alice's type-0 angle cannot change her payoff.
    let p = StrategyProfile::two_player([0.3, 0.0], [0.0, 0.0]).unwrap();
    let br = best_response(&spec, &classical, &p, 0, 0).unwrap();
    assert!(br.flat);
    assert_eq!(br.angle, 0.0);

    let p = StrategyProfile::two_player([1.0, 2.0], [FRAC_PI_4, 3.0 * FRAC_PI_4]).unwrap();
    let br = best_response(&spec, &CoordinatorParams::maximal(), &p, 0, 0).unwrap();
    assert!(
        br.angle.abs() < 1e-9 || (br.angle - 2.0 * PI).abs() < 1e-9,
        "{}",
        br.angle
    );
}

#[test]
fn deviation_margins_agree_with_fine_scan() {
    let spec = builtin_extended_bos();
    let cfg = SolverConfig::default();
    let cases = [
        (
            StrategyProfile::two_player([0.0, PI], [0.0, PI / 3.0]).unwrap(),
            CoordinatorParams::classical(),
        ),
        (
            StrategyProfile::uniform(2, FRAC_PI_2).unwrap(),
            CoordinatorParams::classical(),
        ),
        (eq29(), CoordinatorParams::maximal()),
        (
            StrategyProfile::two_player([0.4, 2.0], [1.1, 5.0]).unwrap(),
            CoordinatorParams::new(0.7, 0.3).unwrap(),
        ),
    ];
    for (profile, coord) in cases {
        let rep = verify_equilibrium(&spec, &coord, &profile, &cfg).unwrap();
        let angles = profile.angles().to_vec();
        let base = oracle_payoffs(&oracle_joint(&angles, coord.gamma(), coord.phi()));
        let mut worst = f64::NEG_INFINITY;
        for player in 0..2 {
            for ty in 0..2 {
                for i in 0..=1440 {
                    let mut a = angles.clone();
                    a[player][ty] = i as f64 * 2.0 * PI / 1440.0;
                    let v = oracle_payoffs(&oracle_joint(&a, coord.gamma(), coord.phi()))[player];
                    worst = worst.max(v - base[player]);
                }
            }
        }
        assert!(
            (rep.max_deviation_margin() - worst).abs() < 1e-12,
            "{} vs {worst}",
            rep.max_deviation_margin()
        );
    }
}

#[test]
fn verification_examples() {
    let spec = builtin_extended_bos();
    let cfg = SolverConfig::default();
    let p = StrategyProfile::two_player([0.0, PI], [0.0, PI / 3.0]).unwrap();
    let rep = verify_equilibrium(&spec, &CoordinatorParams::classical(), &p, &cfg).unwrap();
    assert!(rep.accepted);
    assert!(rep.max_stationarity_residual() <= 1e-12);
    assert!(rep.max_deviation_margin() <= 1e-12);

    // With β⁰ = β¹ the [x0] and [x1] sectors cancel in every single-angle
    // payoff, so all angles π/2 is a flat equilibrium, not a violation.
    let p = StrategyProfile::uniform(2, FRAC_PI_2).unwrap();
    let rep = verify_equilibrium(&spec, &CoordinatorParams::classical(), &p, &cfg).unwrap();
    assert!(rep.accepted);
    assert!(rep.max_deviation_margin() <= 1e-12);

    // Alice's type 0 faces 3x₀ − x₁ and gains (3 − 1)/4 by playing 0.
    let p = StrategyProfile::two_player([FRAC_PI_2, FRAC_PI_2], [0.0, PI]).unwrap();
    let rep = verify_equilibrium(&spec, &CoordinatorParams::classical(), &p, &cfg).unwrap();
    assert!(!rep.accepted);
    assert!((rep.deviation_margin[0][0] - 0.5).abs() < 1e-12);

    let rep = verify_equilibrium(&spec, &CoordinatorParams::maximal(), &eq29(), &cfg).unwrap();
    assert!(rep.accepted);
    assert!(rep.max_stationarity_residual() <= 1e-9);
    assert!(rep
        .payoffs
        .total
        .iter()
        .all(|v| (v - (SQRT_2 - 1.0) / 2.0).abs() < 1e-12));
}

fn oracle_correlator(p: &[f64], s: usize) -> f64 {
    p[4 * s] - p[4 * s + 1] - p[4 * s + 2] + p[4 * s + 3]
}

#[test]
fn correlators_and_chsh() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for _ in 0..100 {
        let angles = random_angles(&mut rng, 2);
        let (g, f) = (rng.gen_range(0.0..PI), rng.gen_range(0.0..PI));
        let t = quantum_joint(
            &StrategyProfile::new(angles.clone()).unwrap(),
            &CoordinatorParams::new(g, f).unwrap(),
        )
        .unwrap();
        let o = oracle_joint(&angles, g, f);
        let e: Vec<f64> = (0..4).map(|s| oracle_correlator(&o, s)).collect();
        for (s, want) in e.iter().enumerate() {
            assert!((correlator(&t, s) - want).abs() < 1e-12);
        }
        let base = e[0] - e[1] - e[2] - e[3];
        assert!((chsh_value(&t, 0).unwrap() - base).abs() < 1e-12);
    }
    // Bell state, all angles zero: every correlator is 1.
    let t = quantum_joint(
        &StrategyProfile::uniform(2, 0.0).unwrap(),
        &CoordinatorParams::maximal(),
    )
    .unwrap();
    assert!((chsh_value(&t, 0).unwrap() + 2.0).abs() < 1e-12);
}

#[test]
fn quartet_sums_track_chsh() {
    let variants = enumerate_variants(2);
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..50 {
        let angles = random_angles(&mut rng, 2);
        let (g, f) = (rng.gen_range(0.0..PI), rng.gen_range(0.0..PI));
        let t = quantum_joint(
            &StrategyProfile::new(angles.clone()).unwrap(),
            &CoordinatorParams::new(g, f).unwrap(),
        )
        .unwrap();
        let o = oracle_joint(&angles, g, f);
        let report = bell_report(&t).unwrap();
        for q in quartets() {
            let sum: f64 = q.members.iter().map(|&i| report.lhs[i]).sum();
            let s: f64 = (0..4)
                .map(|k| f64::from(q.chsh_signs[k]) * oracle_correlator(&o, k))
                .sum();
            assert!((sum - (s - 2.0)).abs() < 1e-12);
        }
        for (i, v) in variants.iter().enumerate() {
            let direct: f64 = v
                .selection
                .terms
                .iter()
                .map(|t| {
                    if t.positive {
                        o[4 * t.sector + t.moves]
                    } else {
                        -o[4 * t.sector + t.moves]
                    }
                })
                .sum();
            assert!((report.lhs[i] - direct).abs() < 1e-12);
        }
    }
}

#[test]
fn bell_values_at_named_points() {
    let half = (SQRT_2 - 1.0) / 2.0;
    let zero = quantum_joint(
        &StrategyProfile::uniform(2, 0.0).unwrap(),
        &CoordinatorParams::maximal(),
    )
    .unwrap();
    let r = bell_report(&zero).unwrap();
    assert!((r.lhs[0] + 1.0).abs() < 1e-12);

    let t = quantum_joint(&eq29(), &CoordinatorParams::maximal()).unwrap();
    let r = bell_report(&t).unwrap();
    let d = delta_pair(&t).unwrap();
    assert!((d.delta00 - half).abs() < 1e-12 && (d.delta11 - half).abs() < 1e-12);
    assert!((r.max_lhs - half).abs() < 1e-12);
    let max_s = r.chsh_values.iter().fold(0.0_f64, |m, s| m.max(s.abs()));
    assert!((max_s - 2.0 * SQRT_2).abs() < 1e-12);
}

#[test]
fn ghz_base_form_at_zero_angles() {
    let t = quantum_joint_nparty(
        &StrategyProfile::uniform(3, 0.0).unwrap(),
        &CoordinatorParams::maximal(),
        3,
    )
    .unwrap();
    // P⁰⁰⁰₀₀₀ − 3·P^{e_k}₀₀₀ − P¹¹¹₁₁₁ = ½ − 3/2 − ½
    let v = qbayes::bell::nparty_cereceda_lhs(&t, 3, false).unwrap();
    let o = oracle_joint(&[[0.0; 2]; 3], FRAC_PI_2, 0.0);
    let direct = o[0] - o[8] - o[16] - o[32] - o[8 * 7 + 7];
    assert!((v - direct).abs() < 1e-12);
    assert!((v + 1.5).abs() < 1e-12);
}
