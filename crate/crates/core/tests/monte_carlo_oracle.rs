#![allow(clippy::needless_range_loop)]

mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swiss_csd::analysis::oracle::OracleLimits;
use swiss_csd::{
    estimate, estimate_sweep, exact_expected_scores, EliminationSchedule, SimulationConfig,
    WinRateTensor,
};

/// Random small tensors with entries from {0, 0.5, 1}.
fn random_tensor(rng: &mut ChaCha8Rng, m: usize, k: usize, with_half: bool) -> WinRateTensor {
    WinRateTensor::from_fn(common::ids(m), common::rounds(k), |_, _, _| {
        let choices: &[f64] = if with_half {
            &[0.0, 0.5, 1.0]
        } else {
            &[0.0, 1.0]
        };
        choices[rng.random_range(0..choices.len())]
    })
    .unwrap()
}

#[test]
fn monte_carlo_converges_to_exact_on_small_fixtures() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..12 {
        let m = 2 + case % 3;
        let k = 1 + case % 2;
        let t = case % 2;
        let w = random_tensor(&mut rng, m, k, case % 4 >= 2);
        let exact = exact_expected_scores(
            &w,
            &EliminationSchedule::constant(t),
            OracleLimits::default(),
        )
        .unwrap()
        .to_f64();
        let mc = estimate(&w, &SimulationConfig::new(100_000, case as u64, t)).unwrap();
        for i in 0..m {
            let diff = (mc.expected_scores[i] - exact[i]).abs();
            assert!(
                diff <= 3.0 * mc.std_error[i] + 1e-12,
                "case {case} model {i}: mc {} exact {} se {}",
                mc.expected_scores[i],
                exact[i],
                mc.std_error[i]
            );
        }
    }
}

#[test]
fn total_expected_score_equals_expected_matches() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for t in 0..3 {
        let w = random_tensor(&mut rng, 7, 4, true);
        let r = estimate(&w, &SimulationConfig::new(20_000, 1, t)).unwrap();
        let total: f64 = r.expected_scores.iter().sum();
        assert!(
            (total - r.mean_pairs_played).abs() < 1e-9,
            "{total} vs {}",
            r.mean_pairs_played
        );
    }
}

#[test]
fn unique_round_one_loser_loses_ground_as_t_grows() {
    // model 4 loses every round-1 match and wins everything afterwards
    let mut strength: Vec<Vec<i32>> = Vec::new();
    for k in 0..3 {
        let mut s = vec![50, 40, 30, 20, 10];
        s[4] = if k == 0 { 0 } else { 100 };
        strength.push(s);
    }
    let w = common::from_strengths(common::ids(5), &strength);
    let sweep = estimate_sweep(&w, &SimulationConfig::new(50_000, 3, 0), &[0, 1, 2]).unwrap();
    let curve: Vec<f64> = sweep.iter().map(|(_, r)| r.expected_scores[4]).collect();
    assert!(curve[0] > curve[1] && curve[1] > curve[2], "{curve:?}");
    // and the exact oracle agrees on the direction
    let exact: Vec<f64> = (0..3)
        .map(|t| {
            exact_expected_scores(
                &w,
                &EliminationSchedule::constant(t),
                OracleLimits::default(),
            )
            .unwrap()
            .to_f64()[4]
        })
        .collect();
    assert!(exact[0] > exact[1] && exact[1] > exact[2], "{exact:?}");
}

#[test]
fn different_seeds_agree_within_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let w = random_tensor(&mut rng, 8, 5, true);
    let a = estimate(&w, &SimulationConfig::new(30_000, 1, 1)).unwrap();
    let b = estimate(&w, &SimulationConfig::new(30_000, 2, 1)).unwrap();
    let c = estimate(&w, &SimulationConfig::new(30_000, 1, 1)).unwrap();
    assert_eq!(a, c);
    for i in 0..8 {
        let tol = 3.0 * (a.std_error[i].powi(2) + b.std_error[i].powi(2)).sqrt();
        assert!((a.expected_scores[i] - b.expected_scores[i]).abs() <= tol + 1e-12);
    }
}
