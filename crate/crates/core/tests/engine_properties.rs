mod common;

use proptest::prelude::*;
use swiss_csd::rng::instance_stream;
use swiss_csd::{run_single_instance, EliminationSchedule, Score, WinRateTensor};

/// Random tensors mixing deterministic, tied and probabilistic entries.
pub fn tensor_strategy() -> impl Strategy<Value = WinRateTensor> {
    (1usize..10, 1usize..6).prop_flat_map(|(m, k)| {
        proptest::collection::vec(
            prop_oneof![Just(0.0), Just(1.0), Just(0.5), 0.0f64..=1.0],
            m * m * k,
        )
        .prop_map(move |vals| {
            WinRateTensor::from_fn(common::ids(m), common::rounds(k), |i, j, r| {
                vals[(i * m + j) * k + r]
            })
            .unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn contest_invariants(w in tensor_strategy(), t in 0usize..4, seed in any::<u64>()) {
        let k = w.num_rounds();
        let m = w.num_models();
        let schedule = EliminationSchedule::constant(t);
        let r = run_single_instance(&w, &schedule, &mut instance_stream(seed, 0)).unwrap();
        let mut prev = vec![Score::ZERO; m];
        let mut active: Vec<usize> = (0..m).collect();
        for (n, round) in r.trace.iter().enumerate() {
            prop_assert_eq!(round.round, n);
            // pairs and byes partition the active set
            let mut seen: Vec<usize> = round.pairs.iter().flat_map(|&(a, b)| [a, b]).chain(round.byes.iter().copied()).collect();
            seen.sort_unstable();
            prop_assert_eq!(&seen, &active);
            // pairs only inside a score group
            for &(a, b) in &round.pairs {
                prop_assert_eq!(prev[a], prev[b]);
            }
            // one bye per odd score group
            let mut group_sizes = std::collections::BTreeMap::new();
            for &a in &active {
                *group_sizes.entry(prev[a]).or_insert(0usize) += 1;
            }
            let odd = group_sizes.values().filter(|&&n| n % 2 == 1).count();
            prop_assert_eq!(round.byes.len(), odd);
            // points conservation and bye neutrality
            let awarded: u32 = (0..m).map(|i| round.scores[i].half_points() - prev[i].half_points()).sum();
            prop_assert_eq!(awarded, 2 * round.pairs.len() as u32);
            for &b in &round.byes {
                prop_assert_eq!(round.scores[b], prev[b]);
            }
            for (i, (now, before)) in round.scores.iter().zip(&prev).enumerate() {
                if !active.contains(&i) {
                    prop_assert_eq!(now, before);
                }
            }
            // elimination cardinality, from the post-round minimum group
            let min = active.iter().map(|&a| round.scores[a]).min().unwrap();
            let g_min = active.iter().filter(|&&a| round.scores[a] == min).count();
            prop_assert_eq!(round.eliminated.len(), t.min(g_min));
            for &e in &round.eliminated {
                prop_assert_eq!(round.scores[e], min);
            }
            active.retain(|a| !round.eliminated.contains(a));
            prev = round.scores.clone();
        }
        // early termination: the trace stops as soon as fewer than two remain
        if r.trace.len() < k {
            prop_assert!(active.len() < 2);
        }
        prop_assert_eq!(&r.scores, &prev);
        for s in &r.scores {
            prop_assert!(s.as_f64() >= 0.0 && s.as_f64() <= k as f64);
        }
    }

    #[test]
    fn identical_seed_identical_trace(w in tensor_strategy(), t in 0usize..3, seed in any::<u64>()) {
        let s = EliminationSchedule::constant(t);
        let a = run_single_instance(&w, &s, &mut instance_stream(seed, 5)).unwrap();
        let b = run_single_instance(&w, &s, &mut instance_stream(seed, 5)).unwrap();
        prop_assert_eq!(a, b);
    }
}
