use proptest::prelude::*;
use swiss_csd::{build_tensor, validate_inputs, MissingPolicy, Round, RoundSequence, ScoreTable};

#[derive(Debug, Clone)]
struct Fixture {
    table: ScoreTable,
    seq: RoundSequence,
}

/// Random tables with coarse scores (many ties) and datasets split across rounds.
fn fixture() -> impl Strategy<Value = Fixture> {
    (2usize..7, 1usize..7).prop_flat_map(|(m, d)| {
        (
            proptest::collection::vec(0u8..=10, m * d),
            proptest::collection::vec(0usize..d, d),
        )
            .prop_map(move |(cells, assignment)| {
                let names: Vec<String> = (0..m).map(|i| format!("m{i}")).collect();
                let datasets: Vec<String> = (0..d).map(|j| format!("d{j}")).collect();
                let rows: Vec<Vec<f64>> = cells
                    .chunks(d)
                    .map(|r| r.iter().map(|&v| f64::from(v) * 10.0).collect())
                    .collect();
                let table = ScoreTable::from_complete(&names, &datasets, &rows).unwrap();
                let mut rounds: Vec<Round> = Vec::new();
                for bucket in 0..d {
                    let ds: Vec<String> = (0..d)
                        .filter(|&j| assignment[j] == bucket)
                        .map(|j| datasets[j].clone())
                        .collect();
                    if !ds.is_empty() {
                        rounds.push(Round {
                            label: format!("round{bucket}"),
                            datasets: ds,
                        });
                    }
                }
                Fixture {
                    table,
                    seq: RoundSequence::new(rounds).unwrap(),
                }
            })
    })
}

fn build(table: &ScoreTable, seq: &RoundSequence) -> swiss_csd::WinRateTensor {
    build_tensor(&validate_inputs(table, seq, MissingPolicy::Error).unwrap())
}

fn monotone(kind: u8, x: f64) -> f64 {
    // strictly increasing maps of [0,100] into [0,100]
    match kind % 3 {
        0 => x * x / 100.0,
        1 => 100.0 * (x / 100.0).sqrt(),
        _ => 5.0 + 0.9 * x,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn antisymmetric_binary_or_half(f in fixture()) {
        let w = build(&f.table, &f.seq);
        for k in 0..w.num_rounds() {
            for i in 0..w.num_models() {
                prop_assert_eq!(w.get(i, i, k), 0.5);
                for j in 0..w.num_models() {
                    if i != j {
                        prop_assert_eq!(w.get(i, j, k) + w.get(j, i, k), 1.0);
                        prop_assert!([0.0, 0.5, 1.0].contains(&w.get(i, j, k)));
                    }
                }
            }
        }
    }

    #[test]
    fn monotone_transform_of_a_column_is_invisible(f in fixture(), col in 0usize..7, kind in 0u8..3) {
        let col = col % f.table.num_datasets();
        let rows: Vec<Vec<f64>> = (0..f.table.num_models())
            .map(|m| {
                (0..f.table.num_datasets())
                    .map(|d| {
                        let v = f.table.score(m, d).unwrap();
                        if d == col { monotone(kind, v) } else { v }
                    })
                    .collect()
            })
            .collect();
        let names: Vec<String> = f.table.models().iter().map(|m| m.to_string()).collect();
        let changed = ScoreTable::from_complete(&names, f.table.datasets(), &rows).unwrap();
        prop_assert_eq!(build(&changed, &f.seq), build(&f.table, &f.seq));
    }

    #[test]
    fn relabeling_is_equivariant(f in fixture(), seed in any::<u64>()) {
        use rand::{seq::SliceRandom, SeedableRng};
        let m = f.table.num_models();
        let mut perm: Vec<usize> = (0..m).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let names: Vec<String> = perm.iter().map(|&p| f.table.models()[p].to_string()).collect();
        let rows: Vec<Vec<f64>> = perm
            .iter()
            .map(|&p| f.table.row(p).iter().map(|s| s.unwrap()).collect())
            .collect();
        let shuffled = ScoreTable::from_complete(&names, f.table.datasets(), &rows).unwrap();
        let original = build(&f.table, &f.seq);
        prop_assert_eq!(build(&shuffled, &f.seq), original.permuted_models(&perm));
    }
}
