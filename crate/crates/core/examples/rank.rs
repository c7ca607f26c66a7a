// Rank models by expected win score in a simulated Swiss-system contest.
//
// `cargo run --example rank`

use swiss_csd::{
    analysis::csd_ranks, build_tensor, estimate, load_round_sequence, load_score_table,
    validate_inputs, MissingPolicy, ScoreFormat, SimulationConfig,
};

const SCORES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/scores.csv");
const SEQUENCE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/sequence.json");

fn main() -> swiss_csd::Result<()> {
    let table = load_score_table(SCORES, ScoreFormat::Csv)?;
    let sequence = load_round_sequence(SEQUENCE)?;
    let inputs = validate_inputs(&table, &sequence, MissingPolicy::Error)?;
    let tensor = build_tensor(&inputs);

    // one model leaves the bottom score group after every round
    let result = estimate(&tensor, &SimulationConfig::new(20_000, 42, 1))?;
    let ranks = csd_ranks(&result);

    let mut order: Vec<usize> = (0..ranks.len()).collect();
    order.sort_by_key(|&m| ranks[m]);
    println!(
        "{:<4} {:<10} {:>8} {:>8} {:>9}",
        "rank", "model", "E[S]", "se", "survival"
    );
    for m in order {
        println!(
            "{:<4} {:<10} {:>8.4} {:>8.4} {:>9.3}",
            ranks[m],
            result.models[m],
            result.expected_scores[m],
            result.std_error[m],
            result.survival_prob[m]
        );
    }
    Ok(())
}
