// Random round orders drawn from dataset weights, and the expected scores
// they induce.
//
// `cargo run --example weighted_order`

use swiss_csd::{
    estimate_weighted, load_score_table, rng::instance_stream, sample_order, MissingPolicy,
    ScoreFormat, SimulationConfig, WeightedSuite,
};

const SCORES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/scores.csv");
const SUITE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/suite.json");

fn main() -> swiss_csd::Result<()> {
    let suite = WeightedSuite::load(SUITE)?;
    println!("sampled orders (heavier datasets tend to come first):");
    for i in 0..5 {
        let order = sample_order(&suite, &mut instance_stream(99, i));
        let names: Vec<&str> = order
            .iter()
            .map(|&d| suite.datasets()[d].as_str())
            .collect();
        println!("  {}", names.join(" -> "));
    }

    let table = load_score_table(SCORES, ScoreFormat::Csv)?;
    let result = estimate_weighted(
        &suite,
        &table,
        MissingPolicy::Error,
        &SimulationConfig::new(20_000, 3, 1),
    )?;
    println!("\nexpected scores over random orders:");
    for (m, id) in result.models.iter().enumerate() {
        println!(
            "  {:<10} {:.4} +/- {:.4}",
            id, result.expected_scores[m], result.std_error[m]
        );
    }
    Ok(())
}
