// Compare how a single bad result moves a model under contest ranking and
// under plain score averaging.
//
// `cargo run --example perturbation`

use swiss_csd::{
    load_round_sequence, load_score_table, perturb_scores, perturbation_experiment, MissingPolicy,
    Perturbation, ScoreFormat, SimulationConfig,
};

const SCORES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/scores.csv");
const SEQUENCE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/sequence.json");

fn main() -> swiss_csd::Result<()> {
    let table = load_score_table(SCORES, ScoreFormat::Csv)?;
    let sequence = load_round_sequence(SEQUENCE)?;
    let perturbed = perturb_scores(&table, &[Perturbation::new("borealis", "chat", 0.0)])?;

    let cmp = perturbation_experiment(
        &table,
        &perturbed,
        &sequence,
        &SimulationConfig::new(20_000, 1, 1),
        MissingPolicy::Error,
    )?;
    println!("borealis scores 0 on chat:\n");
    print!("{}", cmp.to_csv());
    let m = table.model_index("borealis").expect("model exists");
    println!(
        "\nrank change: contest {:+}, average {:+}",
        cmp.csd_delta(m),
        cmp.avg_delta(m)
    );
    Ok(())
}
