// Split questions into accuracy tiers, play the tiers easiest first, and
// see who stumbles early.
//
// `cargo run --example difficulty_tiers`

use swiss_csd::{
    build_tensor, build_tiers, decile_bands, fsa, tier_sequence_to_rounds, validate_inputs,
    FsaThresholds, MissingPolicy, QuestionOutcomes, SimulationConfig,
};

const OUTCOMES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/outcomes.csv");

fn main() -> swiss_csd::Result<()> {
    let outcomes = QuestionOutcomes::load(OUTCOMES)?;
    let partition = build_tiers(&outcomes, &decile_bands())?;
    let tiers = tier_sequence_to_rounds(&partition, &outcomes)?;
    for w in &tiers.warnings {
        println!("note: {w}");
    }
    for round in tiers.sequence.rounds() {
        let d = tiers
            .table
            .dataset_index(&round.datasets[0])
            .expect("tier column");
        let scores: Vec<String> = (0..tiers.table.num_models())
            .map(|m| format!("{:.0}", tiers.table.score(m, d).unwrap_or(f64::NAN)))
            .collect();
        println!("{:<14} {}", round.label, scores.join(" "));
    }

    let inputs = validate_inputs(&tiers.table, &tiers.sequence, MissingPolicy::Error)?;
    let tensor = build_tensor(&inputs);
    let report = fsa(
        &tensor,
        &SimulationConfig::new(20_000, 11, 0),
        &[0, 1, 2],
        FsaThresholds::for_rounds(tensor.num_rounds()),
    )?;
    println!();
    for e in &report.entries {
        println!(
            "{:<10} lambda {:+.4}  {}",
            e.model,
            e.lambda,
            e.class.as_str()
        );
    }
    Ok(())
}
