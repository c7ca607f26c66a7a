// Failure sensitivity analysis: how each model's expected score reacts to
// harsher elimination.
//
// `cargo run --example fsa`

use swiss_csd::{
    build_tensor, fsa, load_round_sequence, load_score_table, validate_inputs, FsaThresholds,
    MissingPolicy, ScoreFormat, SimulationConfig,
};

const SCORES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/scores.csv");
const SEQUENCE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/sequence.json");

fn main() -> swiss_csd::Result<()> {
    let table = load_score_table(SCORES, ScoreFormat::Csv)?;
    let sequence = load_round_sequence(SEQUENCE)?;
    let tensor = build_tensor(&validate_inputs(&table, &sequence, MissingPolicy::Error)?);

    let thresholds = FsaThresholds::for_rounds(tensor.num_rounds());
    let report = fsa(
        &tensor,
        &SimulationConfig::new(20_000, 7, 0),
        &[0, 1, 2],
        thresholds,
    )?;

    println!(
        "thresholds: specialist <= {:.3}, generalist band +/-{:.3}",
        thresholds.lambda_specialist, thresholds.lambda_generalist_band
    );
    let mut entries = report.entries.clone();
    entries.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    for e in &entries {
        println!(
            "{:<10} E[S|t=0] {:.3}  lambda {:+.4}  {}",
            e.model,
            e.base_score,
            e.lambda,
            e.class.as_str()
        );
    }
    println!("\nplot data:\n{}", report.plot_csv());
    Ok(())
}
