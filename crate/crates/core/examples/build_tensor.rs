// Build the pairwise win-rate tensor from a score table and inspect it.
//
// `cargo run --example build_tensor`

use swiss_csd::{
    build_tensor, load_round_sequence, load_score_table, validate_inputs, MissingPolicy,
    ScoreFormat,
};

const SCORES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/scores.csv");
const SEQUENCE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/sequence.json");

fn main() -> swiss_csd::Result<()> {
    let table = load_score_table(SCORES, ScoreFormat::Csv)?;
    let sequence = load_round_sequence(SEQUENCE)?;
    let tensor = build_tensor(&validate_inputs(&table, &sequence, MissingPolicy::Error)?);

    for (k, label) in tensor.round_labels().iter().enumerate() {
        println!("round {label}");
        print!("{:>10}", "");
        for id in tensor.models() {
            print!(" {:>8.8}", id.as_str());
        }
        println!();
        for (i, id) in tensor.models().iter().enumerate() {
            print!("{:>10}", id.as_str());
            for j in 0..tensor.num_models() {
                print!(" {:>8}", tensor.get(i, j, k));
            }
            println!();
        }
        println!();
    }
    let json = tensor.to_json_string();
    println!("serialized tensor: {} bytes", json.len());
    Ok(())
}
