// Exact expected scores for a tiny contest, checked against Monte Carlo.
//
// `cargo run --example exact_oracle`

use swiss_csd::{
    analysis::oracle::rational_to_f64, estimate, exact_expected_scores, EliminationSchedule,
    ModelId, OracleLimits, SimulationConfig, WinRateTensor,
};

fn main() -> swiss_csd::Result<()> {
    let models = ["ace", "bishop", "castle", "dame"]
        .into_iter()
        .map(ModelId::new)
        .collect::<swiss_csd::Result<Vec<_>>>()?;
    // per-round win probabilities of row over column, upper triangle only
    // round 1: strict order; round 2: dame turns the tables, bishop and castle are even
    let rounds = [
        [
            [0.5, 1.0, 1.0, 1.0],
            [0.0, 0.5, 1.0, 1.0],
            [0.0, 0.0, 0.5, 1.0],
            [0.0; 4],
        ],
        [
            [0.5, 1.0, 1.0, 0.0],
            [0.0, 0.5, 0.5, 0.0],
            [0.0, 0.0, 0.5, 0.0],
            [0.0; 4],
        ],
    ];
    let tensor = WinRateTensor::from_fn(
        models,
        vec!["opening".into(), "endgame".into()],
        |i, j, k| rounds[k][i][j],
    )?;
    for t in [0, 1] {
        let schedule = EliminationSchedule::constant(t);
        let exact = exact_expected_scores(&tensor, &schedule, OracleLimits::default())?;
        let mc = estimate(&tensor, &SimulationConfig::new(100_000, 5, t))?;
        println!("t = {t}");
        for (m, id) in exact.models.iter().enumerate() {
            println!(
                "  {:<7} exact {:>6} = {:.6}   monte carlo {:.6} +/- {:.6}",
                id,
                exact.values[m].to_string(),
                rational_to_f64(&exact.values[m]),
                mc.expected_scores[m],
                mc.std_error[m]
            );
        }
    }
    Ok(())
}
