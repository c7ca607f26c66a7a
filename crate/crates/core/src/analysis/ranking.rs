//! Rankings from expected win scores and from plain score averages, and the
//! harness that compares how both react to a perturbed score table.

use std::cmp::Ordering;
use std::fmt::Write as _;

use crate::error::{CsdError, Result};
use crate::ingestion::{validate_inputs, MissingPolicy, ModelId, RoundSequence, ScoreTable};
use crate::monte_carlo::{estimate, SimulationConfig, SimulationResult};
use crate::tensor::build_tensor;

/// 1-based ranks for `values` sorted descending, ties broken alphabetically by model name.
pub fn ranks_descending(models: &[ModelId], values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..models.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .unwrap_or(Ordering::Equal)
            .then_with(|| models[a].cmp(&models[b]))
    });
    let mut ranks = vec![0; models.len()];
    for (pos, &m) in order.iter().enumerate() {
        ranks[m] = pos + 1;
    }
    ranks
}

/// Ranks from a simulation's expected scores.
pub fn csd_ranks(result: &SimulationResult) -> Vec<usize> {
    ranks_descending(&result.models, &result.expected_scores)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AverageRanking {
    pub models: Vec<ModelId>,
    pub means: Vec<f64>,
    pub ranks: Vec<usize>,
}

/// Ranks models by their unweighted mean over all datasets.
pub fn average_baseline_rank(table: &ScoreTable, policy: MissingPolicy) -> Result<AverageRanking> {
    let n = table.num_datasets();
    let mut means = Vec::with_capacity(table.num_models());
    for m in 0..table.num_models() {
        let mut total = 0.0;
        for (d, s) in table.row(m).iter().enumerate() {
            match (s, policy) {
                (Some(v), _) => total += v,
                (None, MissingPolicy::TreatAsLoss) => {}
                (None, MissingPolicy::Error) => {
                    return Err(CsdError::MissingScore {
                        model: table.models()[m].to_string(),
                        dataset: table.datasets()[d].clone(),
                    })
                }
            }
        }
        means.push(if n == 0 { 0.0 } else { total / n as f64 });
    }
    Ok(AverageRanking {
        models: table.models().to_vec(),
        ranks: ranks_descending(table.models(), &means),
        means,
    })
}

/// Ranks of every model under both methods, before and after a perturbation.
#[derive(Debug, Clone, PartialEq)]
pub struct RankingComparison {
    pub models: Vec<ModelId>,
    pub csd_before: Vec<usize>,
    pub csd_after: Vec<usize>,
    pub avg_before: Vec<usize>,
    pub avg_after: Vec<usize>,
    pub base_result: SimulationResult,
    pub perturbed_result: SimulationResult,
}

impl RankingComparison {
    /// Positive when the model fell in the ranking.
    pub fn csd_delta(&self, m: usize) -> i64 {
        self.csd_after[m] as i64 - self.csd_before[m] as i64
    }

    pub fn avg_delta(&self, m: usize) -> i64 {
        self.avg_after[m] as i64 - self.avg_before[m] as i64
    }

    /// `model,csd_rank_before,csd_rank_after,avg_rank_before,avg_rank_after`
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("model,csd_rank_before,csd_rank_after,avg_rank_before,avg_rank_after\n");
        for (m, id) in self.models.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                id, self.csd_before[m], self.csd_after[m], self.avg_before[m], self.avg_after[m]
            );
        }
        out
    }
}

/// Runs the simulation and the average baseline on both tables with the same config.
pub fn perturbation_experiment(
    base: &ScoreTable,
    perturbed: &ScoreTable,
    seq: &RoundSequence,
    config: &SimulationConfig,
    policy: MissingPolicy,
) -> Result<RankingComparison> {
    if base.models() != perturbed.models() || base.datasets() != perturbed.datasets() {
        return Err(CsdError::DimensionMismatch(
            "base and perturbed tables must share models and datasets".into(),
        ));
    }
    let run = |table: &ScoreTable| -> Result<SimulationResult> {
        let inputs = validate_inputs(table, seq, policy)?;
        estimate(&build_tensor(&inputs), config)
    };
    let base_result = run(base)?;
    let perturbed_result = run(perturbed)?;
    let avg_before = average_baseline_rank(base, policy)?.ranks;
    let avg_after = average_baseline_rank(perturbed, policy)?.ranks;
    Ok(RankingComparison {
        models: base.models().to_vec(),
        csd_before: csd_ranks(&base_result),
        csd_after: csd_ranks(&perturbed_result),
        avg_before,
        avg_after,
        base_result,
        perturbed_result,
    })
}
