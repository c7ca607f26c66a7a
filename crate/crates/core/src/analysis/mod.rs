//! Exact oracle, failure sensitivity analysis and ranking comparisons.

pub mod fsa;
pub mod oracle;
pub mod ranking;

pub use fsa::{fsa, slope, FsaEntry, FsaReport, FsaThresholds, RiskClass, DEFAULT_T_GRID};
pub use oracle::{
    exact_expected_scores, rational_to_f64, round_expectation, ExactExpectation, OracleLimits,
};
pub use ranking::{
    average_baseline_rank, csd_ranks, perturbation_experiment, ranks_descending, AverageRanking,
    RankingComparison,
};
