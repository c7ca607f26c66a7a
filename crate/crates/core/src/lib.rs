//! Swiss-system tournament ranking for models evaluated on many benchmarks.
//!
//! Raw score tables are turned into a pairwise win-rate tensor (one slice per
//! round), a stochastic Swiss-system contest with zero-point byes and
//! elimination from the bottom score group is simulated many times, and each
//! model's expected win score is reported together with how sensitive it is
//! to elimination pressure.
//!
//! ```
//! use swiss_csd::{build_tensor, estimate, validate_inputs, MissingPolicy,
//!                 RoundSequence, ScoreTable, SimulationConfig};
//!
//! let table = ScoreTable::from_complete(
//!     &["alpha", "beta", "gamma"],
//!     &["math", "code"],
//!     &[vec![90.0, 80.0], vec![70.0, 85.0], vec![40.0, 30.0]],
//! ).unwrap();
//! let seq = RoundSequence::singletons(&["math", "code"]).unwrap();
//! let inputs = validate_inputs(&table, &seq, MissingPolicy::Error).unwrap();
//! let tensor = build_tensor(&inputs);
//! let result = estimate(&tensor, &SimulationConfig::new(2_000, 7, 0)).unwrap();
//! assert_eq!(result.expected_scores.len(), 3);
//! ```

pub mod analysis;
pub mod cli;
pub mod engine;
pub mod error;
pub mod ingestion;
pub mod monte_carlo;
pub mod order;
pub mod rng;
pub mod tensor;

pub use analysis::{
    average_baseline_rank, csd_ranks, exact_expected_scores, fsa, perturbation_experiment,
    round_expectation, FsaReport, FsaThresholds, OracleLimits, RankingComparison, RiskClass,
};
pub use engine::{
    apply_elimination, group_by_score, pair_group, play_round, run_single_instance, ContestState,
    EliminationSchedule, RoundOutcome, Score,
};
pub use error::{CsdError, Result};
pub use ingestion::{
    load_round_sequence, load_score_table, validate_inputs, MissingPolicy, ModelId, Round,
    RoundSequence, ScoreFormat, ScoreTable, ValidatedInputs,
};
pub use monte_carlo::{estimate, estimate_sweep, SimulationConfig, SimulationResult};
pub use order::{
    build_tiers, decile_bands, estimate_weighted, sample_order, tier_sequence_to_rounds,
    QuestionOutcomes, TierPartition, WeightedSuite,
};
pub use tensor::{build_tensor, perturb_scores, Perturbation, WinRateTensor};
