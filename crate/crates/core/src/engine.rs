//! One stochastic run of the Swiss-system contest.
//!
//! Each round the active models are grouped by exact cumulative score,
//! paired uniformly at random inside each group (odd groups leave one model
//! with a zero-point bye), matches are resolved from the win-rate tensor,
//! and then up to `T_k` models are removed uniformly from the minimum score
//! group.

use std::fmt;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CsdError, Result};
use crate::tensor::WinRateTensor;

/// A cumulative score in half-point units, so equality is exact.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Score(u32);

impl Score {
    pub const ZERO: Score = Score(0);
    pub const WIN: Score = Score(2);

    pub fn from_half_points(half: u32) -> Self {
        Score(half)
    }

    pub fn half_points(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0) / 2.0
    }
}

impl std::ops::Add for Score {
    type Output = Score;

    fn add(self, rhs: Score) -> Score {
        Score(self.0 + rhs.0)
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_f64())
    }
}

/// How many models leave the minimum score group after each round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum EliminationSchedule {
    Constant(usize),
    PerRound(Vec<usize>),
}

impl EliminationSchedule {
    pub fn constant(t: usize) -> Self {
        EliminationSchedule::Constant(t)
    }

    /// `T_k` for zero-based round `round`.
    pub fn count(&self, round: usize) -> usize {
        match self {
            EliminationSchedule::Constant(t) => *t,
            EliminationSchedule::PerRound(ts) => ts.get(round).copied().unwrap_or(0),
        }
    }

    pub fn check(&self, rounds: usize) -> Result<()> {
        match self {
            EliminationSchedule::PerRound(ts) if ts.len() != rounds => {
                Err(CsdError::DimensionMismatch(format!(
                    "elimination schedule has {} entries for {} rounds",
                    ts.len(),
                    rounds
                )))
            }
            _ => Ok(()),
        }
    }
}

impl Default for EliminationSchedule {
    fn default() -> Self {
        EliminationSchedule::Constant(0)
    }
}

/// Active models and the cumulative scores of all models at a round boundary.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ContestState {
    /// Active model indices, ascending.
    pub active: Vec<usize>,
    /// Scores for every model; eliminated models keep their last score.
    pub scores: Vec<Score>,
    /// Number of rounds already played.
    pub round: usize,
}

impl ContestState {
    pub fn initial(models: usize) -> Self {
        ContestState {
            active: (0..models).collect(),
            scores: vec![Score::ZERO; models],
            round: 0,
        }
    }

    pub fn is_active(&self, model: usize) -> bool {
        self.active.binary_search(&model).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreGroup {
    pub score: Score,
    pub members: Vec<usize>,
}

/// What happened in one round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundOutcome {
    /// Zero-based contest round.
    pub round: usize,
    pub pairs: Vec<(usize, usize)>,
    pub byes: Vec<usize>,
    /// Winner of each pair, parallel to `pairs`.
    pub winners: Vec<usize>,
    pub eliminated: Vec<usize>,
    /// Scores of all models after the round.
    pub scores: Vec<Score>,
}

/// Partitions the active set into groups of equal score, highest score first.
pub fn group_by_score(state: &ContestState) -> Vec<ScoreGroup> {
    let mut sorted: Vec<usize> = state.active.clone();
    sorted.sort_by(|&a, &b| state.scores[b].cmp(&state.scores[a]).then(a.cmp(&b)));
    let mut groups: Vec<ScoreGroup> = Vec::new();
    for m in sorted {
        let s = state.scores[m];
        match groups.last_mut() {
            Some(g) if g.score == s => g.members.push(m),
            _ => groups.push(ScoreGroup {
                score: s,
                members: vec![m],
            }),
        }
    }
    groups
}

/// Uniform random perfect matching of `group`; for odd sizes the leftover gets the bye.
pub fn pair_group<R: Rng + ?Sized>(
    group: &[usize],
    rng: &mut R,
) -> (Vec<(usize, usize)>, Option<usize>) {
    let mut order = group.to_vec();
    order.shuffle(rng);
    let pairs = order.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    let bye = if order.len() % 2 == 1 {
        order.last().copied()
    } else {
        None
    };
    (pairs, bye)
}

/// Resolves one match: returns the winner.
#[inline]
fn play_match<R: Rng + ?Sized>(p: f64, i: usize, j: usize, rng: &mut R) -> usize {
    let i_wins = if p >= 1.0 {
        true
    } else if p <= 0.0 {
        false
    } else {
        rng.random_bool(p)
    };
    if i_wins {
        i
    } else {
        j
    }
}

fn check_dims(state: &ContestState, tensor: &WinRateTensor) -> Result<()> {
    if state.scores.len() != tensor.num_models() {
        return Err(CsdError::DimensionMismatch(format!(
            "state has {} models, tensor has {}",
            state.scores.len(),
            tensor.num_models()
        )));
    }
    Ok(())
}

/// Groups, pairs and plays round `state.round` using tensor round `tensor_round`.
/// Advances `state` (scores and round counter); elimination is separate.
fn play_round_on<R: Rng + ?Sized>(
    state: &mut ContestState,
    tensor: &WinRateTensor,
    tensor_round: usize,
    rng: &mut R,
) -> RoundOutcome {
    let mut pairs = Vec::with_capacity(state.active.len() / 2);
    let mut byes = Vec::new();
    for group in group_by_score(state) {
        let (p, bye) = pair_group(&group.members, rng);
        pairs.extend(p);
        byes.extend(bye);
    }
    let winners: Vec<usize> = pairs
        .iter()
        .map(|&(i, j)| play_match(tensor.get(i, j, tensor_round), i, j, rng))
        .collect();
    for &w in &winners {
        state.scores[w] = state.scores[w] + Score::WIN;
    }
    let outcome = RoundOutcome {
        round: state.round,
        pairs,
        byes,
        winners,
        eliminated: Vec::new(),
        scores: state.scores.clone(),
    };
    state.round += 1;
    outcome
}

/// Plays round `state.round` of `tensor` and returns the outcome without elimination.
pub fn play_round<R: Rng + ?Sized>(
    state: &mut ContestState,
    tensor: &WinRateTensor,
    rng: &mut R,
) -> Result<RoundOutcome> {
    check_dims(state, tensor)?;
    if state.round >= tensor.num_rounds() {
        return Err(CsdError::DimensionMismatch(format!(
            "round {} requested but tensor has {} rounds",
            state.round + 1,
            tensor.num_rounds()
        )));
    }
    let r = state.round;
    Ok(play_round_on(state, tensor, r, rng))
}

/// Removes `min(t, |G_min|)` uniformly chosen models from the minimum score group.
/// Returns the removed models in ascending order.
pub fn apply_elimination<R: Rng + ?Sized>(
    state: &mut ContestState,
    t: usize,
    rng: &mut R,
) -> Vec<usize> {
    if t == 0 || state.active.is_empty() {
        return Vec::new();
    }
    let min = state
        .active
        .iter()
        .map(|&m| state.scores[m])
        .min()
        .expect("non-empty");
    let g_min: Vec<usize> = state
        .active
        .iter()
        .copied()
        .filter(|&m| state.scores[m] == min)
        .collect();
    let mut out: Vec<usize> = if t >= g_min.len() {
        g_min
    } else {
        index::sample(rng, g_min.len(), t)
            .into_iter()
            .map(|i| g_min[i])
            .collect()
    };
    out.sort_unstable();
    state.active.retain(|m| out.binary_search(m).is_err());
    out
}

/// Final result of one contest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceResult {
    pub scores: Vec<Score>,
    /// Zero-based round after which each model was eliminated, if it was.
    pub eliminated_in: Vec<Option<usize>>,
    pub pairs_played: usize,
    pub trace: Vec<RoundOutcome>,
}

/// Runs a contest whose round `n` uses tensor round `order[n]`.
pub(crate) fn run_ordered<R: Rng + ?Sized>(
    tensor: &WinRateTensor,
    order: &[usize],
    schedule: &EliminationSchedule,
    rng: &mut R,
    keep_trace: bool,
) -> InstanceResult {
    let m = tensor.num_models();
    let mut state = ContestState::initial(m);
    let mut eliminated_in = vec![None; m];
    let mut pairs_played = 0;
    let mut trace = Vec::new();
    for (position, &tensor_round) in order.iter().enumerate() {
        let mut outcome = play_round_on(&mut state, tensor, tensor_round, rng);
        pairs_played += outcome.pairs.len();
        let gone = apply_elimination(&mut state, schedule.count(position), rng);
        for &g in &gone {
            eliminated_in[g] = Some(position);
        }
        if keep_trace {
            outcome.eliminated = gone;
            trace.push(outcome);
        }
        if state.active.len() < 2 {
            break;
        }
    }
    InstanceResult {
        scores: state.scores,
        eliminated_in,
        pairs_played,
        trace,
    }
}

/// Runs all `K` rounds of one contest instance and returns final scores plus the per-round trace.
pub fn run_single_instance<R: Rng + ?Sized>(
    tensor: &WinRateTensor,
    schedule: &EliminationSchedule,
    rng: &mut R,
) -> Result<InstanceResult> {
    let k = tensor.num_rounds();
    if k == 0 {
        return Err(CsdError::DimensionMismatch("tensor has no rounds".into()));
    }
    schedule.check(k)?;
    let order: Vec<usize> = (0..k).collect();
    Ok(run_ordered(tensor, &order, schedule, rng, true))
}

#[derive(Serialize)]
struct TraceLine<'a> {
    instance: u64,
    round: usize,
    pairs: &'a [(usize, usize)],
    byes: &'a [usize],
    winners: &'a [usize],
    eliminated: &'a [usize],
    scores: Vec<u32>,
}

/// JSON-lines trace: a header line declaring the score unit, then one object per round.
pub fn trace_to_jsonl(instance: u64, trace: &[RoundOutcome]) -> String {
    let mut out = String::new();
    for r in trace {
        let line = TraceLine {
            instance,
            round: r.round + 1,
            pairs: &r.pairs,
            byes: &r.byes,
            winners: &r.winners,
            eliminated: &r.eliminated,
            scores: r.scores.iter().map(|s| s.half_points()).collect(),
        };
        out.push_str(&serde_json::to_string(&line).expect("trace serializes"));
        out.push('\n');
    }
    out
}

pub const TRACE_HEADER: &str = r#"{"score_unit":"half_point"}"#;
