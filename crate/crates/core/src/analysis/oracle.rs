//! Exact expected scores for small contests.
//!
//! The contest is propagated forward as a probability distribution over
//! states `(active set, score vector)`. Every pairing, match outcome and
//! elimination subset is enumerated with exact rational weights, and states
//! that coincide are merged after each round. Tensor entries are converted
//! to rationals exactly (every `f64` is a dyadic rational).

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::engine::{group_by_score, ContestState, EliminationSchedule, Score};
use crate::error::{CsdError, Result};
use crate::ingestion::ModelId;
use crate::tensor::WinRateTensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_models: usize,
    pub max_rounds: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_models: 5,
            max_rounds: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactExpectation {
    pub models: Vec<ModelId>,
    pub values: Vec<BigRational>,
}

impl ExactExpectation {
    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(rational_to_f64).collect()
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn ratio(num: usize, den: usize) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn exact(p: f64) -> BigRational {
    BigRational::from_float(p).expect("tensor entries are finite")
}

type Arrangement = (Vec<(usize, usize)>, Option<usize>);

/// All `(pairs, bye)` arrangements of one group; each is equally likely.
fn arrangements(members: &[usize]) -> Vec<Arrangement> {
    fn matchings(rest: &[usize]) -> Vec<Vec<(usize, usize)>> {
        if rest.is_empty() {
            return vec![Vec::new()];
        }
        let first = rest[0];
        let mut out = Vec::new();
        for idx in 1..rest.len() {
            let partner = rest[idx];
            let remaining: Vec<usize> = rest[1..]
                .iter()
                .copied()
                .filter(|&x| x != partner)
                .collect();
            for mut m in matchings(&remaining) {
                m.insert(0, (first, partner));
                out.push(m);
            }
        }
        out
    }

    if members.len().is_multiple_of(2) {
        matchings(members).into_iter().map(|m| (m, None)).collect()
    } else {
        members
            .iter()
            .flat_map(|&bye| {
                let rest: Vec<usize> = members.iter().copied().filter(|&x| x != bye).collect();
                matchings(&rest).into_iter().map(move |m| (m, Some(bye)))
            })
            .collect()
    }
}

fn subsets(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    if items.len() < size {
        return Vec::new();
    }
    let mut with: Vec<Vec<usize>> = subsets(&items[1..], size - 1)
        .into_iter()
        .map(|mut s| {
            s.insert(0, items[0]);
            s
        })
        .collect();
    with.extend(subsets(&items[1..], size));
    with
}

type Distribution = HashMap<ContestState, BigRational>;

fn add_mass(dist: &mut Distribution, state: ContestState, p: BigRational) {
    *dist.entry(state).or_insert_with(BigRational::zero) += p;
}

/// Applies elimination to a post-round state and records every outcome.
fn eliminate_into(dist: &mut Distribution, state: ContestState, p: BigRational, t: usize) {
    if t == 0 || state.active.is_empty() {
        add_mass(dist, state, p);
        return;
    }
    let min = state.active.iter().map(|&m| state.scores[m]).min().unwrap();
    let g_min: Vec<usize> = state
        .active
        .iter()
        .copied()
        .filter(|&m| state.scores[m] == min)
        .collect();
    let choices = subsets(&g_min, t.min(g_min.len()));
    let each = &p * ratio(1, choices.len());
    for removed in choices {
        let mut next = state.clone();
        next.active.retain(|m| !removed.contains(m));
        add_mass(dist, next, each.clone());
    }
}

/// Exact `E[S_m(K)]` for every model by exhaustive enumeration of contest histories.
pub fn exact_expected_scores(
    tensor: &WinRateTensor,
    schedule: &EliminationSchedule,
    limits: OracleLimits,
) -> Result<ExactExpectation> {
    let m = tensor.num_models();
    let k = tensor.num_rounds();
    if m > limits.max_models {
        return Err(CsdError::InstanceTooLarge {
            what: "models",
            actual: m,
            limit: limits.max_models,
        });
    }
    if k > limits.max_rounds {
        return Err(CsdError::InstanceTooLarge {
            what: "rounds",
            actual: k,
            limit: limits.max_rounds,
        });
    }
    if k == 0 {
        return Err(CsdError::DimensionMismatch("tensor has no rounds".into()));
    }
    schedule.check(k)?;

    let mut dist: Distribution = HashMap::new();
    dist.insert(ContestState::initial(m), BigRational::one());
    for round in 0..k {
        let mut next: Distribution = HashMap::new();
        for (state, p) in dist {
            if round > 0 && state.active.len() < 2 {
                // contest already over
                add_mass(&mut next, state, p);
                continue;
            }
            // cross product of per-group arrangements
            let mut layouts: Vec<(Vec<(usize, usize)>, BigRational)> =
                vec![(Vec::new(), p.clone())];
            for group in group_by_score(&state) {
                let options = arrangements(&group.members);
                let share = ratio(1, options.len());
                let mut grown = Vec::with_capacity(layouts.len() * options.len());
                for (pairs, q) in &layouts {
                    for (extra, _bye) in &options {
                        let mut all = pairs.clone();
                        all.extend_from_slice(extra);
                        grown.push((all, q * &share));
                    }
                }
                layouts = grown;
            }
            let t = schedule.count(round);
            for (pairs, q) in layouts {
                // enumerate match outcomes
                let mut outcomes: Vec<(Vec<Score>, BigRational)> = vec![(state.scores.clone(), q)];
                for &(i, j) in &pairs {
                    let w = tensor.get(i, j, round);
                    let mut grown = Vec::with_capacity(outcomes.len() * 2);
                    for (scores, r) in outcomes {
                        if w > 0.0 {
                            let mut s = scores.clone();
                            s[i] = s[i] + Score::WIN;
                            grown.push((s, &r * exact(w)));
                        }
                        if w < 1.0 {
                            let mut s = scores;
                            s[j] = s[j] + Score::WIN;
                            grown.push((s, &r * exact(1.0 - w)));
                        }
                    }
                    outcomes = grown;
                }
                for (scores, r) in outcomes {
                    let played = ContestState {
                        active: state.active.clone(),
                        scores,
                        round: round + 1,
                    };
                    eliminate_into(&mut next, played, r, t);
                }
            }
        }
        dist = next;
    }

    let half = ratio(1, 2);
    let mut values = vec![BigRational::zero(); m];
    for (state, p) in &dist {
        for (v, s) in values.iter_mut().zip(&state.scores) {
            if s.half_points() > 0 {
                *v += p * BigRational::from_integer(BigInt::from(s.half_points())) * &half;
            }
        }
    }
    Ok(ExactExpectation {
        models: tensor.models().to_vec(),
        values,
    })
}

/// Conditional expected gain of `model` in the next round given `state`:
/// its mean win rate over its score group, scaled by `1 − 1/n` for odd groups.
pub fn round_expectation(
    tensor: &WinRateTensor,
    state: &ContestState,
    model: usize,
) -> Result<BigRational> {
    if state.scores.len() != tensor.num_models() {
        return Err(CsdError::DimensionMismatch(format!(
            "state has {} models, tensor has {}",
            state.scores.len(),
            tensor.num_models()
        )));
    }
    if state.round >= tensor.num_rounds() {
        return Err(CsdError::DimensionMismatch(format!(
            "round {} outside tensor with {} rounds",
            state.round + 1,
            tensor.num_rounds()
        )));
    }
    if !state.is_active(model) {
        return Err(CsdError::InactiveModel(model));
    }
    let group: Vec<usize> = state
        .active
        .iter()
        .copied()
        .filter(|&j| state.scores[j] == state.scores[model])
        .collect();
    let n = group.len();
    if n == 1 {
        return Ok(BigRational::zero());
    }
    let total = group
        .iter()
        .filter(|&&j| j != model)
        .fold(BigRational::zero(), |acc, &j| {
            acc + exact(tensor.get(model, j, state.round))
        });
    let mean = total * ratio(1, n - 1);
    Ok(if n.is_multiple_of(2) {
        mean
    } else {
        mean * ratio(n - 1, n)
    })
}
