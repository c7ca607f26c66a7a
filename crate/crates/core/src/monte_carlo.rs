//! Monte Carlo estimation of expected win scores.
//!
//! Instances are split into fixed-size chunks that are independent of the
//! worker count. Each instance draws from its own stream derived from
//! `(seed, instance index)`, and all accumulators are integers, so the
//! result is bitwise identical no matter how many threads run it.

use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{run_ordered, EliminationSchedule, InstanceResult};
use crate::error::{CsdError, Result};
use crate::ingestion::ModelId;
use crate::rng::{derive_seed, instance_stream, StreamRng};
use crate::tensor::WinRateTensor;

pub const DEFAULT_ITERATIONS: u64 = 10_000;

const CHUNK: u64 = 1024;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationConfig {
    pub iterations: u64,
    pub seed: u64,
    pub schedule: EliminationSchedule,
    /// Worker threads; 0 picks the rayon default.
    pub workers: usize,
}

impl SimulationConfig {
    pub fn new(iterations: u64, seed: u64, t: usize) -> Self {
        SimulationConfig {
            iterations,
            seed,
            schedule: EliminationSchedule::constant(t),
            workers: 0,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_schedule(mut self, schedule: EliminationSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    fn check(&self, rounds: usize) -> Result<()> {
        if self.iterations == 0 {
            return Err(CsdError::Config("iterations must be at least 1".into()));
        }
        self.schedule.check(rounds)
    }
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig::new(DEFAULT_ITERATIONS, 0, 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub models: Vec<ModelId>,
    pub expected_scores: Vec<f64>,
    pub std_error: Vec<f64>,
    pub survival_prob: Vec<f64>,
    /// `elim_histogram[m][k]`: instances in which `m` was eliminated after round `k`.
    pub elim_histogram: Vec<Vec<u64>>,
    /// Mean number of matches played per instance.
    pub mean_pairs_played: f64,
    pub iterations: u64,
    pub seed: u64,
    pub schedule: EliminationSchedule,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Accumulator {
    sum: Vec<u64>,
    sum_sq: Vec<u64>,
    survived: Vec<u64>,
    hist: Vec<Vec<u64>>,
    pairs: u64,
}

impl Accumulator {
    fn new(m: usize, k: usize) -> Self {
        Accumulator {
            sum: vec![0; m],
            sum_sq: vec![0; m],
            survived: vec![0; m],
            hist: vec![vec![0; k]; m],
            pairs: 0,
        }
    }

    fn add(&mut self, r: &InstanceResult) {
        for (m, s) in r.scores.iter().enumerate() {
            let h = u64::from(s.half_points());
            self.sum[m] += h;
            self.sum_sq[m] += h * h;
            match r.eliminated_in[m] {
                Some(k) => self.hist[m][k] += 1,
                None => self.survived[m] += 1,
            }
        }
        self.pairs += r.pairs_played as u64;
    }

    fn merge(&mut self, other: &Accumulator) {
        for m in 0..self.sum.len() {
            self.sum[m] += other.sum[m];
            self.sum_sq[m] += other.sum_sq[m];
            self.survived[m] += other.survived[m];
            for (a, b) in self.hist[m].iter_mut().zip(&other.hist[m]) {
                *a += b;
            }
        }
        self.pairs += other.pairs;
    }
}

/// Runs `config.iterations` instances produced by `run_instance` and aggregates them.
pub(crate) fn simulate<F>(
    models: &[ModelId],
    rounds: usize,
    config: &SimulationConfig,
    run_instance: F,
) -> Result<SimulationResult>
where
    F: Fn(&mut StreamRng) -> InstanceResult + Sync,
{
    config.check(rounds)?;
    let m = models.len();
    let n = config.iterations;
    let chunks = n.div_ceil(CHUNK);
    let work = || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = Accumulator::new(m, rounds);
                for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                    let mut rng = instance_stream(config.seed, i);
                    acc.add(&run_instance(&mut rng));
                }
                acc
            })
            .collect::<Vec<_>>()
    };
    let partials = if config.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| CsdError::Config(e.to_string()))?
            .install(work)
    } else {
        work()
    };
    let mut total = Accumulator::new(m, rounds);
    for p in &partials {
        total.merge(p);
    }

    let nf = n as f64;
    let mut expected_scores = Vec::with_capacity(m);
    let mut std_error = Vec::with_capacity(m);
    for i in 0..m {
        expected_scores.push(total.sum[i] as f64 / (2.0 * nf));
        // exact integer numerator: N·Σh² − (Σh)², in half-points squared
        let num = u128::from(n) * u128::from(total.sum_sq[i]) - u128::from(total.sum[i]).pow(2);
        let se = if n > 1 {
            let var = num as f64 / (4.0 * nf * (nf - 1.0));
            (var / nf).sqrt()
        } else {
            0.0
        };
        std_error.push(se);
    }
    Ok(SimulationResult {
        models: models.to_vec(),
        expected_scores,
        std_error,
        survival_prob: total.survived.iter().map(|&s| s as f64 / nf).collect(),
        elim_histogram: total.hist,
        mean_pairs_played: total.pairs as f64 / nf,
        iterations: n,
        seed: config.seed,
        schedule: config.schedule.clone(),
    })
}

/// Estimates `E[S_m]` for every model by averaging `config.iterations` contests.
pub fn estimate(tensor: &WinRateTensor, config: &SimulationConfig) -> Result<SimulationResult> {
    let k = tensor.num_rounds();
    if k == 0 {
        return Err(CsdError::DimensionMismatch("tensor has no rounds".into()));
    }
    let order: Vec<usize> = (0..k).collect();
    simulate(tensor.models(), k, config, |rng| {
        run_ordered(tensor, &order, &config.schedule, rng, false)
    })
}

/// Seed used for entry `index` of a sweep rooted at `seed`.
pub fn sweep_seed(seed: u64, index: usize) -> u64 {
    derive_seed(seed, index as u64)
}

/// One full estimate per elimination count, each with its own derived seed.
pub fn estimate_sweep(
    tensor: &WinRateTensor,
    config: &SimulationConfig,
    t_values: &[usize],
) -> Result<Vec<(usize, SimulationResult)>> {
    if t_values.is_empty() {
        return Err(CsdError::Config("sweep needs at least one t value".into()));
    }
    t_values
        .iter()
        .enumerate()
        .map(|(idx, &t)| {
            let cfg = config
                .clone()
                .with_seed(sweep_seed(config.seed, idx))
                .with_schedule(EliminationSchedule::constant(t));
            estimate(tensor, &cfg).map(|r| (t, r))
        })
        .collect()
}

#[derive(Serialize)]
#[serde(untagged)]
enum TField<'a> {
    Constant(usize),
    PerRound(&'a [usize]),
}

#[derive(Serialize)]
struct ResultJson<'a> {
    seed: u64,
    iterations: u64,
    t: TField<'a>,
    models: Vec<&'a str>,
    e_score: &'a [f64],
    std_err: &'a [f64],
    survival: &'a [f64],
    elim_hist: &'a [Vec<u64>],
}

impl SimulationResult {
    pub fn to_json_string(&self) -> String {
        let t = match &self.schedule {
            EliminationSchedule::Constant(t) => TField::Constant(*t),
            EliminationSchedule::PerRound(ts) => TField::PerRound(ts),
        };
        let doc = ResultJson {
            seed: self.seed,
            iterations: self.iterations,
            t,
            models: self.models.iter().map(ModelId::as_str).collect(),
            e_score: &self.expected_scores,
            std_err: &self.std_error,
            survival: &self.survival_prob,
            elim_hist: &self.elim_histogram,
        };
        serde_json::to_string_pretty(&doc).expect("result serializes")
    }
}
