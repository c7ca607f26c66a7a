//! Failure sensitivity analysis: how a model's expected score responds to
//! rising elimination pressure.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{CsdError, Result};
use crate::ingestion::ModelId;
use crate::monte_carlo::{estimate_sweep, SimulationConfig, SimulationResult};
use crate::tensor::WinRateTensor;

pub const DEFAULT_T_GRID: [usize; 3] = [0, 1, 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RiskClass {
    RobustGeneralist,
    AggressiveSpecialist,
    Intermediate,
}

impl RiskClass {
    pub fn as_str(self) -> &'static str {
        match self {
            RiskClass::RobustGeneralist => "robust_generalist",
            RiskClass::AggressiveSpecialist => "aggressive_specialist",
            RiskClass::Intermediate => "intermediate",
        }
    }
}

/// Slope thresholds used for classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FsaThresholds {
    /// Slopes at or below this (negative) value are aggressive specialists.
    pub lambda_specialist: f64,
    /// Slopes with absolute value within this band are robust generalists.
    pub lambda_generalist_band: f64,
}

impl FsaThresholds {
    /// Defaults scaled with contest length: `−0.15·K/12` and `0.03·K/12`.
    /// These cut-offs are arbitrary and meant to be overridden.
    pub fn for_rounds(k: usize) -> Self {
        let scale = k as f64 / 12.0;
        FsaThresholds {
            lambda_specialist: -0.15 * scale,
            lambda_generalist_band: 0.03 * scale,
        }
    }

    fn check(&self) -> Result<()> {
        if self.lambda_specialist.is_nan() || self.lambda_specialist >= 0.0 {
            return Err(CsdError::Config(
                "lambda_specialist must be negative".into(),
            ));
        }
        if self.lambda_generalist_band.is_nan() || self.lambda_generalist_band < 0.0 {
            return Err(CsdError::Config(
                "lambda_generalist_band must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn classify(&self, lambda: f64) -> RiskClass {
        if lambda.abs() <= self.lambda_generalist_band {
            RiskClass::RobustGeneralist
        } else if lambda <= self.lambda_specialist {
            RiskClass::AggressiveSpecialist
        } else {
            RiskClass::Intermediate
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FsaEntry {
    pub model: ModelId,
    /// Expected score at the smallest t in the grid (t = 0 on the default grid).
    pub base_score: f64,
    /// Least-squares slope of the expected score against t.
    pub lambda: f64,
    /// `E[S | t=2] − E[S | t=0]` when the grid contains both.
    pub delta: Option<f64>,
    /// `delta / 2`.
    pub endpoint_lambda: Option<f64>,
    pub class: RiskClass,
    /// Largest standard error along this model's curve.
    pub max_std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FsaReport {
    pub t_grid: Vec<usize>,
    pub thresholds: FsaThresholds,
    pub entries: Vec<FsaEntry>,
    /// One simulation per grid point, in grid order.
    pub curve: Vec<SimulationResult>,
}

/// Least-squares slope of `ys` against `xs`. With two points this is exactly the secant.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    if xs.len() == 2 {
        return (ys[1] - ys[0]) / (xs[1] - xs[0]);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Sweeps the elimination count over `t_grid` and summarizes each model's curve.
pub fn fsa(
    tensor: &WinRateTensor,
    config: &SimulationConfig,
    t_grid: &[usize],
    thresholds: FsaThresholds,
) -> Result<FsaReport> {
    let mut distinct = t_grid.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(CsdError::Config(
            "t grid needs at least two distinct values".into(),
        ));
    }
    thresholds.check()?;
    let curve: Vec<SimulationResult> = estimate_sweep(tensor, config, t_grid)?
        .into_iter()
        .map(|(_, r)| r)
        .collect();
    let xs: Vec<f64> = t_grid.iter().map(|&t| t as f64).collect();
    let base_idx = (0..t_grid.len()).min_by_key(|&i| t_grid[i]).unwrap();
    let pos = |t: usize| t_grid.iter().position(|&x| x == t);
    let endpoints = pos(0).zip(pos(2));

    let entries = tensor
        .models()
        .iter()
        .enumerate()
        .map(|(m, id)| {
            let ys: Vec<f64> = curve.iter().map(|r| r.expected_scores[m]).collect();
            let lambda = slope(&xs, &ys);
            let delta = endpoints.map(|(a, b)| ys[b] - ys[a]);
            FsaEntry {
                model: id.clone(),
                base_score: ys[base_idx],
                lambda,
                delta,
                endpoint_lambda: delta.map(|d| d / 2.0),
                class: thresholds.classify(lambda),
                max_std_error: curve.iter().map(|r| r.std_error[m]).fold(0.0, f64::max),
            }
        })
        .collect();
    Ok(FsaReport {
        t_grid: t_grid.to_vec(),
        thresholds,
        entries,
        curve,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl FsaReport {
    /// `model,base_score,lambda,delta,class`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,base_score,lambda,delta,class\n");
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                e.model,
                e.base_score,
                e.lambda,
                fmt_opt(e.delta),
                e.class.as_str()
            );
        }
        out
    }

    /// Long-format plot data: `t,model,e_score,std_err`.
    pub fn plot_csv(&self) -> String {
        let mut out = String::from("t,model,e_score,std_err\n");
        for (t, r) in self.t_grid.iter().zip(&self.curve) {
            for (m, id) in r.models.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    t, id, r.expected_scores[m], r.std_error[m]
                );
            }
        }
        out
    }

    pub fn to_json_string(&self) -> String {
        #[derive(Serialize)]
        struct Point {
            t: usize,
            e_score: f64,
            std_err: f64,
            survival: f64,
        }
        #[derive(Serialize)]
        struct Model<'a> {
            #[serde(flatten)]
            entry: &'a FsaEntry,
            curve: Vec<Point>,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            t_grid: &'a [usize],
            lambda_specialist: f64,
            lambda_generalist_band: f64,
            seeds: Vec<u64>,
            iterations: u64,
            models: Vec<Model<'a>>,
        }
        let doc = Doc {
            t_grid: &self.t_grid,
            lambda_specialist: self.thresholds.lambda_specialist,
            lambda_generalist_band: self.thresholds.lambda_generalist_band,
            seeds: self.curve.iter().map(|r| r.seed).collect(),
            iterations: self.curve.first().map(|r| r.iterations).unwrap_or(0),
            models: self
                .entries
                .iter()
                .enumerate()
                .map(|(m, entry)| Model {
                    entry,
                    curve: self
                        .t_grid
                        .iter()
                        .zip(&self.curve)
                        .map(|(&t, r)| Point {
                            t,
                            e_score: r.expected_scores[m],
                            std_err: r.std_error[m],
                            survival: r.survival_prob[m],
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("fsa report serializes")
    }
}
