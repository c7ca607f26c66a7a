//! The pairwise win-rate tensor and the score perturbations applied before building it.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CsdError, Result};
use crate::ingestion::{check_score, ModelId, ScoreTable, ValidatedInputs};

const ANTISYMMETRY_TOL: f64 = 1e-12;

/// `M×M×K` win probabilities; `get(i, j, k)` is the chance that `i` beats `j` in round `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct WinRateTensor {
    models: Vec<ModelId>,
    round_labels: Vec<String>,
    entries: Vec<f64>,
}

impl WinRateTensor {
    /// Builds a tensor from a function giving `P(i beats j in round k)` for `i < j`.
    /// The lower triangle is filled as the complement and the diagonal with 0.5.
    pub fn from_fn<F>(models: Vec<ModelId>, round_labels: Vec<String>, mut p: F) -> Result<Self>
    where
        F: FnMut(usize, usize, usize) -> f64,
    {
        let m = models.len();
        let k = round_labels.len();
        let mut entries = vec![0.5; m * m * k];
        for r in 0..k {
            for i in 0..m {
                for j in (i + 1)..m {
                    let v = p(i, j, r);
                    if !(0.0..=1.0).contains(&v) {
                        return Err(CsdError::InvalidValue(format!(
                            "win probability {v} at ({i},{j},{r}) outside [0,1]"
                        )));
                    }
                    entries[(i * m + j) * k + r] = v;
                    entries[(j * m + i) * k + r] = 1.0 - v;
                }
            }
        }
        Ok(WinRateTensor {
            models,
            round_labels,
            entries,
        })
    }

    /// Builds a tensor from nested `[i][j][k]` entries, checking range and antisymmetry.
    pub fn from_nested(
        models: Vec<ModelId>,
        round_labels: Vec<String>,
        w: &[Vec<Vec<f64>>],
    ) -> Result<Self> {
        let m = models.len();
        let k = round_labels.len();
        if w.len() != m || w.iter().any(|row| row.len() != m) {
            return Err(CsdError::DimensionMismatch(format!(
                "tensor must be {m}x{m}x{k}"
            )));
        }
        let mut entries = Vec::with_capacity(m * m * k);
        for (i, row) in w.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                if cell.len() != k {
                    return Err(CsdError::DimensionMismatch(format!(
                        "entry ({i},{j}) has {} rounds, expected {k}",
                        cell.len()
                    )));
                }
                for (r, &v) in cell.iter().enumerate() {
                    if !(0.0..=1.0).contains(&v) {
                        return Err(CsdError::InvalidValue(format!(
                            "win probability {v} at ({i},{j},{r}) outside [0,1]"
                        )));
                    }
                    if i != j && (v + w[j][i][r] - 1.0).abs() > ANTISYMMETRY_TOL {
                        return Err(CsdError::InvalidValue(format!(
                            "entries ({i},{j},{r}) and ({j},{i},{r}) do not sum to 1"
                        )));
                    }
                }
                entries.extend_from_slice(cell);
            }
        }
        Ok(WinRateTensor {
            models,
            round_labels,
            entries,
        })
    }

    pub fn num_models(&self) -> usize {
        self.models.len()
    }

    pub fn num_rounds(&self) -> usize {
        self.round_labels.len()
    }

    pub fn models(&self) -> &[ModelId] {
        &self.models
    }

    pub fn round_labels(&self) -> &[String] {
        &self.round_labels
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, round: usize) -> f64 {
        let m = self.models.len();
        self.entries[(i * m + j) * self.round_labels.len() + round]
    }

    /// Tensor with models reordered so that new index `n` is old index `perm[n]`.
    pub fn permuted_models(&self, perm: &[usize]) -> WinRateTensor {
        let k = self.num_rounds();
        let mut entries = Vec::with_capacity(self.entries.len());
        for &pi in perm {
            for &pj in perm {
                entries.extend((0..k).map(|r| self.get(pi, pj, r)));
            }
        }
        WinRateTensor {
            models: perm.iter().map(|&p| self.models[p].clone()).collect(),
            round_labels: self.round_labels.clone(),
            entries,
        }
    }

    pub fn to_json_string(&self) -> String {
        let m = self.num_models();
        let k = self.num_rounds();
        let w = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| (0..k).map(|r| self.get(i, j, r)).collect())
                    .collect()
            })
            .collect();
        let doc = TensorJson {
            layout: "ijk".into(),
            models: self.models.iter().map(|m| m.to_string()).collect(),
            rounds: self.round_labels.clone(),
            w,
        };
        serde_json::to_string(&doc).expect("tensor serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: TensorJson =
            serde_json::from_str(s).map_err(|e| CsdError::Parse(e.to_string()))?;
        if doc.layout != "ijk" {
            return Err(CsdError::Parse(format!(
                "unsupported tensor layout '{}', expected 'ijk'",
                doc.layout
            )));
        }
        let models = doc
            .models
            .into_iter()
            .map(ModelId::new)
            .collect::<Result<Vec<_>>>()?;
        WinRateTensor::from_nested(models, doc.rounds, &doc.w)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| CsdError::io(path, e))?;
        WinRateTensor::from_json_str(&text)
    }
}

#[derive(Serialize, Deserialize)]
struct TensorJson {
    layout: String,
    models: Vec<String>,
    rounds: Vec<String>,
    w: Vec<Vec<Vec<f64>>>,
}

/// Which side of a single-dataset comparison wins: `1.0`, `0.5` or `0.0` for model `i`.
fn dataset_points(a: Option<f64>, b: Option<f64>) -> f64 {
    match (a, b) {
        (Some(x), Some(y)) if x > y => 1.0,
        (Some(x), Some(y)) if x < y => 0.0,
        (Some(_), Some(_)) => 0.5,
        (Some(_), None) => 1.0,
        (None, Some(_)) => 0.0,
        (None, None) => 0.5,
    }
}

/// Builds the tensor: in each round, `i` beats `j` when it wins the majority
/// of the round's datasets (ties on a dataset count half to each side).
/// Exact deadlock gives 0.5.
pub fn build_tensor(inputs: &ValidatedInputs) -> WinRateTensor {
    let table = inputs.table();
    let cols = inputs.round_columns();
    WinRateTensor::from_fn(
        table.models().to_vec(),
        inputs.sequence().labels(),
        |i, j, r| {
            // doubled to keep the half points integral
            let doubled: u32 = cols[r]
                .iter()
                .map(|&c| (2.0 * dataset_points(table.score(i, c), table.score(j, c))) as u32)
                .sum();
            let n = cols[r].len() as u32;
            match doubled.cmp(&n) {
                std::cmp::Ordering::Greater => 1.0,
                std::cmp::Ordering::Less => 0.0,
                std::cmp::Ordering::Equal => 0.5,
            }
        },
    )
    .expect("built entries are in {0, 0.5, 1}")
}

/// A single cell overwrite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub model: String,
    pub dataset: String,
    pub score: f64,
}

impl Perturbation {
    pub fn new(model: impl Into<String>, dataset: impl Into<String>, score: f64) -> Self {
        Perturbation {
            model: model.into(),
            dataset: dataset.into(),
            score,
        }
    }
}

/// Returns a copy of `table` with exactly the targeted cells overwritten.
pub fn perturb_scores(table: &ScoreTable, targets: &[Perturbation]) -> Result<ScoreTable> {
    let mut out = table.clone();
    for t in targets {
        let m = table
            .model_index(&t.model)
            .ok_or_else(|| CsdError::UnknownModel(t.model.clone()))?;
        let d = table
            .dataset_index(&t.dataset)
            .ok_or_else(|| CsdError::UnknownDataset(t.dataset.clone()))?;
        check_score(&t.model, &t.dataset, t.score)?;
        out.set_score(m, d, t.score);
    }
    Ok(out)
}

/// Reads perturbations from CSV with header `model,dataset,score`.
pub fn load_perturbations(path: impl AsRef<Path>) -> Result<Vec<Perturbation>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| CsdError::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    rdr.deserialize()
        .map(|r| r.map_err(|e| CsdError::Parse(e.to_string())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingestion::{validate_inputs, MissingPolicy, Round, RoundSequence};

    fn tensor_for(rows: &[Vec<f64>], rounds: &[&[&str]], datasets: &[&str]) -> WinRateTensor {
        let names: Vec<String> = (0..rows.len()).map(|i| format!("m{i}")).collect();
        let t = ScoreTable::from_complete(&names, datasets, rows).unwrap();
        let seq = RoundSequence::new(
            rounds
                .iter()
                .enumerate()
                .map(|(k, ds)| Round {
                    label: format!("r{k}"),
                    datasets: ds.iter().map(|d| d.to_string()).collect(),
                })
                .collect(),
        )
        .unwrap();
        build_tensor(&validate_inputs(&t, &seq, MissingPolicy::Error).unwrap())
    }

    #[test]
    fn strict_dominance_single_dataset() {
        let w = tensor_for(&[vec![80.0], vec![70.0]], &[&["d"]], &["d"]);
        assert_eq!(w.get(0, 1, 0), 1.0);
        assert_eq!(w.get(1, 0, 0), 0.0);
        assert_eq!(w.get(0, 0, 0), 0.5);
    }

    #[test]
    fn split_round_is_half() {
        let w = tensor_for(
            &[vec![80.0, 10.0], vec![70.0, 20.0]],
            &[&["a", "b"]],
            &["a", "b"],
        );
        assert_eq!(w.get(0, 1, 0), 0.5);
    }

    #[test]
    fn majority_of_three() {
        // tally by hand: i wins a, loses b and c -> 1 of 3
        let w = tensor_for(
            &[vec![90.0, 40.0, 40.0], vec![10.0, 50.0, 50.0]],
            &[&["a", "b", "c"]],
            &["a", "b", "c"],
        );
        assert_eq!(w.get(0, 1, 0), 0.0);
        assert_eq!(w.get(1, 0, 0), 1.0);
    }

    #[test]
    fn equal_dataset_counts_half() {
        // i: win, tie, lose -> f = 0.5
        let w = tensor_for(
            &[vec![90.0, 50.0, 10.0], vec![10.0, 50.0, 90.0]],
            &[&["a", "b", "c"]],
            &["a", "b", "c"],
        );
        assert_eq!(w.get(0, 1, 0), 0.5);
    }

    #[test]
    fn missing_cells_lose_under_treat_as_loss() {
        let csv = "model,a,b\nx,,\ny,0,\nz,,\n";
        let t = ScoreTable::from_csv_reader(csv.as_bytes()).unwrap();
        let seq = RoundSequence::singletons(&["a", "b"]).unwrap();
        let v = validate_inputs(&t, &seq, MissingPolicy::TreatAsLoss).unwrap();
        let w = build_tensor(&v);
        assert_eq!(w.get(1, 0, 0), 1.0); // present 0 beats missing
        assert_eq!(w.get(0, 2, 0), 0.5); // both missing
        assert_eq!(w.get(0, 1, 1), 0.5);
    }

    #[test]
    fn json_roundtrip_and_layout_check() {
        let w = tensor_for(
            &[vec![1.0, 2.0], vec![2.0, 1.0], vec![3.0, 3.0]],
            &[&["a"], &["b"]],
            &["a", "b"],
        );
        let back = WinRateTensor::from_json_str(&w.to_json_string()).unwrap();
        assert_eq!(back, w);
        let bad = w.to_json_string().replace("\"ijk\"", "\"kij\"");
        assert!(WinRateTensor::from_json_str(&bad).is_err());
    }

    #[test]
    fn nested_rejects_non_antisymmetric() {
        let models = vec![ModelId::new("a").unwrap(), ModelId::new("b").unwrap()];
        let w = vec![vec![vec![0.5], vec![0.7]], vec![vec![0.7], vec![0.5]]];
        assert!(WinRateTensor::from_nested(models.clone(), vec!["r".into()], &w).is_err());
        let ok = vec![vec![vec![0.5], vec![0.7]], vec![vec![0.3], vec![0.5]]];
        assert!(WinRateTensor::from_nested(models, vec!["r".into()], &ok).is_ok());
    }

    #[test]
    fn perturb_touches_only_targets() {
        let t = ScoreTable::from_complete(
            &["q", "r"],
            &["IFEval", "MulDimIF", "MMLU", "GPQA"],
            &[vec![80.0, 70.0, 60.0, 50.0], vec![1.0, 2.0, 3.0, 4.0]],
        )
        .unwrap();
        let diff = |a: &ScoreTable, b: &ScoreTable| {
            (0..a.num_models())
                .flat_map(|m| (0..a.num_datasets()).map(move |d| (m, d)))
                .filter(|&(m, d)| a.score(m, d) != b.score(m, d))
                .count()
        };
        let two = perturb_scores(
            &t,
            &[
                Perturbation::new("q", "IFEval", 0.0),
                Perturbation::new("q", "MulDimIF", 0.0),
            ],
        )
        .unwrap();
        assert_eq!(diff(&t, &two), 2);
        let four = perturb_scores(
            &t,
            &["IFEval", "MulDimIF", "MMLU", "GPQA"].map(|d| Perturbation::new("q", d, 0.0)),
        )
        .unwrap();
        assert_eq!(diff(&t, &four), 4);
        assert_eq!(perturb_scores(&t, &[]).unwrap(), t);
        assert_eq!(t.score(0, 0), Some(80.0));
    }

    #[test]
    fn perturb_errors() {
        let t = ScoreTable::from_complete(&["q"], &["d"], &[vec![1.0]]).unwrap();
        assert!(matches!(
            perturb_scores(&t, &[Perturbation::new("nobody", "d", 0.0)]),
            Err(CsdError::UnknownModel(_))
        ));
        assert!(matches!(
            perturb_scores(&t, &[Perturbation::new("q", "zz", 0.0)]),
            Err(CsdError::UnknownDataset(_))
        ));
        assert!(matches!(
            perturb_scores(&t, &[Perturbation::new("q", "d", -1.0)]),
            Err(CsdError::Domain { .. })
        ));
    }

    #[test]
    fn permuted_models_relabels() {
        let w = tensor_for(&[vec![1.0], vec![2.0], vec![3.0]], &[&["a"]], &["a"]);
        let p = w.permuted_models(&[2, 0, 1]);
        assert_eq!(p.models()[0].as_str(), "m2");
        assert_eq!(p.get(0, 1, 0), w.get(2, 0, 0));
        assert_eq!(p.get(1, 2, 0), w.get(0, 1, 0));
    }
}
