//! Inducing round orders: weighted random orderings of a benchmark suite,
//! and difficulty tiers built from per-question outcomes.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::engine::run_ordered;
use crate::error::{CsdError, Result};
use crate::ingestion::{validate_inputs, MissingPolicy, ModelId, Round, RoundSequence, ScoreTable};
use crate::monte_carlo::{simulate, SimulationConfig, SimulationResult};
use crate::tensor::build_tensor;

/// Datasets with strictly positive importance weights and no fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSuite {
    datasets: Vec<String>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SuiteEntry {
    dataset: String,
    weight: f64,
}

impl WeightedSuite {
    pub fn new(datasets: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        if datasets.len() != weights.len() {
            return Err(CsdError::DimensionMismatch(format!(
                "{} datasets but {} weights",
                datasets.len(),
                weights.len()
            )));
        }
        if datasets.is_empty() {
            return Err(CsdError::Config("weighted suite is empty".into()));
        }
        for (d, &w) in datasets.iter().zip(&weights) {
            if !(w > 0.0 && w.is_finite()) {
                return Err(CsdError::InvalidValue(format!(
                    "weight {w} for dataset '{d}' must be positive"
                )));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for d in &datasets {
            if !seen.insert(d.as_str()) {
                return Err(CsdError::DuplicateDataset(d.clone()));
            }
        }
        Ok(WeightedSuite { datasets, weights })
    }

    pub fn datasets(&self) -> &[String] {
        &self.datasets
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.datasets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.datasets.is_empty()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let entries: Vec<SuiteEntry> =
            serde_json::from_str(s).map_err(|e| CsdError::Parse(e.to_string()))?;
        let (datasets, weights) = entries.into_iter().map(|e| (e.dataset, e.weight)).unzip();
        WeightedSuite::new(datasets, weights)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| CsdError::io(path, e))?;
        WeightedSuite::from_json_str(&text)
    }
}

/// Efraimidis–Spirakis keys in log form, `ln(u) / w`, which order exactly like `u^(1/w)`
/// but do not underflow for small weights.
pub fn sample_keys<R: Rng + ?Sized>(suite: &WeightedSuite, rng: &mut R) -> Vec<f64> {
    suite
        .weights
        .iter()
        .map(|&w| {
            let u: f64 = rng.sample(Open01);
            u.ln() / w
        })
        .collect()
}

/// Weighted random permutation of dataset indices, heaviest keys first.
pub fn sample_order<R: Rng + ?Sized>(suite: &WeightedSuite, rng: &mut R) -> Vec<usize> {
    let keys = sample_keys(suite, rng);
    order_by_keys(&keys)
}

fn order_by_keys(keys: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[b].total_cmp(&keys[a]).then(a.cmp(&b)));
    order
}

/// Expected scores when every instance first samples a round order from the suite weights.
/// Each dataset is one round; elimination histograms are indexed by contest position.
pub fn estimate_weighted(
    suite: &WeightedSuite,
    table: &ScoreTable,
    policy: MissingPolicy,
    config: &SimulationConfig,
) -> Result<SimulationResult> {
    let seq = RoundSequence::singletons(suite.datasets())?;
    let inputs = validate_inputs(table, &seq, policy)?;
    let tensor = build_tensor(&inputs);
    simulate(tensor.models(), suite.len(), config, |rng| {
        let order = sample_order(suite, rng);
        run_ordered(&tensor, &order, &config.schedule, rng, false)
    })
}

/// Outcome matrix `model × question`; `None` means no recorded attempt.
#[derive(Debug, Clone, PartialEq)]
pub struct QuestionOutcomes {
    models: Vec<ModelId>,
    questions: Vec<String>,
    outcomes: Vec<Option<bool>>,
}

#[derive(Deserialize)]
struct OutcomeRow {
    model: String,
    question_id: String,
    outcome: u8,
}

impl QuestionOutcomes {
    pub fn new(
        models: Vec<ModelId>,
        questions: Vec<String>,
        outcomes: Vec<Vec<Option<bool>>>,
    ) -> Result<Self> {
        if outcomes.len() != models.len() || outcomes.iter().any(|r| r.len() != questions.len()) {
            return Err(CsdError::DimensionMismatch(
                "outcome matrix must be models × questions".into(),
            ));
        }
        Ok(QuestionOutcomes {
            models,
            questions,
            outcomes: outcomes.into_iter().flatten().collect(),
        })
    }

    /// Reads `model,question_id,outcome` rows; models and questions keep first-seen order.
    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut model_idx: HashMap<String, usize> = HashMap::new();
        let mut question_idx: HashMap<String, usize> = HashMap::new();
        let mut models = Vec::new();
        let mut questions = Vec::new();
        let mut cells: HashMap<(usize, usize), bool> = HashMap::new();
        for (line, row) in rdr.deserialize::<OutcomeRow>().enumerate() {
            let row = row.map_err(|e| CsdError::Parse(e.to_string()))?;
            let correct = match row.outcome {
                0 => false,
                1 => true,
                other => {
                    return Err(CsdError::Parse(format!(
                        "line {}: outcome must be 0 or 1, got {other}",
                        line + 2
                    )))
                }
            };
            let m = *model_idx.entry(row.model.clone()).or_insert_with(|| {
                models.push(row.model.clone());
                models.len() - 1
            });
            let q = *question_idx
                .entry(row.question_id.clone())
                .or_insert_with(|| {
                    questions.push(row.question_id.clone());
                    questions.len() - 1
                });
            if cells.insert((m, q), correct).is_some() {
                return Err(CsdError::Parse(format!(
                    "duplicate outcome for model '{}' on question '{}'",
                    row.model, row.question_id
                )));
            }
        }
        let models = models
            .into_iter()
            .map(ModelId::new)
            .collect::<Result<Vec<_>>>()?;
        let rows = (0..models.len())
            .map(|m| {
                (0..questions.len())
                    .map(|q| cells.get(&(m, q)).copied())
                    .collect()
            })
            .collect();
        QuestionOutcomes::new(models, questions, rows)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| CsdError::io(path, e))?;
        QuestionOutcomes::from_csv_reader(text.as_bytes())
    }

    pub fn models(&self) -> &[ModelId] {
        &self.models
    }

    pub fn questions(&self) -> &[String] {
        &self.questions
    }

    pub fn get(&self, model: usize, question: usize) -> Option<bool> {
        self.outcomes[model * self.questions.len() + question]
    }

    /// `(correct, attempted)` for one question across models.
    fn tally(&self, question: usize) -> (usize, usize) {
        (0..self.models.len())
            .filter_map(|m| self.get(m, question))
            .fold((0, 0), |(c, n), ok| (c + usize::from(ok), n + 1))
    }

    /// Mean accuracy in percent over models with a recorded outcome.
    pub fn accuracy(&self, question: usize) -> Option<f64> {
        let (c, n) = self.tally(question);
        (n > 0).then(|| (c * 100) as f64 / n as f64)
    }
}

/// Accuracy interval `[lower, upper)`, or `[lower, upper]` when `include_upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracyBand {
    pub lower: f64,
    pub upper: f64,
    pub include_upper: bool,
}

impl AccuracyBand {
    pub fn contains(&self, acc: f64) -> bool {
        acc >= self.lower && (acc < self.upper || (self.include_upper && acc == self.upper))
    }

    pub fn label(&self) -> String {
        format!(
            "[{},{}{}",
            self.lower,
            self.upper,
            if self.include_upper { "]" } else { ")" }
        )
    }
}

/// Ten decile bands, easiest first: `[90,100]`, `[80,90)`, …, `[0,10)`.
pub fn decile_bands() -> Vec<AccuracyBand> {
    (0..10)
        .rev()
        .map(|d| AccuracyBand {
            lower: f64::from(d * 10),
            upper: f64::from((d + 1) * 10),
            include_upper: d == 9,
        })
        .collect()
}

fn check_bands(bands: &[AccuracyBand]) -> Result<Vec<AccuracyBand>> {
    let mut sorted = bands.to_vec();
    sorted.sort_by(|a, b| a.lower.total_cmp(&b.lower));
    let bad = |msg: &str| Err(CsdError::Config(format!("accuracy bands {msg}")));
    match (sorted.first(), sorted.last()) {
        (Some(first), Some(last)) => {
            if first.lower != 0.0 {
                return bad("must start at 0");
            }
            if last.upper != 100.0 || !last.include_upper {
                return bad("must end at 100 inclusive");
            }
        }
        _ => return bad("must not be empty"),
    }
    for w in sorted.windows(2) {
        if w[0].upper != w[1].lower || w[0].include_upper {
            return bad("must be contiguous and non-overlapping");
        }
    }
    // easiest first
    sorted.reverse();
    Ok(sorted)
}

/// Questions grouped into difficulty tiers, easiest tier first.
#[derive(Debug, Clone, PartialEq)]
pub struct TierPartition {
    pub bands: Vec<AccuracyBand>,
    /// Question indices per tier, parallel to `bands`.
    pub tiers: Vec<Vec<usize>>,
    pub accuracies: Vec<f64>,
}

pub fn build_tiers(outcomes: &QuestionOutcomes, bands: &[AccuracyBand]) -> Result<TierPartition> {
    let bands = check_bands(bands)?;
    let mut tiers = vec![Vec::new(); bands.len()];
    let mut accuracies = Vec::with_capacity(outcomes.questions.len());
    for (q, name) in outcomes.questions.iter().enumerate() {
        let acc = outcomes
            .accuracy(q)
            .ok_or_else(|| CsdError::EmptyQuestion(name.clone()))?;
        let b = bands
            .iter()
            .position(|b| b.contains(acc))
            .expect("bands cover [0, 100]");
        tiers[b].push(q);
        accuracies.push(acc);
    }
    Ok(TierPartition {
        bands,
        tiers,
        accuracies,
    })
}

/// Score table and round sequence with one synthetic dataset per non-empty tier.
#[derive(Debug, Clone, PartialEq)]
pub struct TierRounds {
    pub table: ScoreTable,
    pub sequence: RoundSequence,
    /// Human-readable notes about tiers dropped for having no questions.
    pub warnings: Vec<String>,
}

/// Turns tiers into rounds: each model's score on a tier is its accuracy (%) on
/// that tier's questions; a model with no attempts there gets a missing cell.
pub fn tier_sequence_to_rounds(
    partition: &TierPartition,
    outcomes: &QuestionOutcomes,
) -> Result<TierRounds> {
    let mut warnings = Vec::new();
    let mut rounds = Vec::new();
    let mut columns: Vec<Vec<Option<f64>>> = Vec::new();
    for (band, questions) in partition.bands.iter().zip(&partition.tiers) {
        if questions.is_empty() {
            warnings.push(format!(
                "tier {} has no questions and was dropped",
                band.label()
            ));
            continue;
        }
        let name = format!("B{}", rounds.len() + 1);
        let col = (0..outcomes.models.len())
            .map(|m| {
                let (c, n) = questions
                    .iter()
                    .filter_map(|&q| outcomes.get(m, q))
                    .fold((0usize, 0usize), |(c, n), ok| (c + usize::from(ok), n + 1));
                (n > 0).then(|| (c * 100) as f64 / n as f64)
            })
            .collect();
        columns.push(col);
        rounds.push(Round {
            label: format!("{name} {}", band.label()),
            datasets: vec![name],
        });
    }
    if rounds.is_empty() {
        return Err(CsdError::Config("no non-empty tiers".into()));
    }
    let datasets = rounds.iter().map(|r| r.datasets[0].clone()).collect();
    let rows = (0..outcomes.models.len())
        .map(|m| columns.iter().map(|c| c[m]).collect())
        .collect();
    Ok(TierRounds {
        table: ScoreTable::new(outcomes.models.clone(), datasets, rows)?,
        sequence: RoundSequence::new(rounds)?,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::instance_stream;

    fn suite(ws: &[f64]) -> WeightedSuite {
        WeightedSuite::new(
            (0..ws.len()).map(|i| format!("d{i}")).collect(),
            ws.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(WeightedSuite::new(vec!["a".into()], vec![0.0]).is_err());
        assert!(WeightedSuite::new(vec!["a".into()], vec![-1.0]).is_err());
        assert!(WeightedSuite::new(vec!["a".into()], vec![1.0, 2.0]).is_err());
        assert!(WeightedSuite::from_json_str(r#"[{"dataset":"a","weight":2}]"#).is_ok());
    }

    #[test]
    fn single_dataset_is_identity() {
        let mut rng = instance_stream(0, 0);
        assert_eq!(sample_order(&suite(&[3.0]), &mut rng), vec![0]);
    }

    #[test]
    fn keys_descend_along_order() {
        let s = suite(&[1.0, 5.0, 0.01, 2.0, 2.0]);
        for i in 0..200 {
            let mut rng = instance_stream(4, i);
            let keys = sample_keys(&s, &mut rng);
            let order = order_by_keys(&keys);
            assert!(order.windows(2).all(|w| keys[w[0]] > keys[w[1]]));
        }
    }

    #[test]
    fn heavy_weight_first() {
        let s = suite(&[1e6, 1.0, 1.0]);
        let hits = (0..10_000)
            .filter(|&i| sample_order(&s, &mut instance_stream(8, i))[0] == 0)
            .count();
        assert!(hits as f64 / 10_000.0 >= 0.99);
    }

    fn outcomes(rows: &[(&str, &str, u8)]) -> QuestionOutcomes {
        let mut csv = String::from("model,question_id,outcome\n");
        for (m, q, o) in rows {
            csv.push_str(&format!("{m},{q},{o}\n"));
        }
        QuestionOutcomes::from_csv_reader(csv.as_bytes()).unwrap()
    }

    #[test]
    fn outcome_parsing_errors() {
        let bad = "model,question_id,outcome\na,q,2\n";
        assert!(QuestionOutcomes::from_csv_reader(bad.as_bytes()).is_err());
        let dup = "model,question_id,outcome\na,q,1\na,q,0\n";
        assert!(QuestionOutcomes::from_csv_reader(dup.as_bytes()).is_err());
    }

    #[test]
    fn decile_bands_shape() {
        let b = decile_bands();
        assert_eq!(b.len(), 10);
        assert_eq!(b[0].label(), "[90,100]");
        assert_eq!(b[9].label(), "[0,10)");
        assert!(check_bands(&b).is_ok());
        assert!(check_bands(&b[1..]).is_err());
    }

    #[test]
    fn banding() {
        let mut rows = Vec::new();
        for m in 0..10 {
            let name = format!("m{m}");
            rows.push((name.clone(), "easy", 1));
            rows.push((name.clone(), "thirty", u8::from(m < 3)));
        }
        let rows: Vec<(&str, &str, u8)> =
            rows.iter().map(|(m, q, o)| (m.as_str(), *q, *o)).collect();
        let o = outcomes(&rows);
        let p = build_tiers(&o, &decile_bands()).unwrap();
        assert_eq!(p.tiers[0], vec![0]);
        // [30,40) is the seventh band from the top
        assert_eq!(p.bands[6].label(), "[30,40)");
        assert_eq!(p.tiers[6], vec![1]);
        let total: usize = p.tiers.iter().map(Vec::len).sum();
        assert_eq!(total, 2);
    }

    #[test]
    fn all_correct_gives_one_round() {
        let o = outcomes(&[
            ("a", "q1", 1),
            ("a", "q2", 1),
            ("b", "q1", 1),
            ("b", "q2", 1),
        ]);
        let p = build_tiers(&o, &decile_bands()).unwrap();
        let tr = tier_sequence_to_rounds(&p, &o).unwrap();
        assert_eq!(tr.sequence.len(), 1);
        assert_eq!(tr.warnings.len(), 9);
        assert_eq!(tr.table.score(0, 0), Some(100.0));
        assert!(validate_inputs(&tr.table, &tr.sequence, MissingPolicy::Error).is_ok());
    }

    #[test]
    fn missing_outcomes_excluded_from_denominator() {
        // q answered by a only; b has no row for q
        let o = outcomes(&[("a", "q", 1), ("b", "r", 0), ("a", "r", 0)]);
        assert_eq!(o.accuracy(0), Some(100.0));
        assert_eq!(o.get(1, 0), None);
    }

    #[test]
    fn empty_question_is_an_error() {
        let o = QuestionOutcomes::new(
            vec![ModelId::new("a").unwrap()],
            vec!["q".into()],
            vec![vec![None]],
        )
        .unwrap();
        assert!(matches!(
            build_tiers(&o, &decile_bands()),
            Err(CsdError::EmptyQuestion(_))
        ));
    }
}
