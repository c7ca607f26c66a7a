//! Loading and validating benchmark score tables and round sequences.
//!
//! A [`ScoreTable`] holds raw model×dataset scores on a percentage scale,
//! a [`RoundSequence`] groups datasets into ordered tournament rounds, and
//! [`validate_inputs`] checks the two against each other under an explicit
//! [`MissingPolicy`].

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CsdError, Result};

/// Name of a model, unique within a [`ScoreTable`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModelId(String);

impl ModelId {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(CsdError::InvalidValue(
                "model name must be non-empty".into(),
            ));
        }
        Ok(ModelId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreFormat {
    Csv,
    Json,
}

impl ScoreFormat {
    /// Guesses the format from a file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => ScoreFormat::Json,
            _ => ScoreFormat::Csv,
        }
    }
}

/// Dense model×dataset score matrix. `None` marks a missing cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    models: Vec<ModelId>,
    datasets: Vec<String>,
    scores: Vec<Option<f64>>,
}

impl ScoreTable {
    /// Builds a table from rows of scores, one row per model.
    pub fn new(
        models: Vec<ModelId>,
        datasets: Vec<String>,
        rows: Vec<Vec<Option<f64>>>,
    ) -> Result<Self> {
        if rows.len() != models.len() {
            return Err(CsdError::DimensionMismatch(format!(
                "{} score rows for {} models",
                rows.len(),
                models.len()
            )));
        }
        let mut seen = HashSet::new();
        for m in &models {
            if !seen.insert(m.as_str()) {
                return Err(CsdError::DuplicateModel(m.to_string()));
            }
        }
        let mut seen = HashSet::new();
        for d in &datasets {
            if d.trim().is_empty() {
                return Err(CsdError::Parse("empty dataset name in header".into()));
            }
            if !seen.insert(d.as_str()) {
                return Err(CsdError::DuplicateDataset(d.clone()));
            }
        }
        let mut scores = Vec::with_capacity(models.len() * datasets.len());
        for (model, row) in models.iter().zip(rows) {
            if row.len() != datasets.len() {
                return Err(CsdError::DimensionMismatch(format!(
                    "model '{}' has {} scores for {} datasets",
                    model,
                    row.len(),
                    datasets.len()
                )));
            }
            for (dataset, value) in datasets.iter().zip(&row) {
                if let Some(v) = value {
                    check_score(model.as_str(), dataset, *v)?;
                }
            }
            scores.extend(row);
        }
        Ok(ScoreTable {
            models,
            datasets,
            scores,
        })
    }

    /// Convenience constructor for complete tables with string model names.
    pub fn from_complete<S: AsRef<str>, D: AsRef<str>>(
        models: &[S],
        datasets: &[D],
        rows: &[Vec<f64>],
    ) -> Result<Self> {
        let models = models
            .iter()
            .map(|m| ModelId::new(m.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let datasets = datasets.iter().map(|d| d.as_ref().to_string()).collect();
        let rows = rows
            .iter()
            .map(|r| r.iter().copied().map(Some).collect())
            .collect();
        ScoreTable::new(models, datasets, rows)
    }

    pub fn models(&self) -> &[ModelId] {
        &self.models
    }

    pub fn datasets(&self) -> &[String] {
        &self.datasets
    }

    pub fn num_models(&self) -> usize {
        self.models.len()
    }

    pub fn num_datasets(&self) -> usize {
        self.datasets.len()
    }

    pub fn score(&self, model: usize, dataset: usize) -> Option<f64> {
        self.scores[model * self.datasets.len() + dataset]
    }

    pub(crate) fn set_score(&mut self, model: usize, dataset: usize, value: f64) {
        let n = self.datasets.len();
        self.scores[model * n + dataset] = Some(value);
    }

    pub fn model_index(&self, name: &str) -> Option<usize> {
        self.models.iter().position(|m| m.as_str() == name)
    }

    pub fn dataset_index(&self, name: &str) -> Option<usize> {
        self.datasets.iter().position(|d| d == name)
    }

    pub fn row(&self, model: usize) -> &[Option<f64>] {
        let n = self.datasets.len();
        &self.scores[model * n..(model + 1) * n]
    }

    pub fn missing_count(&self) -> usize {
        self.scores.iter().filter(|s| s.is_none()).count()
    }

    /// Parses the CSV layout `model,<dataset1>,<dataset2>,...`; empty cells are missing.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| CsdError::Parse(e.to_string()))?
            .clone();
        let mut cols = headers.iter();
        match cols.next() {
            Some(first) if first.eq_ignore_ascii_case("model") => {}
            _ => {
                return Err(CsdError::Parse(
                    "score CSV header must start with 'model'".into(),
                ))
            }
        }
        let datasets: Vec<String> = cols.map(str::to_string).collect();
        let mut models = Vec::new();
        let mut rows = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| CsdError::Parse(e.to_string()))?;
            let mut fields = record.iter();
            let name = fields.next().unwrap_or_default();
            let model = ModelId::new(name)
                .map_err(|_| CsdError::Parse(format!("row {}: empty model name", line + 2)))?;
            let row = fields
                .enumerate()
                .map(|(c, cell)| {
                    if cell.is_empty() {
                        Ok(None)
                    } else {
                        cell.parse::<f64>().map(Some).map_err(|_| {
                            CsdError::Parse(format!(
                                "row {} ('{}'), column '{}': '{}' is not a number",
                                line + 2,
                                model,
                                datasets.get(c).map(String::as_str).unwrap_or("?"),
                                cell
                            ))
                        })
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            models.push(model);
            rows.push(row);
        }
        ScoreTable::new(models, datasets, rows)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: ScoreTableJson =
            serde_json::from_str(s).map_err(|e| CsdError::Parse(e.to_string()))?;
        let models = raw
            .models
            .into_iter()
            .map(ModelId::new)
            .collect::<Result<Vec<_>>>()?;
        ScoreTable::new(models, raw.datasets, raw.scores)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["model".to_string()];
        header.extend(self.datasets.iter().cloned());
        w.write_record(&header)
            .map_err(|e| CsdError::Parse(e.to_string()))?;
        for (i, model) in self.models.iter().enumerate() {
            let mut rec = vec![model.to_string()];
            rec.extend(
                self.row(i)
                    .iter()
                    .map(|s| s.map(|v| v.to_string()).unwrap_or_default()),
            );
            w.write_record(&rec)
                .map_err(|e| CsdError::Parse(e.to_string()))?;
        }
        w.flush().map_err(|e| CsdError::Parse(e.to_string()))?;
        Ok(())
    }

    pub fn to_json_string(&self) -> String {
        let raw = ScoreTableJson {
            models: self.models.iter().map(|m| m.to_string()).collect(),
            datasets: self.datasets.clone(),
            scores: (0..self.models.len())
                .map(|i| self.row(i).to_vec())
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("score table serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct ScoreTableJson {
    models: Vec<String>,
    datasets: Vec<String>,
    scores: Vec<Vec<Option<f64>>>,
}

pub(crate) fn check_score(model: &str, dataset: &str, value: f64) -> Result<()> {
    if !(0.0..=100.0).contains(&value) {
        return Err(CsdError::Domain {
            model: model.to_string(),
            dataset: dataset.to_string(),
            value,
        });
    }
    Ok(())
}

pub fn load_score_table(path: impl AsRef<Path>, format: ScoreFormat) -> Result<ScoreTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| CsdError::io(path, e))?;
    match format {
        ScoreFormat::Csv => ScoreTable::from_csv_reader(text.as_bytes()),
        ScoreFormat::Json => ScoreTable::from_json_str(&text),
    }
}

/// One tournament round: a label and the datasets whose results decide it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    pub label: String,
    pub datasets: Vec<String>,
}

/// Ordered rounds; datasets never repeat across rounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Round>", into = "Vec<Round>")]
pub struct RoundSequence {
    rounds: Vec<Round>,
}

impl RoundSequence {
    pub fn new(rounds: Vec<Round>) -> Result<Self> {
        if rounds.is_empty() {
            return Err(CsdError::Parse(
                "round sequence must contain at least one round".into(),
            ));
        }
        let mut seen = HashSet::new();
        for r in &rounds {
            if r.datasets.is_empty() {
                return Err(CsdError::Parse(format!(
                    "round '{}' lists no datasets",
                    r.label
                )));
            }
            for d in &r.datasets {
                if !seen.insert(d.as_str()) {
                    return Err(CsdError::DuplicateDataset(d.clone()));
                }
            }
        }
        Ok(RoundSequence { rounds })
    }

    /// One round per dataset, labelled by the dataset name.
    pub fn singletons<S: AsRef<str>>(datasets: &[S]) -> Result<Self> {
        RoundSequence::new(
            datasets
                .iter()
                .map(|d| Round {
                    label: d.as_ref().to_string(),
                    datasets: vec![d.as_ref().to_string()],
                })
                .collect(),
        )
    }

    pub fn rounds(&self) -> &[Round] {
        &self.rounds
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.rounds.iter().map(|r| r.label.clone()).collect()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        match serde_json::from_str::<Vec<Round>>(s) {
            Ok(rounds) => RoundSequence::new(rounds),
            Err(e) => Err(CsdError::Parse(e.to_string())),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.rounds).expect("round sequence serializes")
    }
}

impl TryFrom<Vec<Round>> for RoundSequence {
    type Error = CsdError;

    fn try_from(rounds: Vec<Round>) -> Result<Self> {
        RoundSequence::new(rounds)
    }
}

impl From<RoundSequence> for Vec<Round> {
    fn from(seq: RoundSequence) -> Self {
        seq.rounds
    }
}

pub fn load_round_sequence(path: impl AsRef<Path>) -> Result<RoundSequence> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| CsdError::io(path, e))?;
    RoundSequence::from_json_str(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingPolicy {
    /// Any missing cell used by the sequence is an error.
    #[default]
    Error,
    /// Missing cells lose against any present score; two missing cells tie.
    TreatAsLoss,
}

/// A score table and sequence that have been checked against each other.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedInputs {
    table: ScoreTable,
    sequence: RoundSequence,
    policy: MissingPolicy,
    round_columns: Vec<Vec<usize>>,
    flagged_missing: Vec<(usize, usize)>,
}

impl ValidatedInputs {
    pub fn table(&self) -> &ScoreTable {
        &self.table
    }

    pub fn sequence(&self) -> &RoundSequence {
        &self.sequence
    }

    pub fn policy(&self) -> MissingPolicy {
        self.policy
    }

    /// Dataset column indices used by each round, in sequence order.
    pub fn round_columns(&self) -> &[Vec<usize>] {
        &self.round_columns
    }

    /// `(model, dataset)` cells that are missing and will be scored as losses.
    pub fn flagged_missing(&self) -> &[(usize, usize)] {
        &self.flagged_missing
    }
}

pub fn validate_inputs(
    table: &ScoreTable,
    seq: &RoundSequence,
    policy: MissingPolicy,
) -> Result<ValidatedInputs> {
    let mut round_columns = Vec::with_capacity(seq.len());
    for round in seq.rounds() {
        let cols = round
            .datasets
            .iter()
            .map(|d| {
                table
                    .dataset_index(d)
                    .ok_or_else(|| CsdError::UnknownDataset(d.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        round_columns.push(cols);
    }
    let mut flagged_missing = Vec::new();
    for cols in &round_columns {
        for &c in cols {
            for m in 0..table.num_models() {
                if table.score(m, c).is_none() {
                    match policy {
                        MissingPolicy::Error => {
                            return Err(CsdError::MissingScore {
                                model: table.models()[m].to_string(),
                                dataset: table.datasets()[c].clone(),
                            })
                        }
                        MissingPolicy::TreatAsLoss => flagged_missing.push((m, c)),
                    }
                }
            }
        }
    }
    flagged_missing.sort_unstable();
    Ok(ValidatedInputs {
        table: table.clone(),
        sequence: seq.clone(),
        policy,
        round_columns,
        flagged_missing,
    })
}
