//! The `csd` command line: subcommands, file outputs and run manifests.
//!
//! Exit codes: 0 success, 1 data or domain error, 2 usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::analysis::{
    csd_ranks, exact_expected_scores, fsa, perturbation_experiment, FsaThresholds, OracleLimits,
};
use crate::engine::{run_single_instance, trace_to_jsonl, EliminationSchedule, TRACE_HEADER};
use crate::error::CsdError;
use crate::ingestion::{
    load_round_sequence, load_score_table, validate_inputs, MissingPolicy, ScoreFormat,
};
use crate::monte_carlo::{estimate, SimulationConfig, SimulationResult};
use crate::order::{
    build_tiers, decile_bands, estimate_weighted, sample_order, tier_sequence_to_rounds,
    QuestionOutcomes, WeightedSuite,
};
use crate::rng::instance_stream;
use crate::tensor::{build_tensor, load_perturbations, perturb_scores, WinRateTensor};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "csd",
    version,
    about = "Swiss-system tournament ranking from benchmark score tables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate expected win scores and write a ranking.
    Rank(RankArgs),
    /// Sweep the elimination count and report failure sensitivity.
    Fsa(FsaArgs),
    /// Compare ranking shifts under score perturbations against the average baseline.
    Perturb(PerturbArgs),
    /// Exact expected scores for small contests.
    Oracle(OracleArgs),
    /// Build difficulty tiers from per-question outcomes and analyse them.
    Tiers(TiersArgs),
    /// Sample weighted round orders, or rank under sampled orders.
    Order(OrderArgs),
    /// Build and export the win-rate tensor.
    BuildTensor(TensorArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum MissingArg {
    Error,
    Loss,
}

impl From<MissingArg> for MissingPolicy {
    fn from(m: MissingArg) -> Self {
        match m {
            MissingArg::Error => MissingPolicy::Error,
            MissingArg::Loss => MissingPolicy::TreatAsLoss,
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct Common {
    /// Root seed for all random streams.
    #[arg(long, env = "CSD_SEED", default_value_t = 0)]
    seed: u64,
    /// Monte Carlo iterations.
    #[arg(long = "n", default_value_t = 10_000)]
    n: u64,
    /// Models eliminated from the bottom score group after each round.
    #[arg(long, default_value_t = 1)]
    t: usize,
    /// Elimination counts for sensitivity sweeps.
    #[arg(long = "t-grid", value_delimiter = ',', default_value = "0,1,2")]
    t_grid: Vec<usize>,
    /// How to treat missing scores.
    #[arg(long, value_enum, default_value = "error")]
    missing: MissingArg,
    /// Worker threads (0 = automatic).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Output directory.
    #[arg(long, default_value = "csd-out")]
    out: PathBuf,
}

impl Common {
    fn config(&self, t: usize) -> SimulationConfig {
        SimulationConfig::new(self.n, self.seed, t).with_workers(self.workers)
    }
}

#[derive(Debug, Args, Serialize)]
struct Inputs {
    /// Score table (CSV or JSON, by extension).
    #[arg(long)]
    scores: PathBuf,
    /// Round sequence JSON.
    #[arg(long)]
    sequence: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct RankArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Also write per-round traces for the first N instances.
    #[arg(long, default_value_t = 0)]
    trace: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
struct Thresholds {
    /// Slope at or below which a model is an aggressive specialist (default −0.15·K/12).
    #[arg(long, allow_negative_numbers = true)]
    lambda_specialist: Option<f64>,
    /// Half-width of the robust-generalist slope band (default 0.03·K/12).
    #[arg(long)]
    lambda_band: Option<f64>,
}

impl Thresholds {
    fn resolve(&self, k: usize) -> FsaThresholds {
        let d = FsaThresholds::for_rounds(k);
        FsaThresholds {
            lambda_specialist: self.lambda_specialist.unwrap_or(d.lambda_specialist),
            lambda_generalist_band: self.lambda_band.unwrap_or(d.lambda_generalist_band),
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct FsaArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[command(flatten)]
    thresholds: Thresholds,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
struct PerturbArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// CSV of `model,dataset,score` overwrites.
    #[arg(long)]
    perturbations: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
struct OracleArgs {
    #[arg(long, requires = "sequence", conflicts_with = "tensor")]
    scores: Option<PathBuf>,
    #[arg(long)]
    sequence: Option<PathBuf>,
    /// Tensor JSON instead of scores + sequence.
    #[arg(long)]
    tensor: Option<PathBuf>,
    /// Also run Monte Carlo and compare.
    #[arg(long)]
    check: bool,
    #[arg(long, default_value_t = 5)]
    max_models: usize,
    #[arg(long, default_value_t = 3)]
    max_rounds: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
struct TiersArgs {
    /// CSV of `model,question_id,outcome`.
    #[arg(long)]
    outcomes: PathBuf,
    #[command(flatten)]
    thresholds: Thresholds,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
struct OrderArgs {
    /// Weighted suite JSON.
    #[arg(long)]
    suite: PathBuf,
    /// Score table; required unless `--orders-only`.
    #[arg(long, required_unless_present = "orders_only")]
    scores: Option<PathBuf>,
    /// Only print sampled orders.
    #[arg(long)]
    orders_only: bool,
    /// Number of orders to print with `--orders-only`.
    #[arg(long, default_value_t = 10)]
    samples: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
struct TensorArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data { stage: &'static str, err: CsdError },
}

type CliResult<T> = std::result::Result<T, CliError>;

trait Stage<T> {
    fn stage(self, stage: &'static str) -> CliResult<T>;
}

impl<T> Stage<T> for crate::error::Result<T> {
    fn stage(self, stage: &'static str) -> CliResult<T> {
        self.map_err(|err| CliError::Data { stage, err })
    }
}

/// Collects output files and input digests for the manifest.
struct Run {
    out: PathBuf,
    inputs: Vec<(String, String)>,
    outputs: Vec<String>,
}

impl Run {
    fn new(out: &Path) -> CliResult<Self> {
        fs::create_dir_all(out)
            .map_err(|e| CsdError::io(out, e))
            .stage("creating output directory")?;
        Ok(Run {
            out: out.to_path_buf(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        })
    }

    fn input(&mut self, path: &Path) -> CliResult<()> {
        let bytes = fs::read(path)
            .map_err(|e| CsdError::io(path, e))
            .stage("reading inputs")?;
        self.inputs.push((
            path.display().to_string(),
            hex::encode(Sha256::digest(&bytes)),
        ));
        Ok(())
    }

    fn write(&mut self, name: &str, contents: &str) -> CliResult<()> {
        let path = self.out.join(name);
        fs::write(&path, contents)
            .map_err(|e| CsdError::io(&path, e))
            .stage("writing outputs")?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn finish<P: Serialize>(mut self, command: &str, argv: &[String], params: &P) -> CliResult<()> {
        #[derive(Serialize)]
        struct Digest<'a> {
            path: &'a str,
            sha256: &'a str,
        }
        #[derive(Serialize)]
        struct Manifest<'a, P> {
            command: &'a str,
            version: &'a str,
            args: &'a [String],
            params: &'a P,
            inputs: Vec<Digest<'a>>,
            outputs: &'a [String],
        }
        let outputs = std::mem::take(&mut self.outputs);
        let manifest = Manifest {
            command,
            version: env!("CARGO_PKG_VERSION"),
            args: argv,
            params,
            inputs: self
                .inputs
                .iter()
                .map(|(p, h)| Digest { path: p, sha256: h })
                .collect(),
            outputs: &outputs,
        };
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        self.write("manifest.json", &text)
    }
}

/// Parses `args` (including the program name) and runs the command; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let argv: Vec<String> = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let result = match &cli.command {
        Command::Rank(a) => cmd_rank(a, &argv),
        Command::Fsa(a) => cmd_fsa(a, &argv),
        Command::Perturb(a) => cmd_perturb(a, &argv),
        Command::Oracle(a) => cmd_oracle(a, &argv),
        Command::Tiers(a) => cmd_tiers(a, &argv),
        Command::Order(a) => cmd_order(a, &argv),
        Command::BuildTensor(a) => cmd_build_tensor(a, &argv),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Data { stage, err }) => {
            eprintln!("error while {stage}: {err}");
            EXIT_DATA
        }
    }
}

fn load_tensor(run: &mut Run, inputs: &Inputs, missing: MissingArg) -> CliResult<WinRateTensor> {
    run.input(&inputs.scores)?;
    run.input(&inputs.sequence)?;
    let table = load_score_table(&inputs.scores, ScoreFormat::from_path(&inputs.scores))
        .stage("loading scores")?;
    let seq = load_round_sequence(&inputs.sequence).stage("loading round sequence")?;
    let validated = validate_inputs(&table, &seq, missing.into()).stage("validating inputs")?;
    Ok(build_tensor(&validated))
}

fn ranking_csv(result: &SimulationResult) -> String {
    let ranks = csd_ranks(result);
    let mut order: Vec<usize> = (0..ranks.len()).collect();
    order.sort_by_key(|&m| ranks[m]);
    let mut out = String::from("model,e_score,std_err,survival,rank\n");
    for m in order {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            result.models[m],
            result.expected_scores[m],
            result.std_error[m],
            result.survival_prob[m],
            ranks[m]
        );
    }
    out
}

fn check_grid(grid: &[usize]) -> CliResult<()> {
    let mut d = grid.to_vec();
    d.sort_unstable();
    d.dedup();
    if d.len() < 2 {
        return Err(CliError::Usage(
            "--t-grid needs at least two distinct values (slope is undefined otherwise)".into(),
        ));
    }
    Ok(())
}

fn check_common(c: &Common) -> CliResult<()> {
    if c.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    Ok(())
}

fn cmd_rank(a: &RankArgs, argv: &[String]) -> CliResult<()> {
    check_common(&a.common)?;
    let mut run = Run::new(&a.common.out)?;
    let tensor = load_tensor(&mut run, &a.inputs, a.common.missing)?;
    let config = a.common.config(a.common.t);
    let result = estimate(&tensor, &config).stage("simulating")?;
    run.write("ranking.csv", &ranking_csv(&result))?;
    run.write("result.json", &result.to_json_string())?;
    if a.trace > 0 {
        let mut text = format!("{TRACE_HEADER}\n");
        for i in 0..a.trace {
            let mut rng = instance_stream(config.seed, i);
            let r = run_single_instance(&tensor, &config.schedule, &mut rng).stage("tracing")?;
            text.push_str(&trace_to_jsonl(i, &r.trace));
        }
        run.write("trace.jsonl", &text)?;
    }
    print!("{}", ranking_csv(&result));
    run.finish("rank", argv, a)
}

fn write_fsa(run: &mut Run, report: &crate::analysis::FsaReport) -> CliResult<()> {
    run.write("fsa.csv", &report.to_csv())?;
    run.write("fsa.json", &report.to_json_string())?;
    run.write("fsa_plot.csv", &report.plot_csv())
}

fn cmd_fsa(a: &FsaArgs, argv: &[String]) -> CliResult<()> {
    check_common(&a.common)?;
    check_grid(&a.common.t_grid)?;
    let mut run = Run::new(&a.common.out)?;
    let tensor = load_tensor(&mut run, &a.inputs, a.common.missing)?;
    let thresholds = a.thresholds.resolve(tensor.num_rounds());
    let report =
        fsa(&tensor, &a.common.config(0), &a.common.t_grid, thresholds).map_err(|e| match e {
            CsdError::Config(msg) => CliError::Usage(msg),
            err => CliError::Data {
                stage: "running sensitivity sweep",
                err,
            },
        })?;
    write_fsa(&mut run, &report)?;
    print!("{}", report.to_csv());
    run.finish("fsa", argv, a)
}

fn cmd_perturb(a: &PerturbArgs, argv: &[String]) -> CliResult<()> {
    check_common(&a.common)?;
    let mut run = Run::new(&a.common.out)?;
    run.input(&a.inputs.scores)?;
    run.input(&a.perturbations)?;
    run.input(&a.inputs.sequence)?;
    let base = load_score_table(&a.inputs.scores, ScoreFormat::from_path(&a.inputs.scores))
        .stage("loading scores")?;
    let targets = load_perturbations(&a.perturbations).stage("loading perturbations")?;
    let perturbed = perturb_scores(&base, &targets).stage("applying perturbations")?;
    let seq = load_round_sequence(&a.inputs.sequence).stage("loading round sequence")?;
    let cmp = perturbation_experiment(
        &base,
        &perturbed,
        &seq,
        &a.common.config(a.common.t),
        a.common.missing.into(),
    )
    .stage("running comparison")?;
    run.write("comparison.csv", &cmp.to_csv())?;
    print!("{}", cmp.to_csv());
    run.finish("perturb", argv, a)
}

fn cmd_oracle(a: &OracleArgs, argv: &[String]) -> CliResult<()> {
    check_common(&a.common)?;
    let mut run = Run::new(&a.common.out)?;
    let tensor = match (&a.tensor, &a.scores, &a.sequence) {
        (Some(path), _, _) => {
            run.input(path)?;
            WinRateTensor::load(path).stage("loading tensor")?
        }
        (None, Some(scores), Some(sequence)) => {
            let inputs = Inputs {
                scores: scores.clone(),
                sequence: sequence.clone(),
            };
            load_tensor(&mut run, &inputs, a.common.missing)?
        }
        _ => {
            return Err(CliError::Usage(
                "oracle needs --tensor or both --scores and --sequence".into(),
            ))
        }
    };
    let schedule = EliminationSchedule::constant(a.common.t);
    let limits = OracleLimits {
        max_models: a.max_models,
        max_rounds: a.max_rounds,
    };
    let exact = exact_expected_scores(&tensor, &schedule, limits).stage("enumerating contests")?;
    let values = exact.to_f64();
    let mut out = String::from("model,exact");
    if a.check {
        out.push_str(",e_score,std_err,abs_diff,pass");
    }
    out.push('\n');
    let mc = if a.check {
        Some(estimate(&tensor, &a.common.config(a.common.t)).stage("simulating")?)
    } else {
        None
    };
    for (m, id) in tensor.models().iter().enumerate() {
        let _ = write!(out, "{},{:.12}", id, values[m]);
        if let Some(r) = &mc {
            let diff = (r.expected_scores[m] - values[m]).abs();
            // 1e-12 absorbs rounding of the exact rational to f64
            let pass = diff <= 3.0 * r.std_error[m] + 1e-12;
            let _ = write!(
                out,
                ",{},{},{},{}",
                r.expected_scores[m], r.std_error[m], diff, pass
            );
        }
        out.push('\n');
    }
    run.write("oracle.csv", &out)?;
    print!("{out}");
    run.finish("oracle", argv, a)
}

fn cmd_tiers(a: &TiersArgs, argv: &[String]) -> CliResult<()> {
    check_common(&a.common)?;
    check_grid(&a.common.t_grid)?;
    let mut run = Run::new(&a.common.out)?;
    run.input(&a.outcomes)?;
    let outcomes = QuestionOutcomes::load(&a.outcomes).stage("loading outcomes")?;
    let partition = build_tiers(&outcomes, &decile_bands()).stage("building tiers")?;
    let tiers = tier_sequence_to_rounds(&partition, &outcomes).stage("building tier rounds")?;
    for w in &tiers.warnings {
        eprintln!("warning: {w}");
    }

    let mut assignment = String::from("question_id,accuracy,tier\n");
    for (band, qs) in partition.bands.iter().zip(&partition.tiers) {
        for &q in qs {
            let _ = writeln!(
                assignment,
                "{},{},{}",
                outcomes.questions()[q],
                partition.accuracies[q],
                band.label()
            );
        }
    }
    run.write("tiers.csv", &assignment)?;
    let mut table_csv = Vec::new();
    tiers
        .table
        .write_csv(&mut table_csv)
        .stage("writing tier scores")?;
    run.write(
        "tier_scores.csv",
        &String::from_utf8(table_csv).expect("csv is utf-8"),
    )?;
    run.write("tier_sequence.json", &tiers.sequence.to_json_string())?;
    run.write("tier_warnings.txt", &tiers.warnings.join("\n"))?;

    let validated = validate_inputs(&tiers.table, &tiers.sequence, a.common.missing.into())
        .stage("validating tier rounds")?;
    let tensor = build_tensor(&validated);
    let thresholds = a.thresholds.resolve(tensor.num_rounds());
    let report = fsa(&tensor, &a.common.config(0), &a.common.t_grid, thresholds)
        .stage("running sensitivity sweep")?;
    write_fsa(&mut run, &report)?;
    print!("{}", report.to_csv());
    run.finish("tiers", argv, a)
}

fn cmd_order(a: &OrderArgs, argv: &[String]) -> CliResult<()> {
    check_common(&a.common)?;
    let mut run = Run::new(&a.common.out)?;
    run.input(&a.suite)?;
    let suite = WeightedSuite::load(&a.suite).stage("loading suite")?;
    if a.orders_only {
        let mut out = String::new();
        for i in 0..a.samples {
            let order = sample_order(&suite, &mut instance_stream(a.common.seed, i));
            let names: Vec<&str> = order
                .iter()
                .map(|&d| suite.datasets()[d].as_str())
                .collect();
            out.push_str(&names.join(","));
            out.push('\n');
        }
        run.write("orders.txt", &out)?;
        print!("{out}");
        return run.finish("order", argv, a);
    }
    let scores = a.scores.as_ref().expect("clap enforces --scores");
    run.input(scores)?;
    let table = load_score_table(scores, ScoreFormat::from_path(scores)).stage("loading scores")?;
    let result = estimate_weighted(
        &suite,
        &table,
        a.common.missing.into(),
        &a.common.config(a.common.t),
    )
    .stage("simulating")?;
    run.write("ranking.csv", &ranking_csv(&result))?;
    run.write("result.json", &result.to_json_string())?;
    print!("{}", ranking_csv(&result));
    run.finish("order", argv, a)
}

fn cmd_build_tensor(a: &TensorArgs, argv: &[String]) -> CliResult<()> {
    let mut run = Run::new(&a.common.out)?;
    let tensor = load_tensor(&mut run, &a.inputs, a.common.missing)?;
    run.write("tensor.json", &tensor.to_json_string())?;
    run.finish("build-tensor", argv, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["csd"]), EXIT_USAGE);
        assert_eq!(run(["csd", "rank"]), EXIT_USAGE);
        assert_eq!(run(["csd", "nonsense"]), EXIT_USAGE);
        assert_eq!(run(["csd", "--help"]), EXIT_OK);
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
