use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lahja::corpus::{parse_tsv, Dataset};
use lahja::harness::{
    enumerate_grid, load_model, preset, save_model, sweep, GridSpec, Pipeline, PipelineConfig,
    DEFAULT_GRID_CAP,
};
use lahja::metrics::evaluate;

/// Multi-label Arabic dialect identification with n-gram feature unions.
#[derive(Debug, Parser)]
#[command(name = "lahja", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a pipeline and write it as a JSON model file.
    Train(TrainArgs),
    /// Label every text in a TSV file with a saved model.
    Predict(PredictArgs),
    /// Score a predictions file against gold labels.
    Eval(EvalArgs),
    /// Train and score every configuration of a grid.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
#[group(required = false, multiple = false)]
struct ConfigSource {
    /// Pipeline configuration as JSON.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Named preset (baseline, exp1, exp2-1 .. exp2-5, exp3-hard, exp3-weighted).
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long, value_name = "FILE")]
    train_file: PathBuf,
    #[command(flatten)]
    source: ConfigSource,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Override the configuration's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// The input TSV starts with a header line.
    #[arg(long)]
    header: bool,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    /// TSV of text and (possibly empty) labels.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    #[arg(long)]
    header: bool,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Predictions as written by `predict`.
    #[arg(long, value_name = "FILE")]
    pred: PathBuf,
    /// Gold TSV of text and labels, in the order predictions were made.
    #[arg(long, value_name = "FILE")]
    gold: PathBuf,
    /// Print the report as JSON instead of key=value lines.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    header: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_name = "FILE")]
    train_file: PathBuf,
    /// Held-out scoring data; without it a seeded split of the training
    /// file is used.
    #[arg(long, value_name = "FILE")]
    dev_file: Option<PathBuf>,
    /// Fraction of the training file kept for training when no dev file
    /// is given.
    #[arg(long, default_value_t = 0.8)]
    train_fraction: f64,
    /// Grid of field value lists as JSON.
    #[arg(long, value_name = "FILE")]
    grid: PathBuf,
    /// Base configuration the grid overrides (defaults to preset exp1).
    #[command(flatten)]
    source: ConfigSource,
    #[arg(long, default_value_t = DEFAULT_GRID_CAP)]
    max_configs: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    #[arg(long)]
    header: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Data(m) => f.write_str(m),
        }
    }
}

impl From<lahja::Error> for Failure {
    fn from(e: lahja::Error) -> Self {
        if e.is_usage() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Data(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn load_dataset(path: &Path, header: bool) -> CliResult<Dataset> {
    parse_tsv(&read(path)?, header).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn resolve_config(source: &ConfigSource, fallback: Option<&str>) -> CliResult<PipelineConfig> {
    if let Some(path) = &source.config {
        let text = String::from_utf8(read(path)?)
            .map_err(|_| Failure::Data(format!("{}: not valid UTF-8", path.display())))?;
        return PipelineConfig::from_json(&text)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())));
    }
    match source.preset.as_deref().or(fallback) {
        Some(name) => Ok(preset(name)?),
        None => Err(Failure::Usage(
            "one of --config or --preset is required".into(),
        )),
    }
}

fn train(args: &TrainArgs) -> CliResult<()> {
    let mut config = resolve_config(&args.source, None)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let data = load_dataset(&args.train_file, args.header)?;
    let model = Pipeline::fit(&data, &config)?;
    save_model(&model, &args.out)?;
    Ok(())
}

fn predict(args: &PredictArgs) -> CliResult<()> {
    let model = load_model(&args.model)?;
    let data = load_dataset(&args.input, args.header)?;
    let preds = model.predict_all(&data.texts())?;
    let mut out = String::new();
    for (doc, labels) in data.documents().iter().zip(&preds) {
        let names: Vec<String> = model.label_space().names_of(labels).into_iter().collect();
        out.push_str(&format!("{}\t{}\n", doc.id, names.join(",")));
    }
    write(&args.out, &out)
}

/// Reads `id<TAB>labels` lines, indexed by id.
fn parse_predictions(raw: &[u8], n: usize) -> Result<Vec<BTreeSet<String>>, String> {
    let text = std::str::from_utf8(raw).map_err(|_| "not valid UTF-8".to_string())?;
    let mut preds: Vec<Option<BTreeSet<String>>> = vec![None; n];
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (id, labels) = line
            .split_once('\t')
            .ok_or_else(|| format!("line {}: expected id<TAB>labels", i + 1))?;
        let id: usize = id
            .trim()
            .parse()
            .map_err(|_| format!("line {}: bad id {id:?}", i + 1))?;
        let slot = preds
            .get_mut(id)
            .ok_or_else(|| format!("line {}: id {id} has no gold sample", i + 1))?;
        if slot.is_some() {
            return Err(format!("line {}: duplicate id {id}", i + 1));
        }
        *slot = Some(
            labels
                .split(',')
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(str::to_owned)
                .collect(),
        );
    }
    preds
        .into_iter()
        .enumerate()
        .map(|(id, p)| p.ok_or_else(|| format!("no prediction for id {id}")))
        .collect()
}

fn eval(args: &EvalArgs) -> CliResult<()> {
    let gold = load_dataset(&args.gold, args.header)?;
    let preds = parse_predictions(&read(&args.pred)?, gold.len())
        .map_err(|e| Failure::Data(format!("{}: {e}", args.pred.display())))?;
    let report = evaluate(&preds, &gold.label_names())?;
    if args.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_key_value());
    }
    Ok(())
}

fn run_sweep(args: &SweepArgs) -> CliResult<()> {
    let mut base = resolve_config(&args.source, Some("exp1"))?;
    if let Some(seed) = args.seed {
        base.seed = seed;
    }
    let grid_text = String::from_utf8(read(&args.grid)?)
        .map_err(|_| Failure::Data(format!("{}: not valid UTF-8", args.grid.display())))?;
    let spec = GridSpec::from_json(&grid_text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", args.grid.display())))?;
    let configs = enumerate_grid(&spec, &base, args.max_configs)?;

    let data = load_dataset(&args.train_file, args.header)?;
    let (train, dev) = match &args.dev_file {
        Some(path) => (data, load_dataset(path, args.header)?),
        None => data.split(args.train_fraction, base.seed)?,
    };
    let result = sweep(&train, &dev, &configs)?;
    write(&args.out, &result.to_tsv())
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("LAHJA_THREADS") else {
        return Ok(());
    };
    let threads: usize = match value.trim().parse() {
        Ok(n) if n >= 1 => n,
        _ => {
            return Err(Failure::Usage(format!(
                "LAHJA_THREADS must be a positive integer, got {value:?}"
            )))
        }
    };
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot start {threads} threads: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    configure_threads()?;
    match &cli.command {
        Command::Train(args) => train(args),
        Command::Predict(args) => predict(args),
        Command::Eval(args) => eval(args),
        Command::Sweep(args) => run_sweep(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
