//! Command-line front end. Exit codes: 0 success, 1 usage error, 2 runtime failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::{analyze, Analysis, AnalysisOptions, MediationOptions};
use crate::harness::{read_records, run_suite, ExperimentConfig, DatasetRef, RECORDS_FILE, DEFAULT_LENGTH};
use crate::models::Family;
use crate::series::TimeSeries;
use crate::stationarity::consensus;
use crate::synthgen::{standard_spec, generate, STANDARD_IDS};
use crate::transforms::{fit_transform, PipelineSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "statlab", version, about = "Stationarity transformations versus forecast accuracy")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate standard-suite series as JSON.
    Generate {
        #[arg(long, value_delimiter = ',')]
        datasets: Vec<String>,
        #[arg(long, default_value_t = crate::harness::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_LENGTH)]
        length: usize,
        /// Directory for one <id>.json per series; standard output otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a transform pipeline to a series and print the result.
    Transform {
        #[command(flatten)]
        input: SeriesInput,
        #[arg(long = "transforms")]
        transform: PipelineSpec,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the stationarity consensus report of a series.
    Stationarity {
        #[command(flatten)]
        input: SeriesInput,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the experiment cross-product.
    Run(RunArgs),
    /// Write comparison, matching, mediation and summary tables.
    Analyze(AnalyzeArgs),
    /// Print a markdown report of a finished run.
    Report(AnalyzeArgs),
}

/// Either a JSON series file or a standard-suite dataset.
#[derive(Debug, Args)]
pub struct SeriesInput {
    #[arg(long, conflicts_with = "dataset", required_unless_present = "dataset")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub dataset: Option<String>,
    #[arg(long, default_value_t = crate::harness::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_LENGTH)]
    pub length: usize,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub datasets: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub transforms: Vec<PipelineSpec>,
    #[arg(long, value_delimiter = ',')]
    pub models: Vec<Family>,
    #[arg(long, value_delimiter = ',')]
    pub horizons: Vec<usize>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub budget: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Results directory or records file.
    #[arg(long, default_value = "results")]
    pub records: PathBuf,
    /// Output directory for analyze, output file for report.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub exclude_smape_unfriendly: bool,
    #[arg(long)]
    pub category_controls: bool,
    #[arg(long)]
    pub interactions: bool,
}

type Failure = String;

fn fail(e: impl std::fmt::Display) -> Failure {
    e.to_string()
}

impl SeriesInput {
    fn load(&self) -> Result<TimeSeries, Failure> {
        match (&self.input, &self.dataset) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
                TimeSeries::from_json(&text).map_err(fail)
            }
            (None, Some(id)) => standard_series(id, self.seed, self.length),
            (None, None) => Err("either --input or --dataset is required".into()),
        }
    }
}

fn standard_series(id: &str, seed: u64, length: usize) -> Result<TimeSeries, Failure> {
    let spec = standard_spec(id, length).ok_or_else(|| format!("unknown dataset '{id}'"))?;
    generate(&spec, seed).map_err(fail)
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => writeln!(stdout, "{text}").map_err(fail),
    }
}

fn run_config(args: &RunArgs) -> Result<ExperimentConfig, Failure> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = &args.out {
        config.output_path = out.clone();
    }
    if !args.datasets.is_empty() {
        config.datasets = args.datasets.iter().map(|d| DatasetRef::Standard(d.clone())).collect();
    }
    if !args.transforms.is_empty() {
        config.transforms = args.transforms.clone();
    }
    if !args.models.is_empty() {
        config.families = args.models.clone();
    }
    if !args.horizons.is_empty() {
        config.horizons = args.horizons.clone();
    }
    if args.workers.is_some() {
        config.workers = args.workers;
    }
    if let Some(b) = args.budget {
        config.tuning_budget = b;
    }
    Ok(config)
}

fn analysis(args: &AnalyzeArgs) -> Result<Analysis, Failure> {
    let path = if args.records.is_dir() {
        args.records.join(RECORDS_FILE)
    } else {
        args.records.clone()
    };
    if !path.exists() {
        return Err(format!("{}: no such records file", path.display()));
    }
    let records = read_records(&path).map_err(fail)?;
    let options = AnalysisOptions {
        exclude_smape_unfriendly: args.exclude_smape_unfriendly,
        mediation: MediationOptions {
            category_controls: args.category_controls,
            interactions: args.interactions,
        },
    };
    analyze(&records, options).map_err(fail)
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Generate {
            datasets,
            seed,
            length,
            out,
        } => {
            let ids: Vec<String> = if datasets.is_empty() {
                STANDARD_IDS.iter().map(|s| s.to_string()).collect()
            } else {
                datasets
            };
            if let Some(dir) = &out {
                std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            }
            for id in ids {
                let json = standard_series(&id, seed, length)?.to_json().map_err(fail)?;
                let path = out.as_ref().map(|d| d.join(format!("{id}.json")));
                emit(&json, path.as_deref(), stdout)?;
            }
        }
        Command::Transform { input, transform, out } => {
            let series = input.load()?;
            let transform = transform.with_seasonal_period(series.frequency());
            let (transformed, _) = fit_transform(&series, &transform).map_err(fail)?;
            emit(&transformed.to_json().map_err(fail)?, out.as_deref(), stdout)?;
        }
        Command::Stationarity { input, out } => {
            let report = consensus(&input.load()?).map_err(fail)?;
            emit(&report.to_json(), out.as_deref(), stdout)?;
        }
        Command::Run(args) => {
            let config = run_config(&args)?;
            let summary = run_suite(&config).map_err(fail)?;
            let _ = writeln!(
                stderr,
                "{} records ({} ok, {} resumed) written to {}",
                summary.total,
                summary.ok,
                summary.resumed,
                summary.records_path.display()
            );
        }
        Command::Analyze(args) => {
            let a = analysis(&args)?;
            let dir = args.out.clone().unwrap_or_else(|| {
                let base = if args.records.is_dir() { args.records.clone() } else { PathBuf::from(".") };
                base.join("analysis")
            });
            let written = a.write(&dir).map_err(fail)?;
            let _ = writeln!(stderr, "{} files written to {}", written.len(), dir.display());
        }
        Command::Report(args) => {
            let a = analysis(&args)?;
            emit(&a.to_markdown(), args.out.as_deref(), stdout)?;
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_RUNTIME
        }
    }
}
