//! The `ulasan` command line.
//!
//! Settings resolve as command-line flags, then an optional TOML config file
//! (`--config`), then built-in defaults. Exit codes: 0 on success, 2 for
//! usage and data errors, 3 when training fails numerically.
//!
//! Config file schema (every key optional):
//!
//! ```toml
//! seed = 42
//! test_fraction = 0.2
//! out = "results"
//!
//! [features]
//! ngram_min = 1
//! ngram_max = 2
//! max_features = 50000
//! min_df = 2
//! sublinear_tf = true
//!
//! [training]
//! max_iter = 1000
//! tol = 1e-6
//! lambda = 1e-4
//! weight_mode = "balanced"
//! alpha = 1.0
//! ```

mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use thiserror::Error;

use crate::corpus::CorpusError;
use crate::features::FeatureConfig;
use crate::models::{ModelError, ModelKind, TrainConfig, WeightMode};
use crate::persistence::PersistenceError;
use crate::pipeline::PipelineError;
use crate::serve::ServeError;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TEST_FRACTION: f64 = 0.2;
pub const DEFAULT_OUT_DIR: &str = "ulasan-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum OutputFormat {
    /// Aligned human-readable text.
    #[default]
    Text,
    /// JSON documents (JSON Lines for `predict`).
    Machine,
}

#[derive(Debug, Parser)]
#[command(
    name = "ulasan",
    version,
    about = "Sentiment classification for Indonesian marketplace reviews"
)]
pub struct Cli {
    /// Seed for the stratified split.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clean a review CSV and write a stratified train/test split.
    Prepare {
        csv: PathBuf,
        #[arg(long)]
        test_fraction: Option<f64>,
    },
    /// Fit a vocabulary and classifier on a prepared training CSV.
    Train {
        train_csv: PathBuf,
        /// logreg, svm or nb.
        #[arg(long)]
        model: ModelKind,
        /// Model file path (default: <out>/<model>.model.json).
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        opts: TrainOpts,
    },
    /// Score a saved model on a test CSV.
    Evaluate { model: PathBuf, test_csv: PathBuf },
    /// Label raw texts with a saved model.
    Predict {
        model: PathBuf,
        /// Text to classify; repeatable.
        #[arg(long, required_unless_present = "file", conflicts_with = "file")]
        text: Vec<String>,
        /// File with one text per line.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Split once, train and evaluate all three models, and compare them.
    Benchmark {
        csv: PathBuf,
        #[arg(long)]
        test_fraction: Option<f64>,
        #[command(flatten)]
        opts: TrainOpts,
    },
    /// Serve saved models over HTTP.
    Serve {
        /// Model files; when omitted, every *.model.json in --model-dir.
        models: Vec<PathBuf>,
        #[arg(long, env = crate::serve::ENV_MODEL_DIR)]
        model_dir: Option<PathBuf>,
        #[arg(long, env = crate::serve::ENV_BIND)]
        bind: Option<String>,
        /// Comma-separated allowed origins, or `*`.
        #[arg(long, env = crate::serve::ENV_CORS_ORIGINS)]
        cors_origins: Option<String>,
    },
}

/// Feature and training overrides shared by `train` and `benchmark`.
#[derive(Debug, Clone, Default, Args)]
pub struct TrainOpts {
    #[arg(long)]
    pub weight_mode: Option<WeightMode>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Naive Bayes smoothing.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub ngram_min: Option<usize>,
    #[arg(long)]
    pub ngram_max: Option<usize>,
    #[arg(long)]
    pub min_df: Option<usize>,
    #[arg(long)]
    pub max_features: Option<usize>,
    #[arg(long)]
    pub sublinear_tf: Option<bool>,
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub test_fraction: Option<f64>,
    pub out: Option<PathBuf>,
    pub features: FeatureConfig,
    pub training: TrainConfig,
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub test_fraction: f64,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub features: FeatureConfig,
    pub training: TrainConfig,
}

impl RunConfig {
    fn resolve(
        cli: &Cli,
        file: ConfigFile,
        test_fraction: Option<f64>,
        opts: Option<&TrainOpts>,
    ) -> Self {
        let mut features = file.features;
        let mut training = file.training;
        if let Some(o) = opts {
            macro_rules! apply {
                ($target:ident . $field:ident) => {
                    if let Some(v) = o.$field.clone() {
                        $target.$field = v;
                    }
                };
            }
            apply!(training.weight_mode);
            apply!(training.lambda);
            apply!(training.max_iter);
            apply!(training.tol);
            apply!(training.alpha);
            apply!(features.ngram_min);
            apply!(features.ngram_max);
            apply!(features.min_df);
            apply!(features.max_features);
            apply!(features.sublinear_tf);
        }
        Self {
            seed: cli.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            test_fraction: test_fraction
                .or(file.test_fraction)
                .unwrap_or(DEFAULT_TEST_FRACTION),
            out_dir: cli
                .out
                .clone()
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
            format: cli.format,
            features,
            training,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Persistence(#[from] PersistenceError),
    #[error(transparent)]
    Serve(#[from] ServeError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Pipeline(PipelineError::Model(ModelError::NonFinite)) => 3,
            _ => 2,
        }
    }
}

pub(crate) fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile, CliError> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let text = std::fs::read_to_string(path).map_err(io_error(path))?;
    toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
}

/// Parses `args` (including the program name) and runs the command, writing
/// results to `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return if code == 0 { 0 } else { 2 };
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let file = load_config(cli.config.as_deref())?;
    match &cli.command {
        Command::Prepare { csv, test_fraction } => {
            let cfg = RunConfig::resolve(cli, file, *test_fraction, None);
            commands::prepare(csv, &cfg, out)
        }
        Command::Train {
            train_csv,
            model,
            output,
            opts,
        } => {
            let cfg = RunConfig::resolve(cli, file, None, Some(opts));
            commands::train(train_csv, *model, output.as_deref(), &cfg, out, err)
        }
        Command::Evaluate { model, test_csv } => {
            let cfg = RunConfig::resolve(cli, file, None, None);
            commands::evaluate(model, test_csv, &cfg, out)
        }
        Command::Predict {
            model,
            text,
            file: input,
        } => {
            let cfg = RunConfig::resolve(cli, file, None, None);
            commands::predict(model, text, input.as_deref(), &cfg, out)
        }
        Command::Benchmark {
            csv,
            test_fraction,
            opts,
        } => {
            let cfg = RunConfig::resolve(cli, file, *test_fraction, Some(opts));
            commands::benchmark(csv, &cfg, out, err)
        }
        Command::Serve {
            models,
            model_dir,
            bind,
            cors_origins,
        } => commands::serve(
            models,
            model_dir.as_deref(),
            bind.as_deref(),
            cors_origins.as_deref(),
            err,
        ),
    }
}
