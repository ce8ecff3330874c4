use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::thread;

use serde::Serialize;

use crate::corpus::{
    class_counts, clean_corpus, read_csv, stratified_split, write_reviews_csv, DatasetSplit,
    LabelMap, Review, SentimentLabel, NUM_CLASSES,
};
use crate::metrics::{
    comparison_rows, format_comparison, format_report, ComparisonRow, EvalReport,
};
use crate::models::ModelKind;
use crate::persistence::{load_model, save_model};
use crate::pipeline::{train_model, PipelineError, SentimentModel, TextPrediction, TrainSummary};
use crate::serve::{self, Registry};

use super::{io_error, CliError, OutputFormat, RunConfig};

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, contents).map_err(io_error(path))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(io_error(path))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(io_error(Path::new("<stdout>")))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn read_reviews(path: &Path) -> Result<(Vec<Review>, usize), CliError> {
    let records = read_csv(&fs::read_to_string(path).map_err(io_error(path))?)?;
    Ok(clean_corpus(&records, &LabelMap::default())?)
}

fn per_class<T: Copy + Serialize>(
    values: [T; NUM_CLASSES],
) -> serde_json::Map<String, serde_json::Value> {
    SentimentLabel::ALL
        .iter()
        .map(|l| (l.name().to_string(), serde_json::json!(values[l.ordinal()])))
        .collect()
}

#[derive(Debug, Serialize)]
struct SplitSummary {
    records: usize,
    dropped_empty: usize,
    kept: usize,
    seed: u64,
    test_fraction: f64,
    split_sha256: String,
    class_counts: serde_json::Map<String, serde_json::Value>,
    train_counts: serde_json::Map<String, serde_json::Value>,
    test_counts: serde_json::Map<String, serde_json::Value>,
}

/// Cleans and splits `csv`, writing train.csv, test.csv, split_manifest.tsv
/// and summary.json into `dir`.
fn split_and_write(
    csv: &Path,
    cfg: &RunConfig,
    dir: &Path,
) -> Result<(DatasetSplit, SplitSummary), CliError> {
    let (reviews, dropped) = read_reviews(csv)?;
    let split = stratified_split(&reviews, cfg.test_fraction, cfg.seed)?;
    create_dir(dir)?;

    for (name, part) in [("train.csv", &split.train), ("test.csv", &split.test)] {
        let mut buf = Vec::new();
        write_reviews_csv(&mut buf, part.iter())?;
        write_file(&dir.join(name), buf)?;
    }
    write_file(&dir.join("split_manifest.tsv"), split.manifest())?;

    let summary = SplitSummary {
        records: reviews.len() + dropped,
        dropped_empty: dropped,
        kept: reviews.len(),
        seed: cfg.seed,
        test_fraction: cfg.test_fraction,
        split_sha256: split.manifest_sha256(),
        class_counts: per_class(class_counts(reviews.iter().map(|r| &r.label))),
        train_counts: per_class(class_counts(split.train.iter().map(|r| &r.label))),
        test_counts: per_class(class_counts(split.test.iter().map(|r| &r.label))),
    };
    write_file(&dir.join("summary.json"), to_json(&summary))?;
    Ok((split, summary))
}

fn split_text(s: &SplitSummary) -> String {
    let counts = |m: &serde_json::Map<String, serde_json::Value>| {
        m.iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    format!(
        "records: {} (dropped empty: {}, kept: {})\nclasses: {}\ntrain:   {}\ntest:    {}\nseed: {}  test fraction: {}\nsplit sha256: {}\n",
        s.records,
        s.dropped_empty,
        s.kept,
        counts(&s.class_counts),
        counts(&s.train_counts),
        counts(&s.test_counts),
        s.seed,
        s.test_fraction,
        s.split_sha256
    )
}

pub(super) fn prepare(csv: &Path, cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let (_, summary) = split_and_write(csv, cfg, &cfg.out_dir)?;
    match cfg.format {
        OutputFormat::Text => emit(out, &split_text(&summary)),
        OutputFormat::Machine => emit(out, &to_json(&summary)),
    }
}

#[derive(Debug, Serialize)]
struct TrainReport {
    model_type: ModelKind,
    model_path: PathBuf,
    n_features: usize,
    class_counts: serde_json::Map<String, serde_json::Value>,
    class_weights: Option<serde_json::Map<String, serde_json::Value>>,
    iterations: Vec<usize>,
    converged: bool,
}

fn train_report(model: &SentimentModel, summary: &TrainSummary, path: &Path) -> TrainReport {
    TrainReport {
        model_type: model.kind(),
        model_path: path.to_path_buf(),
        n_features: summary.n_features,
        class_counts: per_class(summary.class_counts),
        class_weights: model
            .kind()
            .is_weighted()
            .then(|| per_class(summary.class_weights.as_array())),
        iterations: model.metadata.iterations.clone(),
        converged: model.metadata.converged,
    }
}

fn train_text(r: &TrainReport) -> String {
    let mut s = format!(
        "model: {}\nfeatures: {}\nclass counts: ",
        r.model_type, r.n_features
    );
    s.push_str(
        &r.class_counts
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" "),
    );
    s.push_str("\nclass weights: ");
    match &r.class_weights {
        Some(w) => s.push_str(
            &w.iter()
                .map(|(k, v)| format!("{k}={:.6}", v.as_f64().unwrap_or(f64::NAN)))
                .collect::<Vec<_>>()
                .join(" "),
        ),
        None => s.push_str("none (naive Bayes is unweighted)"),
    }
    if !r.iterations.is_empty() {
        let _ = write!(
            s,
            "\niterations: {:?}  converged: {}",
            r.iterations, r.converged
        );
    }
    let _ = writeln!(s, "\nsaved: {}", r.model_path.display());
    s
}

fn model_path(dir: &Path, kind: ModelKind) -> PathBuf {
    dir.join(format!("{kind}.model.json"))
}

pub(super) fn train(
    train_csv: &Path,
    kind: ModelKind,
    output: Option<&Path>,
    cfg: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let (reviews, _) = read_reviews(train_csv)?;
    let (mut model, summary) = train_model(&reviews, kind, &cfg.features, &cfg.training)?;
    model.metadata.seed = Some(cfg.seed);
    let path = match output {
        Some(p) => p.to_path_buf(),
        None => {
            create_dir(&cfg.out_dir)?;
            model_path(&cfg.out_dir, kind)
        }
    };
    save_model(&model, &path)?;
    if kind.is_weighted() && !model.metadata.converged {
        let _ = writeln!(
            err,
            "warning: optimizer stopped before reaching the gradient tolerance"
        );
    }
    let report = train_report(&model, &summary, &path);
    match cfg.format {
        OutputFormat::Text => emit(out, &train_text(&report)),
        OutputFormat::Machine => emit(out, &to_json(&report)),
    }
}

fn write_report(dir: &Path, suffix: &str, report: &EvalReport) -> Result<(), CliError> {
    write_file(&dir.join(format!("report{suffix}.json")), to_json(report))?;
    write_file(
        &dir.join(format!("confusion_matrix{suffix}.csv")),
        report.confusion_matrix.to_csv(),
    )?;
    write_file(
        &dir.join(format!("report{suffix}.txt")),
        format_report(report),
    )
}

pub(super) fn evaluate(
    model_path: &Path,
    test_csv: &Path,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let model = load_model(model_path)?;
    let (reviews, _) = read_reviews(test_csv)?;
    let report = model.evaluate(&reviews, model.kind().display_name())?;
    create_dir(&cfg.out_dir)?;
    write_report(&cfg.out_dir, "", &report)?;
    match cfg.format {
        OutputFormat::Text => emit(out, &format_report(&report)),
        OutputFormat::Machine => emit(out, &to_json(&report)),
    }
}

#[derive(Debug, Serialize)]
struct PredictionRecord<'a> {
    input: &'a str,
    #[serde(flatten)]
    prediction: TextPrediction,
}

fn prediction_line(p: &TextPrediction) -> String {
    let scores = SentimentLabel::ALL
        .iter()
        .map(|l| format!("{}={:.4}", l.name(), p.scores[l.ordinal()]))
        .collect::<Vec<_>>()
        .join(" ");
    let kind = serde_json::to_value(p.score_kind)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    let mut line = format!("{}\t{scores} ({kind})", p.label);
    if !p.top_features.is_empty() {
        let top = p
            .top_features
            .iter()
            .map(|c| format!("{}:{:+.4}", c.term, c.contribution))
            .collect::<Vec<_>>();
        let _ = write!(line, "\ttop: {}", top.join(", "));
    }
    if let Some(w) = &p.warning {
        let _ = write!(line, "\twarning: {w}");
    }
    line.push('\n');
    line
}

pub(super) fn predict(
    model_path: &Path,
    texts: &[String],
    file: Option<&Path>,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let model = load_model(model_path)?;
    let from_file;
    let inputs: Vec<&str> = match file {
        Some(path) => {
            from_file = fs::read_to_string(path).map_err(io_error(path))?;
            from_file.lines().collect()
        }
        None => texts.iter().map(String::as_str).collect(),
    };
    for input in inputs {
        let prediction = model.predict_text(input);
        let line = match cfg.format {
            OutputFormat::Text => prediction_line(&prediction),
            OutputFormat::Machine => {
                let mut s = serde_json::to_string(&PredictionRecord { input, prediction })
                    .expect("prediction serializes");
                s.push('\n');
                s
            }
        };
        emit(out, &line)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct BenchmarkRow {
    model_type: ModelKind,
    split_sha256: String,
    #[serde(flatten)]
    metrics: ComparisonRow,
}

#[derive(Debug, Serialize)]
struct BenchmarkSummary {
    seed: u64,
    test_fraction: f64,
    split_sha256: String,
    train_size: usize,
    test_size: usize,
    models: Vec<BenchmarkRow>,
}

pub(super) fn benchmark(
    csv: &Path,
    cfg: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let dir = &cfg.out_dir;
    let (split, _) = split_and_write(csv, cfg, dir)?;
    let sha = split.manifest_sha256();

    let trained: Vec<Result<SentimentModel, PipelineError>> = thread::scope(|scope| {
        let handles: Vec<_> = ModelKind::ALL
            .iter()
            .map(|&kind| {
                let split = &split;
                scope.spawn(move || {
                    train_model(&split.train, kind, &cfg.features, &cfg.training).map(|(m, _)| m)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("training thread panicked"))
            .collect()
    });

    let models_dir = dir.join("models");
    create_dir(&models_dir)?;
    let mut reports = Vec::new();
    let mut rows = Vec::new();
    for result in trained {
        let mut model = result?;
        let kind = model.kind();
        model.metadata.seed = Some(cfg.seed);
        model.metadata.split_sha256 = Some(sha.clone());
        if kind.is_weighted() && !model.metadata.converged {
            let _ = writeln!(
                err,
                "warning: {kind} optimizer stopped before reaching the gradient tolerance"
            );
        }
        save_model(&model, model_path(&models_dir, kind))?;
        let report = model.evaluate(&split.test, kind.display_name())?;
        write_report(dir, &format!("_{kind}"), &report)?;
        rows.push((
            kind,
            model.metadata.split_sha256.clone().unwrap_or_default(),
        ));
        reports.push(report);
    }
    if rows.iter().any(|(_, s)| *s != sha) {
        return Err(CliError::Usage(
            "models were trained on different splits".into(),
        ));
    }

    let table = format_comparison(&reports);
    let summary = BenchmarkSummary {
        seed: cfg.seed,
        test_fraction: cfg.test_fraction,
        split_sha256: sha.clone(),
        train_size: split.train.len(),
        test_size: split.test.len(),
        models: rows
            .into_iter()
            .zip(comparison_rows(&reports))
            .map(|((model_type, split_sha256), metrics)| BenchmarkRow {
                model_type,
                split_sha256,
                metrics,
            })
            .collect(),
    };
    write_file(&dir.join("comparison.txt"), &table)?;
    write_file(&dir.join("comparison.json"), to_json(&summary))?;
    match cfg.format {
        OutputFormat::Text => emit(
            out,
            &format!(
                "{table}\ntrain {} / test {}  seed {}  split sha256 {sha}\n",
                split.train.len(),
                split.test.len(),
                cfg.seed
            ),
        ),
        OutputFormat::Machine => emit(out, &to_json(&summary)),
    }
}

pub(super) fn serve(
    models: &[PathBuf],
    model_dir: Option<&Path>,
    bind: Option<&str>,
    cors_origins: Option<&str>,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let paths = match (models.is_empty(), model_dir) {
        (false, _) => models.to_vec(),
        (true, Some(dir)) => serve::model_paths_in(dir)?,
        (true, None) => {
            return Err(CliError::Usage(format!(
                "give model files or --model-dir (or set {})",
                serve::ENV_MODEL_DIR
            )))
        }
    };
    let registry = Arc::new(Registry::load(&paths)?);
    let bind = bind.unwrap_or(serve::DEFAULT_BIND);
    let addr: SocketAddr = bind
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid bind address `{bind}`")))?;
    let cors = serve::cors_layer(cors_origins.unwrap_or(""))?;

    let runtime = tokio::runtime::Runtime::new().map_err(io_error(Path::new("<tokio runtime>")))?;
    runtime.block_on(serve::run(registry, addr, cors, |local| {
        let _ = writeln!(err, "listening on http://{local}");
    }))?;
    Ok(())
}
