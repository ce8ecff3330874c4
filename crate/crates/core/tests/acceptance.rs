//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.
//!
//! The optional full-corpus criterion runs only when `ULASAN_TOKOPEDIA_CSV`
//! points at the full review CSV; otherwise it is reported as SKIP.

mod common;

use std::fs;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use common::oracle::{brute_metrics, gradient_relative_error};
use common::*;
use serde_json::{json, Value};
use ulasan::features::FeatureConfig;
use ulasan::metrics::{compute_report, confusion_matrix, ConfusionMatrix};
use ulasan::models::{
    compute_class_weights, ClassWeights, ModelKind, Objective, SoftmaxCrossEntropy, SquaredHinge,
    TrainConfig, WeightMode,
};
use ulasan::persistence::{load_model, save_model};
use ulasan::pipeline::{train_model, SentimentModel};
use ulasan::serve::{predict_response, router, PredictResponse, Registry};
use ulasan::SentimentLabel;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn class_weight_formula() -> Outcome {
    let mut rng = TestRng::new(101);
    let mut worst_formula = 0.0f64;
    let mut worst_sum = 0.0f64;
    for _ in 0..1000 {
        let counts = [
            1 + rng.below(10_000),
            1 + rng.below(10_000),
            1 + rng.below(10_000),
        ];
        let w = compute_class_weights(counts, WeightMode::Balanced).map_err(|e| e.to_string())?;
        let n: usize = counts.iter().sum();
        for (c, &n_c) in counts.iter().enumerate() {
            let expected = n as f64 / (3.0 * n_c as f64);
            worst_formula = worst_formula.max((w.0[c] - expected).abs() / expected);
        }
        let sum: f64 = (0..3).map(|c| w.0[c] * counts[c] as f64).sum();
        worst_sum = worst_sum.max((sum - n as f64).abs() / n as f64);
    }
    ensure(worst_formula <= 1e-12 && worst_sum <= 1e-12, || {
        format!("relative errors {worst_formula:e} (formula), {worst_sum:e} (sum)")
    })?;
    Ok(format!(
        "1000 triples, max relative error {worst_formula:e} / {worst_sum:e}"
    ))
}

fn feature_oracle() -> Outcome {
    let mut rng = TestRng::new(202);
    let mut worst = 0.0f64;
    let mut compared = 0;
    for _ in 0..200 {
        let docs = random_corpus(&mut rng, 20, 8);
        let cfg = random_feature_config(&mut rng);
        if let Some(d) = tfidf_max_diff(&docs, &cfg) {
            worst = worst.max(d);
            compared += 1;
        }
    }
    ensure(worst < 1e-9, || format!("max abs diff {worst:e}"))?;
    Ok(format!(
        "200 corpora ({compared} with a vocabulary), max abs diff {worst:e}"
    ))
}

fn gradient_checks() -> Outcome {
    let started = Instant::now();
    let mut rng = TestRng::new(303);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let (x, y) = random_problem(&mut rng, 20, 10);
        let w = ClassWeights([
            rng.range(0.2, 3.0),
            rng.range(0.2, 3.0),
            rng.range(0.2, 3.0),
        ]);
        let lambda = rng.range(0.0, 0.1);
        let ce = SoftmaxCrossEntropy::new(&x, &y, 10, Some(w), lambda);
        let at: Vec<f64> = (0..ce.dim()).map(|_| rng.range(-1.0, 1.0)).collect();
        worst = worst.max(gradient_relative_error(&ce, &at, 1e-5));
        let hinge = SquaredHinge::new(
            &x,
            &y,
            SentimentLabel::ALL[rng.below(3)],
            10,
            Some(w),
            lambda,
        );
        let at: Vec<f64> = (0..hinge.dim()).map(|_| rng.range(-1.0, 1.0)).collect();
        worst = worst.max(gradient_relative_error(&hinge, &at, 1e-5));
    }
    let secs = started.elapsed().as_secs_f64();
    ensure(worst < 1e-5 && secs < 10.0, || {
        format!("relative error {worst:e}, {secs:.2}s")
    })?;
    Ok(format!(
        "10 points per objective, max relative error {worst:e}, {secs:.2}s"
    ))
}

fn metrics_oracle() -> Outcome {
    let mut rng = TestRng::new(404);
    for _ in 0..1000 {
        let n = 1 + rng.below(50);
        let t: Vec<usize> = (0..n).map(|_| rng.below(3)).collect();
        let p: Vec<usize> = (0..n).map(|_| rng.below(3)).collect();
        let r = compute_report(
            &confusion_matrix(&t, &p, 3).map_err(|e| e.to_string())?,
            "m",
        )
        .map_err(|e| e.to_string())?;
        let b = brute_metrics(&t, &p, 3);
        let mut pairs = vec![
            (r.accuracy, b.accuracy),
            (r.macro_f1, b.macro_f1),
            (r.weighted_f1, b.weighted_f1),
        ];
        for c in 0..3 {
            pairs.push((r.per_class[c].precision, b.precision[c]));
            pairs.push((r.per_class[c].recall, b.recall[c]));
            pairs.push((r.per_class[c].f1, b.f1[c]));
        }
        if let Some((a, e)) = pairs.iter().find(|(a, e)| (a - e).abs() > 1e-12) {
            return Err(format!("library {a} vs oracle {e} on {t:?} / {p:?}"));
        }
    }
    let cm = ConfusionMatrix {
        class_names: SentimentLabel::names()
            .iter()
            .map(|s| s.to_string())
            .collect(),
        counts: vec![vec![8, 2, 0], vec![1, 3, 1], vec![0, 1, 14]],
    };
    let r = compute_report(&cm, "worked").map_err(|e| e.to_string())?;
    let got = [r.accuracy, r.macro_f1, r.weighted_f1];
    let want = [0.8333, 0.7736, 0.8383];
    ensure(
        got.iter().zip(want).all(|(g, w)| (g - w).abs() <= 5e-5),
        || format!("worked example gave {got:?}, expected {want:?}"),
    )?;
    Ok(format!(
        "1000 random label pairs exact; worked example {:.4}/{:.4}/{:.4}",
        got[0], got[1], got[2]
    ))
}

fn run_cli(args: &[&str]) -> Result<String, String> {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut full = vec!["ulasan"];
    full.extend_from_slice(args);
    match ulasan::cli::run(full, &mut out, &mut err) {
        0 => Ok(String::from_utf8_lossy(&out).into_owned()),
        code => Err(format!("exit {code}: {}", String::from_utf8_lossy(&err))),
    }
}

fn benchmark_rows(dir: &Path) -> Result<Vec<Value>, String> {
    let text = fs::read_to_string(dir.join("comparison.json")).map_err(|e| e.to_string())?;
    let v: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    Ok(v["models"].as_array().cloned().unwrap_or_default())
}

fn row<'a>(rows: &'a [Value], kind: &str) -> Result<&'a Value, String> {
    rows.iter()
        .find(|r| r["model_type"] == kind)
        .ok_or_else(|| format!("no {kind} row"))
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or(f64::NAN)
}

fn separable_benchmark() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let started = Instant::now();
    run_cli(&[
        "--seed",
        "42",
        "--out",
        dir.path().to_str().unwrap(),
        "benchmark",
        fixture(SEPARABLE).to_str().unwrap(),
    ])?;
    let secs = started.elapsed().as_secs_f64();
    let rows = benchmark_rows(dir.path())?;
    let mut detail = Vec::new();
    for kind in ["logreg", "svm"] {
        let r = row(&rows, kind)?;
        let (acc, macro_f1) = (num(r, "accuracy"), num(r, "macro_f1"));
        ensure(acc >= 0.95 && macro_f1 >= 0.95, || {
            format!("{kind}: accuracy {acc}, macro F1 {macro_f1}")
        })?;
        detail.push(format!("{kind} {acc:.4}/{macro_f1:.4}"));
    }
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{} in {secs:.1}s", detail.join(", ")))
}

fn imbalanced_benchmark(dir: &Path) -> Result<Vec<Value>, String> {
    run_cli(&[
        "--seed",
        "42",
        "--out",
        dir.to_str().unwrap(),
        "benchmark",
        fixture(IMBALANCED).to_str().unwrap(),
    ])?;
    benchmark_rows(dir)
}

fn nb_imbalance() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let rows = imbalanced_benchmark(dir.path())?;
    let nb = row(&rows, "nb")?;
    let svm = row(&rows, "svm")?;
    let (nb_acc, nb_macro, svm_macro) = (
        num(nb, "accuracy"),
        num(nb, "macro_f1"),
        num(svm, "macro_f1"),
    );
    let close = |a: f64, b: f64| (a - b).abs() < 1e-9;
    ensure(
        close(nb_acc, golden_f64(&[IMBALANCED, "nb", "accuracy"]))
            && close(nb_macro, golden_f64(&[IMBALANCED, "nb", "macro_f1"]))
            && close(
                svm_macro,
                golden_f64(&[IMBALANCED, "svm_balanced", "macro_f1"]),
            ),
        || format!("differs from frozen values: nb {nb_acc}/{nb_macro}, svm macro {svm_macro}"),
    )?;
    ensure(nb_macro < svm_macro, || {
        format!("NB macro F1 {nb_macro} not below SVM {svm_macro}")
    })?;
    ensure(nb_acc - nb_macro > 0.2, || {
        format!("NB gap {} not above 0.2", nb_acc - nb_macro)
    })?;
    Ok(format!(
        "NB accuracy {nb_acc:.4}, macro F1 {nb_macro:.4} (gap {:.4}); SVM balanced macro F1 {svm_macro:.4}",
        nb_acc - nb_macro
    ))
}

fn weighting_effect() -> Outcome {
    let s = split(IMBALANCED);
    let mut recalls = Vec::new();
    for (mode, key) in [
        (WeightMode::Balanced, "logreg_balanced"),
        (WeightMode::Uniform, "logreg_uniform"),
    ] {
        let cfg = TrainConfig {
            weight_mode: mode,
            ..TrainConfig::default()
        };
        let (model, _) = train_model(&s.train, ModelKind::LogReg, &FeatureConfig::default(), &cfg)
            .map_err(|e| e.to_string())?;
        let report = model.evaluate(&s.test, key).map_err(|e| e.to_string())?;
        let minority = report.recall(SentimentLabel::Negatif.ordinal());
        let frozen = golden_vec(&[IMBALANCED, key, "recall"])[0];
        ensure((minority - frozen).abs() < 1e-9, || {
            format!("{key} minority recall {minority}, frozen {frozen}")
        })?;
        recalls.push(minority);
    }
    ensure(recalls[0] >= recalls[1], || {
        format!("balanced {} < uniform {}", recalls[0], recalls[1])
    })?;
    Ok(format!(
        "minority recall balanced {:.4} >= uniform {:.4}",
        recalls[0], recalls[1]
    ))
}

fn determinism() -> Outcome {
    let (a, b) = (
        tempfile::tempdir().map_err(|e| e.to_string())?,
        tempfile::tempdir().map_err(|e| e.to_string())?,
    );
    imbalanced_benchmark(a.path())?;
    imbalanced_benchmark(b.path())?;
    let mut files = vec![
        "comparison.txt".to_string(),
        "comparison.json".into(),
        "split_manifest.tsv".into(),
        "summary.json".into(),
        "train.csv".into(),
        "test.csv".into(),
    ];
    for kind in ModelKind::ALL {
        files.push(format!("report_{kind}.json"));
        files.push(format!("report_{kind}.txt"));
        files.push(format!("confusion_matrix_{kind}.csv"));
    }
    for f in &files {
        let x = fs::read(a.path().join(f)).map_err(|e| format!("{f}: {e}"))?;
        let y = fs::read(b.path().join(f)).map_err(|e| format!("{f}: {e}"))?;
        ensure(x == y, || format!("{f} differs between runs"))?;
    }
    let manifest =
        fs::read_to_string(a.path().join("split_manifest.tsv")).map_err(|e| e.to_string())?;
    let sha = {
        use sha2::{Digest, Sha256};
        hex::encode(Sha256::digest(manifest.as_bytes()))
    };
    for kind in ModelKind::ALL {
        let m = load_model(a.path().join("models").join(format!("{kind}.model.json")))
            .map_err(|e| e.to_string())?;
        ensure(
            m.metadata.split_sha256.as_deref() == Some(sha.as_str()),
            || format!("{kind} trained on another split"),
        )?;
    }
    Ok(format!(
        "{} report files byte-identical; all three models on split {}",
        files.len(),
        &sha[..12]
    ))
}

fn separable_models() -> Result<Vec<SentimentModel>, String> {
    let train = split(SEPARABLE).train;
    ModelKind::ALL
        .iter()
        .map(|&k| {
            train_model(
                &train,
                k,
                &FeatureConfig::default(),
                &TrainConfig::default(),
            )
            .map(|(m, _)| m)
            .map_err(|e| e.to_string())
        })
        .collect()
}

fn persistence() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = TestRng::new(505);
    for model in separable_models()? {
        let path = dir.path().join("m.json");
        save_model(&model, &path).map_err(|e| e.to_string())?;
        let back = load_model(&path).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let x = random_vector(&mut rng, model.vocabulary.len());
            let (p, q) = (model.classifier.predict(&x), back.classifier.predict(&x));
            ensure(
                p.label == q.label && p.scores.map(f64::to_bits) == q.scores.map(f64::to_bits),
                || format!("{} prediction changed after reload", model.kind()),
            )?;
        }
    }
    Ok("3 model types x 100 random vectors, bit-identical".into())
}

fn service_equivalence() -> Outcome {
    let models = separable_models()?;
    let registry = Arc::new(
        Registry::new(models.into_iter().map(|m| (m.kind().to_string(), m)))
            .map_err(|e| e.to_string())?,
    );
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .worker_threads(4)
        .enable_all()
        .build()
        .map_err(|e| e.to_string())?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0")
            .await
            .map_err(|e| e.to_string())?;
        let addr = listener.local_addr().map_err(|e| e.to_string())?;
        let app = router(registry.clone(), None);
        tokio::spawn(async move { axum::serve(listener, app).await });
        let client = reqwest::Client::new();
        let url = format!("http://{addr}/predict");

        let mut rng = TestRng::new(606);
        let mut sequential = Vec::new();
        for i in 0..1000 {
            let text = random_raw_text(&mut rng);
            let id = ModelKind::ALL[i % 3].as_str();
            let mut resp: PredictResponse = client
                .post(&url)
                .json(&json!({"text": text, "model": id}))
                .send()
                .await
                .map_err(|e| e.to_string())?
                .json()
                .await
                .map_err(|e| e.to_string())?;
            resp.latency_ms = 0.0;
            let expected = predict_response(registry.get(id).unwrap(), id, &text);
            ensure(resp == expected, || {
                format!("service and library disagree on {text:?} ({id})")
            })?;
            sequential.push((text, id, resp));
        }

        let handles: Vec<_> = sequential[..100]
            .iter()
            .map(|(text, id, _)| {
                let (client, url, body) = (
                    client.clone(),
                    url.clone(),
                    json!({"text": text, "model": id}),
                );
                tokio::spawn(async move {
                    let r = client
                        .post(&url)
                        .json(&body)
                        .send()
                        .await?
                        .json::<PredictResponse>()
                        .await?;
                    Ok::<_, reqwest::Error>(r)
                })
            })
            .collect();
        for (handle, (_, _, expected)) in handles.into_iter().zip(&sequential) {
            let mut r = handle
                .await
                .map_err(|e| e.to_string())?
                .map_err(|e| e.to_string())?;
            r.latency_ms = 0.0;
            ensure(r == *expected, || {
                "burst response differs from sequential".to_string()
            })?;
        }
        Ok("1000 random strings equal library output; 100-way burst equals sequential".to_string())
    })
}

/// Published full-corpus accuracies (percent) for the three classical baselines.
const PUBLISHED_ACCURACY: [(&str, f64); 3] = [("logreg", 94.36), ("svm", 97.60), ("nb", 97.50)];

fn full_corpus() -> Option<Outcome> {
    let csv = std::env::var("ULASAN_TOKOPEDIA_CSV").ok()?;
    Some((|| {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let started = Instant::now();
        run_cli(&[
            "--seed",
            "42",
            "--out",
            dir.path().to_str().unwrap(),
            "benchmark",
            &csv,
        ])?;
        let secs = started.elapsed().as_secs_f64();
        let rows = benchmark_rows(dir.path())?;
        let acc = |k: &str| row(&rows, k).map(|r| num(r, "accuracy") * 100.0);
        let mac = |k: &str| row(&rows, k).map(|r| num(r, "macro_f1"));
        let mut detail = Vec::new();
        for (kind, published) in PUBLISHED_ACCURACY {
            let got = acc(kind)?;
            ensure((got - published).abs() <= 2.0, || {
                format!("{kind} accuracy {got:.2} vs {published:.2}")
            })?;
            detail.push(format!("{kind} {got:.2}"));
        }
        ensure(
            acc("svm")? >= acc("nb")? && acc("nb")? > acc("logreg")?,
            || "accuracy ordering".into(),
        )?;
        ensure(
            mac("svm")? > mac("logreg")? && mac("logreg")? > mac("nb")?,
            || "macro F1 ordering".into(),
        )?;
        ensure(secs < 1800.0, || format!("took {secs:.0}s"))?;
        Ok(format!("{} in {secs:.0}s", detail.join(", ")))
    })())
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("class weight formula", class_weight_formula),
        ("feature oracle", feature_oracle),
        ("gradient checks", gradient_checks),
        ("metrics oracle", metrics_oracle),
        ("separable benchmark", separable_benchmark),
        ("imbalance: naive Bayes pattern", nb_imbalance),
        ("imbalance: weighting effect", weighting_effect),
        ("determinism", determinism),
        ("persistence round trip", persistence),
        ("service equivalence", service_equivalence),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    match full_corpus() {
        None => println!("SKIP  full-corpus reproduction (optional): set ULASAN_TOKOPEDIA_CSV to the full review CSV"),
        Some(Ok(detail)) => println!("PASS  full-corpus reproduction (optional): {detail}"),
        Some(Err(detail)) => {
            failed += 1;
            println!("FAIL  full-corpus reproduction (optional): {detail}");
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
