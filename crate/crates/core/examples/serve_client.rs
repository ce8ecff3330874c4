// Running the HTTP service in-process and calling it like a client would.
//
//     cargo run --example serve_client

use std::sync::Arc;

use serde_json::{json, Value};
use ulasan::corpus::{clean_corpus, load_csv, LabelMap};
use ulasan::features::FeatureConfig;
use ulasan::models::{ModelKind, TrainConfig};
use ulasan::pipeline::train_model;
use ulasan::serve::{cors_layer, router, Registry};

#[tokio::main]
pub async fn main() -> anyhow::Result<()> {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/fixtures/separable_300.csv"
    );
    let (reviews, _) = clean_corpus(&load_csv(path)?, &LabelMap::default())?;
    let mut models = Vec::new();
    for kind in [ModelKind::LogReg, ModelKind::Nb] {
        let (model, _) = train_model(
            &reviews,
            kind,
            &FeatureConfig::default(),
            &TrainConfig::default(),
        )?;
        models.push((kind.to_string(), model));
    }
    let registry = Arc::new(Registry::new(models)?);

    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let base = format!("http://{}", listener.local_addr()?);
    let app = router(registry, cors_layer("http://localhost:5173")?);
    tokio::spawn(async move { axum::serve(listener, app).await });

    let client = reqwest::Client::new();
    let models: Value = client
        .get(format!("{base}/models"))
        .send()
        .await?
        .json()
        .await?;
    println!("GET /models\n{}", serde_json::to_string_pretty(&models)?);

    for body in [
        json!({"text": "Barang original, MANTAP!!"}),
        json!({"text": "paket rusak", "model": "nb"}),
        json!({"text": "!!!"}),
        json!({"text": "bagus", "model": "bert"}),
    ] {
        let resp = client
            .post(format!("{base}/predict"))
            .json(&body)
            .send()
            .await?;
        let status = resp.status();
        let mut value: Value = resp.json().await?;
        if let Some(latency) = value.get_mut("latency_ms") {
            *latency = json!("<elapsed>");
        }
        println!(
            "\nPOST /predict {body}\n{status}\n{}",
            serde_json::to_string_pretty(&value)?
        );
    }
    Ok(())
}
