// Saving a model envelope, inspecting it, and loading it back.
//
//     cargo run --example persistence

use ulasan::corpus::{clean_corpus, load_csv, LabelMap};
use ulasan::features::FeatureConfig;
use ulasan::models::{ModelKind, TrainConfig};
use ulasan::persistence::{load_model, save_model};
use ulasan::pipeline::train_model;

pub fn main() -> anyhow::Result<()> {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/fixtures/separable_300.csv"
    );
    let (reviews, _) = clean_corpus(&load_csv(path)?, &LabelMap::default())?;
    let (model, _) = train_model(
        &reviews,
        ModelKind::Svm,
        &FeatureConfig::default(),
        &TrainConfig::default(),
    )?;

    let dir = tempfile::tempdir()?;
    let file = dir.path().join("svm.model.json");
    save_model(&model, &file)?;
    let text = std::fs::read_to_string(&file)?;
    let doc: serde_json::Value = serde_json::from_str(&text)?;
    println!(
        "{} bytes, format_version {}, model_type {}",
        text.len(),
        doc["format_version"],
        doc["model_type"]
    );
    println!("training metadata: {}", doc["training_metadata"]);

    let back = load_model(&file)?;
    let probe = "pengiriman cepat, barang original";
    println!("identical model: {}", back == model);
    println!(
        "prediction before {:?}, after {:?}",
        model.predict_text(probe).scores,
        back.predict_text(probe).scores
    );
    Ok(())
}
