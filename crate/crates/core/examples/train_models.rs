// Training all three classifiers, with balanced and uniform class weights,
// on an imbalanced corpus.
//
//     cargo run --release --example train_models

use ulasan::corpus::{clean_corpus, load_csv, stratified_split, LabelMap};
use ulasan::features::FeatureConfig;
use ulasan::models::{ModelKind, TrainConfig, WeightMode};
use ulasan::pipeline::train_model;

pub fn main() -> anyhow::Result<()> {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/fixtures/imbalanced_1000.csv"
    );
    let (reviews, _) = clean_corpus(&load_csv(path)?, &LabelMap::default())?;
    let split = stratified_split(&reviews, 0.2, 42)?;

    for (kind, mode) in [
        (ModelKind::LogReg, WeightMode::Balanced),
        (ModelKind::LogReg, WeightMode::Uniform),
        (ModelKind::Svm, WeightMode::Balanced),
        (ModelKind::Nb, WeightMode::Balanced),
    ] {
        let config = TrainConfig {
            weight_mode: mode,
            ..TrainConfig::default()
        };
        let (model, summary) = train_model(&split.train, kind, &FeatureConfig::default(), &config)?;
        let report = model.evaluate(&split.test, kind.display_name())?;
        let weights = if kind.is_weighted() {
            format!("{mode} {:.3?}", summary.class_weights.0)
        } else {
            "none".into()
        };
        let steps: Vec<usize> = summary.traces.iter().map(|t| t.iterations).collect();
        println!("{}", kind.display_name());
        println!(
            "  class counts {:?}, weights {weights}, optimizer steps {steps:?}",
            summary.class_counts
        );
        println!(
            "  accuracy {:.4}  macro F1 {:.4}  negatif recall {:.4}",
            report.accuracy,
            report.macro_f1,
            report.recall(0)
        );
    }
    Ok(())
}
