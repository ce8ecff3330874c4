// Predicting raw text and listing the terms that pushed the decision.
//
//     cargo run --example explain

use ulasan::corpus::{clean_corpus, load_csv, LabelMap};
use ulasan::features::FeatureConfig;
use ulasan::models::{ModelKind, TrainConfig};
use ulasan::pipeline::train_model;

pub fn main() -> anyhow::Result<()> {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/fixtures/separable_300.csv"
    );
    let (reviews, _) = clean_corpus(&load_csv(path)?, &LabelMap::default())?;

    for kind in ModelKind::ALL {
        let (model, _) = train_model(
            &reviews,
            kind,
            &FeatureConfig::default(),
            &TrainConfig::default(),
        )?;
        println!("{}", kind.display_name());
        for text in [
            "Barang ORIGINAL, mantap & rapi!!",
            "paket rusak, seller bohong",
            "😐 ...",
        ] {
            let out = model.predict_text(text);
            let scores: Vec<String> = out.scores.iter().map(|s| format!("{s:.3}")).collect();
            println!(
                "  {text:?} -> {} [{}] {:?}",
                out.label,
                scores.join(" "),
                out.score_kind
            );
            for c in &out.top_features {
                println!("      {:<14} {:+.4}", c.term, c.contribution);
            }
            if let Some(w) = &out.warning {
                println!("      warning: {w}");
            }
        }
    }
    Ok(())
}
