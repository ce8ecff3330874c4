// Fitting a uni+bigram vocabulary and turning reviews into TF-IDF vectors.
//
//     cargo run --example tfidf

use ulasan::features::{analyze, fit_vocabulary, FeatureConfig};

pub fn main() -> anyhow::Result<()> {
    let docs = [
        "barang bagus pengiriman cepat",
        "barang bagus bagus sekali",
        "pengiriman lambat barang rusak",
        "barang rusak kecewa",
    ];
    let config = FeatureConfig::default();
    println!("n-grams of {:?}: {:?}", docs[1], analyze(docs[1], &config));

    let vocab = fit_vocabulary(&docs, &config)?;
    println!("\n{} terms kept (min_df = {}):", vocab.len(), config.min_df);
    for (i, term) in vocab.terms().iter().enumerate() {
        println!(
            "  {i:>2} {term:<16} df={} idf={:.4}",
            vocab.doc_freq(i),
            vocab.idf(i)
        );
    }

    let x = vocab.transform(
        "Barang bagus, bagus! kata baru".to_lowercase().as_str(),
        &config,
    );
    println!("\nvector (norm {:.6}):", x.norm());
    for (i, v) in x.iter() {
        println!("  {:<16} {v:.4}", vocab.term(i).unwrap_or("?"));
    }
    Ok(())
}
