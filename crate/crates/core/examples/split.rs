// Seeded stratified train/test split and its manifest.
//
//     cargo run --example split

use ulasan::corpus::{class_counts, clean_corpus, load_csv, stratified_split, LabelMap};

pub fn main() -> anyhow::Result<()> {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/fixtures/imbalanced_1000.csv"
    );
    let (reviews, _) = clean_corpus(&load_csv(path)?, &LabelMap::default())?;
    let split = stratified_split(&reviews, 0.2, 42)?;

    println!(
        "corpus: {:?}",
        class_counts(reviews.iter().map(|r| &r.label))
    );
    println!(
        "train:  {:?}",
        class_counts(split.train.iter().map(|r| &r.label))
    );
    println!(
        "test:   {:?}",
        class_counts(split.test.iter().map(|r| &r.label))
    );
    println!("manifest sha256: {}", split.manifest_sha256());

    let again = stratified_split(&reviews, 0.2, 42)?;
    let other = stratified_split(&reviews, 0.2, 7)?;
    println!(
        "same seed, same split: {}",
        again.manifest() == split.manifest()
    );
    println!(
        "seed 7, same split:    {}",
        other.manifest() == split.manifest()
    );
    Ok(())
}
