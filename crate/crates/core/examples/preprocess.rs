// Cleaning raw marketplace reviews and canonicalizing their labels.
//
//     cargo run --example preprocess

use ulasan::corpus::{clean_corpus, preprocess_text, read_csv, LabelMap, SentimentLabel};

const RAW: &str = "\
review_text,label
\"Barang BAGUS!!! cek https://toko.id/p/123 😍\",Positif
\"pengiriman lama... tapi ok\",neutral
\"RUSAK. kecewa bgt 😡😡\",NEG
\"!!! ???\",positif
";

pub fn main() -> anyhow::Result<()> {
    for raw in [
        "Mantap, SESUAI pesanan!!",
        "cek www.promo.com sekarang",
        "2x beli, café ok",
    ] {
        println!("{raw:?} -> {:?}", preprocess_text(raw));
    }

    let mut labels = LabelMap::default();
    labels.insert("bintang5", SentimentLabel::Positif);
    println!(
        "\nlabel tokens: {} (\"bintang5\" -> {:?})",
        labels.len(),
        labels.get("BINTANG5")
    );

    let records = read_csv(RAW)?;
    let (reviews, dropped) = clean_corpus(&records, &labels)?;
    println!(
        "\n{} records, {} kept, {dropped} dropped as empty",
        records.len(),
        reviews.len()
    );
    for r in &reviews {
        println!("  {:<8} {}", r.label, r.text);
    }
    Ok(())
}
