// Confusion matrices, per-class metrics and the comparison table.
//
//     cargo run --example evaluate

use ulasan::metrics::{
    comparison_rows, compute_report, confusion_matrix, format_comparison, format_report,
};

pub fn main() -> anyhow::Result<()> {
    let y_true = [0, 0, 0, 0, 1, 1, 1, 2, 2, 2, 2, 2, 2, 2, 2];
    let y_pred = [0, 0, 1, 2, 1, 1, 2, 2, 2, 2, 2, 2, 2, 2, 1];
    let cm = confusion_matrix(&y_true, &y_pred, 3)?;
    let report = compute_report(&cm, "toy model")?;
    print!("{}", format_report(&report));
    println!("\nconfusion matrix as CSV:\n{}", cm.to_csv());

    // Reports need not come from this crate; rows keep the order given.
    let mut rows = Vec::new();
    for (name, acc, macro_f1, weighted) in [
        ("TF-IDF + Logistic Regression", 0.9436, 0.5164, 0.9575),
        ("TF-IDF + Linear SVC", 0.9760, 0.5510, 0.9740),
        ("TF-IDF + Multinomial Naive Bayes", 0.9750, 0.3290, 0.9630),
        ("Transformer (fine-tuned)", 0.8870, 0.5088, 0.9268),
    ] {
        let mut r = report.clone();
        r.model_name = name.into();
        (r.accuracy, r.macro_f1, r.weighted_f1) = (acc, macro_f1, weighted);
        rows.push(r);
    }
    print!("{}", format_comparison(&rows));
    println!("\n{}", serde_json::to_string(&comparison_rows(&rows)[1])?);
    Ok(())
}
