//! Evaluation: confusion matrix, accuracy, per-class precision/recall/F1,
//! macro and support-weighted F1, and comparison tables.
//!
//! Undefined ratios (0/0) count as 0, and the macro average always divides
//! by the full number of classes, including classes absent from the test
//! slice.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::SentimentLabel;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("y_true has {0} labels but y_pred has {1}")]
    LengthMismatch(usize, usize),
    #[error("class ordinal {0} is out of range for {1} classes")]
    OrdinalOutOfRange(usize, usize),
    #[error("nothing to evaluate")]
    EmptyMatrix,
}

/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub class_names: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn num_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_sum(&self, class: usize) -> u64 {
        self.counts[class].iter().sum()
    }

    pub fn col_sum(&self, class: usize) -> u64 {
        self.counts.iter().map(|row| row[class]).sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.num_classes()).map(|c| self.counts[c][c]).sum()
    }

    /// CSV with a `true\pred` corner cell, class names as header and as the
    /// first column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("true\\pred");
        for name in &self.class_names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (name, row) in self.class_names.iter().zip(&self.counts) {
            out.push_str(name);
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }
}

/// Tallies `(true, predicted)` ordinal pairs into a `C x C` matrix with
/// generic class names. See [`confusion_matrix_for_labels`] for sentiment
/// labels.
pub fn confusion_matrix(
    y_true: &[usize],
    y_pred: &[usize],
    num_classes: usize,
) -> Result<ConfusionMatrix, MetricsError> {
    if y_true.len() != y_pred.len() {
        return Err(MetricsError::LengthMismatch(y_true.len(), y_pred.len()));
    }
    if y_true.is_empty() {
        return Err(MetricsError::EmptyMatrix);
    }
    let mut counts = vec![vec![0u64; num_classes]; num_classes];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        for o in [t, p] {
            if o >= num_classes {
                return Err(MetricsError::OrdinalOutOfRange(o, num_classes));
            }
        }
        counts[t][p] += 1;
    }
    let class_names = match num_classes {
        3 => SentimentLabel::names()
            .iter()
            .map(|s| s.to_string())
            .collect(),
        _ => (0..num_classes).map(|c| format!("class_{c}")).collect(),
    };
    Ok(ConfusionMatrix {
        class_names,
        counts,
    })
}

pub fn confusion_matrix_for_labels(
    y_true: &[SentimentLabel],
    y_pred: &[SentimentLabel],
) -> Result<ConfusionMatrix, MetricsError> {
    let t: Vec<usize> = y_true.iter().map(|l| l.ordinal()).collect();
    let p: Vec<usize> = y_pred.iter().map(|l| l.ordinal()).collect();
    confusion_matrix(&t, &p, SentimentLabel::ALL.len())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class_name: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

/// Everything reported for one evaluated model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model_name: String,
    pub accuracy: f64,
    pub macro_f1: f64,
    pub weighted_f1: f64,
    pub per_class: Vec<ClassMetrics>,
    pub confusion_matrix: ConfusionMatrix,
}

impl EvalReport {
    pub fn recall(&self, class: usize) -> f64 {
        self.per_class[class].recall
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Derives every metric from a confusion matrix.
pub fn compute_report(cm: &ConfusionMatrix, model_name: &str) -> Result<EvalReport, MetricsError> {
    let total = cm.total();
    if total == 0 {
        return Err(MetricsError::EmptyMatrix);
    }
    let classes = cm.num_classes();
    let per_class: Vec<ClassMetrics> = (0..classes)
        .map(|c| {
            let tp = cm.counts[c][c];
            let precision = ratio(tp, cm.col_sum(c));
            let recall = ratio(tp, cm.row_sum(c));
            let f1 = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            };
            ClassMetrics {
                class_name: cm
                    .class_names
                    .get(c)
                    .cloned()
                    .unwrap_or_else(|| format!("class_{c}")),
                precision,
                recall,
                f1,
                support: cm.row_sum(c),
            }
        })
        .collect();
    let macro_f1 = per_class.iter().map(|m| m.f1).sum::<f64>() / classes as f64;
    let weighted_f1 = per_class
        .iter()
        .map(|m| m.support as f64 * m.f1)
        .sum::<f64>()
        / total as f64;
    Ok(EvalReport {
        model_name: model_name.to_string(),
        accuracy: ratio(cm.trace(), total),
        macro_f1,
        weighted_f1,
        per_class,
        confusion_matrix: cm.clone(),
    })
}

/// Confusion matrix plus report straight from label vectors.
pub fn evaluate_labels(
    y_true: &[SentimentLabel],
    y_pred: &[SentimentLabel],
    model_name: &str,
) -> Result<EvalReport, MetricsError> {
    compute_report(&confusion_matrix_for_labels(y_true, y_pred)?, model_name)
}

/// The machine-readable twin of a comparison-table row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub model: String,
    pub accuracy: f64,
    pub macro_f1: f64,
    pub weighted_f1: f64,
}

pub fn comparison_rows(reports: &[EvalReport]) -> Vec<ComparisonRow> {
    reports
        .iter()
        .map(|r| ComparisonRow {
            model: r.model_name.clone(),
            accuracy: r.accuracy,
            macro_f1: r.macro_f1,
            weighted_f1: r.weighted_f1,
        })
        .collect()
}

/// Renders an aligned text table, one row per report in input order, metrics
/// to four decimals.
pub fn format_comparison(reports: &[EvalReport]) -> String {
    let headers = ["Model", "Accuracy", "Macro F1-score", "Weighted F1-score"];
    let rows: Vec<[String; 4]> = reports
        .iter()
        .map(|r| {
            [
                r.model_name.clone(),
                format!("{:.4}", r.accuracy),
                format!("{:.4}", r.macro_f1),
                format!("{:.4}", r.weighted_f1),
            ]
        })
        .collect();
    let mut widths = headers.map(|h| h.chars().count());
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }

    let mut out = String::new();
    let line = |out: &mut String, cells: [&str; 4]| {
        let _ = write!(out, "{:<w$}", cells[0], w = widths[0]);
        for (cell, w) in cells[1..].iter().zip(&widths[1..]) {
            let _ = write!(out, "  {cell:>w$}");
        }
        out.push('\n');
    };
    line(&mut out, headers);
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    line(&mut out, [&rule[0], &rule[1], &rule[2], &rule[3]]);
    for row in &rows {
        line(&mut out, [&row[0], &row[1], &row[2], &row[3]]);
    }
    out
}

/// Human-readable single-model report: summary metrics, per-class table and
/// confusion matrix.
pub fn format_report(report: &EvalReport) -> String {
    let mut out = format_comparison(std::slice::from_ref(report));
    out.push('\n');
    let _ = writeln!(
        out,
        "{:<10}  {:>9}  {:>9}  {:>9}  {:>7}",
        "class", "precision", "recall", "f1", "support"
    );
    for m in &report.per_class {
        let _ = writeln!(
            out,
            "{:<10}  {:>9.4}  {:>9.4}  {:>9.4}  {:>7}",
            m.class_name, m.precision, m.recall, m.f1, m.support
        );
    }
    out.push_str("\nconfusion matrix (rows = true, columns = predicted)\n");
    let cm = &report.confusion_matrix;
    let _ = write!(out, "{:<10}", "");
    for name in &cm.class_names {
        let _ = write!(out, "  {name:>8}");
    }
    out.push('\n');
    for (name, row) in cm.class_names.iter().zip(&cm.counts) {
        let _ = write!(out, "{name:<10}");
        for v in row {
            let _ = write!(out, "  {v:>8}");
        }
        out.push('\n');
    }
    out
}
