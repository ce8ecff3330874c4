use std::fs;
use std::io::Write;
use std::path::Path;

use super::{CorpusError, RawRecord, Review};

const TEXT_COLUMN: &str = "review_text";
const LABEL_COLUMN: &str = "label";

/// Reads a review CSV from disk. See [`read_csv`].
pub fn load_csv(path: impl AsRef<Path>) -> Result<Vec<RawRecord>, CorpusError> {
    let content = fs::read_to_string(path)?;
    read_csv(&content)
}

/// Parses RFC-4180 CSV text with a header row naming `review_text` and
/// `label`. Columns are matched by name; extra columns are ignored.
///
/// Row numbers in errors are 0-based data-row indices (the header is not
/// counted).
pub fn read_csv(content: &str) -> Result<Vec<RawRecord>, CorpusError> {
    if let Some(row) = unterminated_quote_row(content) {
        return Err(CorpusError::MalformedRow {
            row,
            reason: "unbalanced quotes".into(),
        });
    }

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(content.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| malformed(&e, "bad header"))?
        .clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CorpusError::MissingColumn(name.to_string()))
    };
    let text_idx = find(TEXT_COLUMN)?;
    let label_idx = find(LABEL_COLUMN)?;

    let mut records = Vec::new();
    for (row, result) in reader.records().enumerate() {
        let record = result.map_err(|e| match e.position() {
            Some(pos) => CorpusError::MalformedRow {
                row: (pos.record() as usize).saturating_sub(1),
                reason: e.to_string(),
            },
            None => CorpusError::MalformedRow {
                row,
                reason: e.to_string(),
            },
        })?;
        records.push(RawRecord {
            text: record.get(text_idx).unwrap_or_default().to_string(),
            label_raw: record.get(label_idx).unwrap_or_default().to_string(),
        });
    }
    Ok(records)
}

fn malformed(err: &csv::Error, context: &str) -> CorpusError {
    CorpusError::MalformedRow {
        row: 0,
        reason: format!("{context}: {err}"),
    }
}

/// Returns the data row in which a quoted field is opened but never closed.
fn unterminated_quote_row(content: &str) -> Option<usize> {
    let mut in_quotes = false;
    let mut line = 0usize;
    let mut opened_at = 0usize;
    for ch in content.chars() {
        match ch {
            '"' => {
                in_quotes = !in_quotes;
                if in_quotes {
                    opened_at = line;
                }
            }
            '\n' if !in_quotes => line += 1,
            _ => {}
        }
    }
    in_quotes.then(|| opened_at.saturating_sub(1))
}

/// Writes cleaned reviews as a `review_text,label` CSV with canonical label
/// names.
pub fn write_reviews_csv<'a, W: Write>(
    writer: W,
    reviews: impl IntoIterator<Item = &'a Review>,
) -> Result<(), CorpusError> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    let io = |e: csv::Error| CorpusError::Io(e.into());
    out.write_record([TEXT_COLUMN, LABEL_COLUMN]).map_err(io)?;
    for review in reviews {
        out.write_record([review.text.as_str(), review.label.name()])
            .map_err(io)?;
    }
    out.flush()?;
    Ok(())
}
