use std::sync::LazyLock;

use regex::Regex;

static URL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?:https?://|www\.)\S*").expect("valid URL pattern"));

/// Normalizes one review text.
///
/// Steps, in order: lowercase; delete `http://`, `https://` and `www.` spans
/// up to the next whitespace; replace every character that is neither a
/// Unicode letter nor an ASCII digit with a space; collapse space runs; trim.
///
/// The function is total and idempotent. The output alphabet is letters,
/// ASCII digits and single interior spaces.
///
/// ```
/// use ulasan::corpus::preprocess_text;
/// assert_eq!(preprocess_text("Barang BAGUS!!! cek https://toko.id/x 👍👍"), "barang bagus cek");
/// ```
pub fn preprocess_text(raw: &str) -> String {
    let lowered = raw.to_lowercase();
    let without_urls = URL.replace_all(&lowered, "");
    let mut out = String::with_capacity(without_urls.len());
    let mut pending_space = false;
    for ch in without_urls.chars() {
        if ch.is_alphabetic() || ch.is_ascii_digit() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(ch);
        } else {
            pending_space = true;
        }
    }
    out
}
