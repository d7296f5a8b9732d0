use unicode_normalization::UnicodeNormalization;

/// Canonical text form used for every comparison.
///
/// NFC, lowercase, every non-alphanumeric character becomes a space, runs of
/// spaces collapse to one and the ends are trimmed.
pub fn normalize_title(raw: &str) -> String {
    let lowered = raw.nfc().collect::<String>().to_lowercase();
    let mut out = String::with_capacity(lowered.len());
    let mut gap = false;
    for c in lowered.nfc() {
        if c.is_alphanumeric() {
            if gap && !out.is_empty() {
                out.push(' ');
            }
            gap = false;
            out.push(c);
        } else {
            gap = true;
        }
    }
    if out.is_ascii() {
        out
    } else {
        out.nfc().collect()
    }
}

/// Splits a normalized title on single spaces.
pub fn tokenize(normalized: &str) -> Vec<String> {
    if normalized.is_empty() {
        return Vec::new();
    }
    normalized.split(' ').map(str::to_owned).collect()
}
