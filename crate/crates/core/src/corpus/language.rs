//! Language detection for normalized titles.

/// Code returned when no language can be determined.
pub const UNKNOWN: &str = "unknown";

/// Pluggable language detector over normalized tokens.
pub trait LanguageDetector: Send + Sync {
    /// Best-guess ISO-639-1 code, or [`UNKNOWN`].
    fn detect(&self, tokens: &[String]) -> String;
}

const EN: &[&str] = &[
    "a", "about", "after", "against", "among", "an", "and", "are", "as", "at", "be", "before",
    "between", "by", "can", "do", "does", "for", "from", "has", "have", "how", "in", "into", "is",
    "it", "its", "of", "on", "or", "over", "than", "that", "the", "their", "these", "this",
    "those", "through", "to", "under", "was", "were", "what", "when", "where", "which", "who",
    "why", "will", "with", "within", "without",
];

const ES: &[&str] = &[
    "al", "como", "con", "de", "del", "desde", "el", "en", "entre", "es", "esta", "este", "hacia",
    "la", "las", "lo", "los", "o", "para", "por", "que", "se", "sin", "sobre", "su", "sus", "un",
    "una", "y",
];

const FR: &[&str] = &[
    "au", "aux", "avec", "ce", "ces", "dans", "de", "des", "du", "en", "entre", "est", "et", "la",
    "le", "les", "leur", "leurs", "ou", "par", "pour", "qui", "sur", "un", "une", "vers",
    "à",
];

const DE: &[&str] = &[
    "am", "auf", "aus", "bei", "das", "dem", "den", "der", "des", "die", "durch", "ein", "eine",
    "einer", "eines", "für", "im", "in", "ist", "mit", "nach", "oder", "über", "und", "unter",
    "von", "vom", "zu", "zum", "zur", "zwischen",
];

/// Built-in stopword lists, in the order ties are reported.
pub const STOPWORD_LISTS: &[(&str, &[&str])] = &[("en", EN), ("es", ES), ("fr", FR), ("de", DE)];

/// Titles shorter than this must be fully covered by one list to be classified.
pub const MIN_TOKENS_FOR_RATIO: usize = 4;

/// Stopword-ratio heuristic.
///
/// Each language scores the fraction of tokens found in its stopword list.
/// With at least four tokens the highest positive ratio wins; shorter titles
/// need every token in a single list. Ties yield [`UNKNOWN`].
#[derive(Debug, Clone, Copy, Default)]
pub struct StopwordDetector;

impl StopwordDetector {
    pub fn ratios(tokens: &[String]) -> Vec<(&'static str, f64)> {
        STOPWORD_LISTS
            .iter()
            .map(|&(code, list)| {
                let hits = tokens.iter().filter(|t| list.contains(&t.as_str())).count();
                let ratio = if tokens.is_empty() {
                    0.0
                } else {
                    hits as f64 / tokens.len() as f64
                };
                (code, ratio)
            })
            .collect()
    }
}

impl LanguageDetector for StopwordDetector {
    fn detect(&self, tokens: &[String]) -> String {
        if tokens.is_empty() {
            return UNKNOWN.to_owned();
        }
        let ratios = Self::ratios(tokens);
        let best = ratios.iter().map(|&(_, r)| r).fold(0.0_f64, f64::max);
        let required = if tokens.len() < MIN_TOKENS_FOR_RATIO {
            1.0
        } else {
            f64::MIN_POSITIVE
        };
        if best < required {
            return UNKNOWN.to_owned();
        }
        let mut winners = ratios.iter().filter(|&&(_, r)| r == best);
        match (winners.next(), winners.next()) {
            (Some(&(code, _)), None) => code.to_owned(),
            _ => UNKNOWN.to_owned(),
        }
    }
}
