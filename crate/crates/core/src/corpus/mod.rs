//! Title records, normalization and corpus loading.

mod language;
mod normalize;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

pub use language::{LanguageDetector, StopwordDetector, STOPWORD_LISTS, UNKNOWN};
pub use normalize::{normalize_title, tokenize};

use crate::error::{io_at, Error, Result};

/// One corpus entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TitleRecord {
    pub id: String,
    pub raw_title: String,
    pub normalized: String,
    pub tokens: Vec<String>,
    pub word_count: usize,
    pub source: String,
}

impl TitleRecord {
    pub fn new(id: impl Into<String>, raw_title: impl Into<String>, source: impl Into<String>) -> Self {
        let raw_title = raw_title.into();
        let normalized = normalize_title(&raw_title);
        let tokens = tokenize(&normalized);
        Self {
            id: id.into(),
            word_count: tokens.len(),
            raw_title,
            normalized,
            tokens,
            source: source.into(),
        }
    }

    /// Records with no words never take part in pairing.
    pub fn is_eligible(&self) -> bool {
        self.word_count > 0
    }
}

/// Input file layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    /// `.jsonl` / `.ndjson` map to JSONL, anything else to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("ndjson") => Format::Jsonl,
            _ => Format::Csv,
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            other => Err(format!("unknown format `{other}` (expected csv or jsonl)")),
        }
    }
}

/// Immutable in-memory corpus.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    records: Vec<TitleRecord>,
    index: HashMap<String, usize>,
    source_set: BTreeSet<String>,
    word_count_histogram: BTreeMap<usize, usize>,
}

impl Corpus {
    pub fn new(records: Vec<TitleRecord>) -> Result<Self> {
        let mut index = HashMap::with_capacity(records.len());
        let mut source_set = BTreeSet::new();
        let mut word_count_histogram = BTreeMap::new();
        for (i, r) in records.iter().enumerate() {
            if index.insert(r.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(r.id.clone()));
            }
            if !source_set.contains(&r.source) {
                source_set.insert(r.source.clone());
            }
            *word_count_histogram.entry(r.word_count).or_insert(0) += 1;
        }
        Ok(Self {
            records,
            index,
            source_set,
            word_count_histogram,
        })
    }

    /// Builds a corpus from `(id, title, source)` triples.
    pub fn from_triples<I, A, B, C>(triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, B, C)>,
        A: Into<String>,
        B: Into<String>,
        C: Into<String>,
    {
        Self::new(
            triples
                .into_iter()
                .map(|(id, title, source)| TitleRecord::new(id, title, source))
                .collect(),
        )
    }

    pub fn records(&self) -> &[TitleRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&TitleRecord> {
        self.index.get(id).map(|&i| &self.records[i])
    }

    pub fn source_set(&self) -> &BTreeSet<String> {
        &self.source_set
    }

    pub fn word_count_histogram(&self) -> &BTreeMap<usize, usize> {
        &self.word_count_histogram
    }

    /// Records with at least one word.
    pub fn eligible(&self) -> impl Iterator<Item = &TitleRecord> {
        self.records.iter().filter(|r| r.is_eligible())
    }
}

/// Most frequent word count; ties go to the smaller count.
pub fn mode_word_count(corpus: &Corpus) -> Result<usize> {
    // BTreeMap iterates ascending, so the first maximum seen is the smallest.
    let mut best: Option<(usize, usize)> = None;
    for (&count, &freq) in corpus.word_count_histogram() {
        if best.is_none_or(|(_, f)| freq > f) {
            best = Some((count, freq));
        }
    }
    best.map(|(count, _)| count).ok_or(Error::EmptyCorpus)
}

/// Detects the language of a record with the default detector.
pub fn detect_language(record: &TitleRecord) -> String {
    StopwordDetector.detect(&record.tokens)
}

#[derive(Debug, Deserialize)]
struct RawRow {
    id: Option<String>,
    title: Option<String>,
    source: Option<String>,
}

impl RawRow {
    fn into_record(self, line: u64) -> Result<TitleRecord> {
        let missing = |field: &str| Error::MalformedRecord {
            line,
            reason: format!("missing `{field}`"),
        };
        let id = self.id.filter(|s| !s.is_empty()).ok_or_else(|| missing("id"))?;
        let title = self.title.ok_or_else(|| missing("title"))?;
        let source = self
            .source
            .filter(|s| !s.is_empty())
            .ok_or_else(|| missing("source"))?;
        Ok(TitleRecord::new(id, title, source))
    }
}

fn read_csv_records<R: Read>(reader: R) -> Result<Vec<TitleRecord>> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    for required in ["id", "title", "source"] {
        if !headers.iter().any(|h| h == required) {
            return Err(Error::MalformedRecord {
                line: 1,
                reason: format!("header lacks `{required}` column"),
            });
        }
    }
    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let raw: RawRow = row
            .deserialize(Some(&headers))
            .map_err(|e| Error::MalformedRecord {
                line,
                reason: e.to_string(),
            })?;
        records.push(raw.into_record(line)?);
    }
    Ok(records)
}

fn read_jsonl_records<R: Read>(reader: R) -> Result<Vec<TitleRecord>> {
    let mut records = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let line_no = i as u64 + 1;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRow = serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
            line: line_no,
            reason: e.to_string(),
        })?;
        records.push(raw.into_record(line_no)?);
    }
    Ok(records)
}

/// Parses a corpus from any reader.
///
/// With a language filter, records detected as a different language are
/// dropped; records of unknown language are kept.
pub fn read_corpus<R: Read>(
    reader: R,
    format: Format,
    language_filter: Option<&str>,
    detector: &dyn LanguageDetector,
) -> Result<Corpus> {
    let mut records = match format {
        Format::Csv => read_csv_records(reader)?,
        Format::Jsonl => read_jsonl_records(reader)?,
    };
    if let Some(lang) = language_filter {
        records.retain(|r| {
            let detected = detector.detect(&r.tokens);
            detected == lang || detected == UNKNOWN
        });
    }
    Corpus::new(records)
}

pub fn load_corpus(path: &Path, format: Format, language_filter: Option<&str>) -> Result<Corpus> {
    let file = File::open(path).map_err(io_at(path))?;
    read_corpus(file, format, language_filter, &StopwordDetector)
}

/// Writes `id,title,source` rows in corpus order, titles as originally given.
pub fn write_corpus_csv<W: Write>(corpus: &Corpus, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["id", "title", "source"])?;
    for r in corpus.records() {
        wtr.write_record([&r.id, &r.raw_title, &r.source])?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn corpus_with_counts(counts: &[usize]) -> Corpus {
        Corpus::from_triples(counts.iter().enumerate().map(|(i, &n)| {
            let title = vec!["word"; n].join(" ");
            (format!("t{i}"), title, "s")
        }))
        .unwrap()
    }

    #[test]
    fn csv_with_three_rows() {
        let data = "id,title,source\nt1,Growth and Trade,JSTOR\nt2,\"Trade, Growth\",ELSEVIER\nt3,Poverty,JSTOR\n";
        let c = read_corpus(data.as_bytes(), Format::Csv, None, &StopwordDetector).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.get("t2").unwrap().normalized, "trade growth");
        assert_eq!(c.source_set().len(), 2);
        assert_eq!(c.word_count_histogram().values().sum::<usize>(), 3);
    }

    #[test]
    fn csv_duplicate_id() {
        let data = "id,title,source\nt1,a,s\nt1,b,s\n";
        let err = read_corpus(data.as_bytes(), Format::Csv, None, &StopwordDetector).unwrap_err();
        assert!(matches!(err, Error::DuplicateId(ref id) if id == "t1"));
    }

    #[test]
    fn csv_missing_fields() {
        let short = "id,title,source\nt1,a\n";
        let err = read_corpus(short.as_bytes(), Format::Csv, None, &StopwordDetector).unwrap_err();
        assert!(matches!(err, Error::MalformedRecord { line: 2, .. }), "{err:?}");

        let empty_id = "id,title,source\n,a,s\n";
        let err = read_corpus(empty_id.as_bytes(), Format::Csv, None, &StopwordDetector).unwrap_err();
        assert!(matches!(err, Error::MalformedRecord { .. }));

        let no_header = "id,name,source\nt1,a,s\n";
        let err = read_corpus(no_header.as_bytes(), Format::Csv, None, &StopwordDetector).unwrap_err();
        assert!(matches!(err, Error::MalformedRecord { line: 1, .. }));
    }

    #[test]
    fn jsonl_ignores_unknown_fields() {
        let data = r#"{"id":"a","title":"The Impact of Aid","source":"x","year":2001}

{"id":"b","title":"Aid","source":"y"}
"#;
        let c = read_corpus(data.as_bytes(), Format::Jsonl, None, &StopwordDetector).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.get("a").unwrap().word_count, 4);
    }

    #[test]
    fn jsonl_rejects_missing_source() {
        let data = "{\"id\":\"a\",\"title\":\"x\"}\n";
        let err = read_corpus(data.as_bytes(), Format::Jsonl, None, &StopwordDetector).unwrap_err();
        assert!(matches!(err, Error::MalformedRecord { line: 1, .. }));
    }

    #[test]
    fn language_filter_keeps_english_and_unknown() {
        // Hand-labelled: rows 0-3 English, 4-5 Spanish, 6-7 French, 8-9 unknown.
        let titles = [
            "The Impact of Microfinance on Poverty",
            "Trade and Growth in the Long Run",
            "Evidence from a Field Experiment in Kenya",
            "What Drives Inflation in the Long Run",
            "El impacto de las microfinanzas",
            "La pobreza en los hogares rurales",
            "Les effets du microcrédit sur la pauvreté",
            "Une analyse des marchés du travail",
            "Microfinance",
            "Growth Poverty Inequality Kenya",
        ];
        let csv: String = std::iter::once("id,title,source".to_string())
            .chain(titles.iter().enumerate().map(|(i, t)| format!("r{i},\"{t}\",s")))
            .collect::<Vec<_>>()
            .join("\n");
        let c = read_corpus(csv.as_bytes(), Format::Csv, Some("en"), &StopwordDetector).unwrap();
        let ids: Vec<_> = c.records().iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["r0", "r1", "r2", "r3", "r8", "r9"]);
    }

    #[test]
    fn mode_examples() {
        assert_eq!(mode_word_count(&corpus_with_counts(&[5, 7, 7, 9])).unwrap(), 7);
        assert_eq!(mode_word_count(&corpus_with_counts(&[5, 5, 7, 7])).unwrap(), 5);
        assert_eq!(mode_word_count(&corpus_with_counts(&[3])).unwrap(), 3);
        assert!(matches!(
            mode_word_count(&Corpus::default()),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn zero_word_records_are_kept_but_ineligible() {
        let c = Corpus::from_triples([("a", "?!", "s"), ("b", "x", "s")]).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.eligible().count(), 1);
    }

    #[test]
    fn csv_write_read_write_is_stable() {
        let data = "id,title,source\nt1,\"Growth, \"\"Trade\"\"\",JSTOR\nt2,  spaced  ,E\n";
        let c = read_corpus(data.as_bytes(), Format::Csv, None, &StopwordDetector).unwrap();
        let mut first = Vec::new();
        write_corpus_csv(&c, &mut first).unwrap();
        let c2 = read_corpus(first.as_slice(), Format::Csv, None, &StopwordDetector).unwrap();
        let mut second = Vec::new();
        write_corpus_csv(&c2, &mut second).unwrap();
        assert_eq!(first, second);
        assert_eq!(c2.get("t2").unwrap().raw_title, "  spaced  ");
    }

    proptest! {
        #[test]
        fn load_yields_every_row(n in 0usize..40) {
            let mut csv = String::from("id,title,source\n");
            for i in 0..n {
                csv.push_str(&format!("id{i},title number {i},src{}\n", i % 3));
            }
            let c = read_corpus(csv.as_bytes(), Format::Csv, None, &StopwordDetector).unwrap();
            prop_assert_eq!(c.len(), n);
        }

        #[test]
        fn mode_has_maximal_frequency(counts in prop::collection::vec(0usize..12, 1..60)) {
            let c = corpus_with_counts(&counts);
            let mode = mode_word_count(&c).unwrap();
            let hist = c.word_count_histogram();
            prop_assert!(hist.values().all(|&f| f <= hist[&mode]));
            prop_assert_eq!(hist.values().sum::<usize>(), counts.len());
        }
    }
}
