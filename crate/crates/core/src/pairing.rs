//! Candidate pair generation under the five blocking strategies.
//!
//! Every strategy yields canonical pairs (`left_id < right_id`) in ascending
//! `(left_id, right_id)` order. Word-count strategies bucket records by count
//! and only visit compatible buckets, so their cost follows the output size
//! rather than `n²`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{mode_word_count, Corpus};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Complete,
    CrossSource,
    LengthDiff,
    ModeWindow,
    ShortTitles,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Complete,
        Strategy::CrossSource,
        Strategy::LengthDiff,
        Strategy::ModeWindow,
        Strategy::ShortTitles,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Complete => "complete",
            Strategy::CrossSource => "cross_source",
            Strategy::LengthDiff => "length_diff",
            Strategy::ModeWindow => "mode_window",
            Strategy::ShortTitles => "short_titles",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    /// Accepts both `cross_source` and `cross-source` spellings.
    fn from_str(s: &str) -> Result<Self, String> {
        let snake = s.replace('-', "_");
        Strategy::ALL
            .into_iter()
            .find(|st| st.as_str() == snake)
            .ok_or_else(|| format!("unknown strategy `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairingConfig {
    /// Maximum word-count difference for `LengthDiff`.
    pub delta: usize,
    /// Half-width of the window around the mode for `ModeWindow`.
    pub lambda: usize,
    /// Maximum word count for `ShortTitles`.
    pub tau: usize,
    pub strategy: Strategy,
}

impl Default for PairingConfig {
    fn default() -> Self {
        Self {
            delta: 5,
            lambda: 2,
            tau: 3,
            strategy: Strategy::Complete,
        }
    }
}

impl PairingConfig {
    pub fn with_strategy(strategy: Strategy) -> Self {
        Self {
            strategy,
            ..Self::default()
        }
    }
}

/// Unordered pair key in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairKey {
    pub left_id: String,
    pub right_id: String,
}

impl PairKey {
    /// Orders the ids; `None` when they are equal.
    pub fn new(a: impl Into<String>, b: impl Into<String>) -> Option<Self> {
        let (a, b) = (a.into(), b.into());
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Self { left_id: a, right_id: b }),
            std::cmp::Ordering::Greater => Some(Self { left_id: b, right_id: a }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.left_id < self.right_id
    }
}

impl fmt::Display for PairKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.left_id, self.right_id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CandidatePair {
    pub left_id: String,
    pub right_id: String,
    pub strategy: Strategy,
}

impl CandidatePair {
    pub fn new(a: impl Into<String>, b: impl Into<String>, strategy: Strategy) -> Option<Self> {
        PairKey::new(a, b).map(|k| Self {
            left_id: k.left_id,
            right_id: k.right_id,
            strategy,
        })
    }

    pub fn key(&self) -> PairKey {
        PairKey {
            left_id: self.left_id.clone(),
            right_id: self.right_id.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Entry<'a> {
    id: &'a str,
    word_count: usize,
    source: &'a str,
}

#[derive(Debug, Clone, Copy)]
enum Window {
    /// Every eligible record is compatible.
    All,
    /// Word counts within `±radius` of the left record's count.
    Radius(usize),
}

/// Lazy, ordered stream of candidate pairs.
pub struct Pairs<'a> {
    entries: Vec<Entry<'a>>,
    /// word count -> ascending entry indices
    buckets: BTreeMap<usize, Vec<usize>>,
    window: Window,
    cross_source_only: bool,
    strategy: Strategy,
    left: usize,
    right: Vec<usize>,
    cursor: usize,
}

impl<'a> Pairs<'a> {
    fn new(
        corpus: &'a Corpus,
        strategy: Strategy,
        keep: impl Fn(usize) -> bool,
        window: Window,
        cross_source_only: bool,
    ) -> Self {
        let mut entries: Vec<Entry<'a>> = corpus
            .eligible()
            .filter(|r| keep(r.word_count))
            .map(|r| Entry {
                id: r.id.as_str(),
                word_count: r.word_count,
                source: r.source.as_str(),
            })
            .collect();
        entries.sort_unstable_by(|a, b| a.id.cmp(b.id));
        let mut buckets: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        if let Window::Radius(_) = window {
            for (i, e) in entries.iter().enumerate() {
                buckets.entry(e.word_count).or_default().push(i);
            }
        }
        let mut pairs = Self {
            entries,
            buckets,
            window,
            cross_source_only,
            strategy,
            left: 0,
            right: Vec::new(),
            cursor: 0,
        };
        pairs.fill_right();
        pairs
    }

    fn compatible(&self, i: usize, j: usize) -> bool {
        !self.cross_source_only || self.entries[i].source != self.entries[j].source
    }

    /// Loads partners of `self.left` that sort after it.
    fn fill_right(&mut self) {
        self.right.clear();
        self.cursor = 0;
        let i = self.left;
        if i >= self.entries.len() {
            return;
        }
        match self.window {
            Window::All => {
                let right: Vec<usize> = (i + 1..self.entries.len())
                    .filter(|&j| self.compatible(i, j))
                    .collect();
                self.right = right;
            }
            Window::Radius(radius) => {
                let w = self.entries[i].word_count;
                let range = w.saturating_sub(radius)..=w.saturating_add(radius);
                let mut right = Vec::new();
                for bucket in self.buckets.range(range).map(|(_, b)| b) {
                    let start = bucket.partition_point(|&j| j <= i);
                    right.extend(bucket[start..].iter().copied().filter(|&j| self.compatible(i, j)));
                }
                right.sort_unstable();
                self.right = right;
            }
        }
    }

    /// Number of eligible records this stream draws from.
    pub fn population(&self) -> usize {
        self.entries.len()
    }
}

impl Iterator for Pairs<'_> {
    type Item = CandidatePair;

    fn next(&mut self) -> Option<CandidatePair> {
        loop {
            if self.left >= self.entries.len() {
                return None;
            }
            if let Some(&j) = self.right.get(self.cursor) {
                self.cursor += 1;
                return Some(CandidatePair {
                    left_id: self.entries[self.left].id.to_owned(),
                    right_id: self.entries[j].id.to_owned(),
                    strategy: self.strategy,
                });
            }
            self.left += 1;
            self.fill_right();
        }
    }
}

/// All `n'(n'-1)/2` pairs of eligible records.
pub fn complete_pairs(corpus: &Corpus) -> Pairs<'_> {
    Pairs::new(corpus, Strategy::Complete, |_| true, Window::All, false)
}

/// Pairs whose records come from different sources.
pub fn cross_source_pairs(corpus: &Corpus) -> Pairs<'_> {
    Pairs::new(corpus, Strategy::CrossSource, |_| true, Window::All, true)
}

/// Pairs with `|w1 - w2| <= delta`.
pub fn length_diff_pairs<'a>(corpus: &'a Corpus, config: &PairingConfig) -> Pairs<'a> {
    Pairs::new(
        corpus,
        Strategy::LengthDiff,
        |_| true,
        Window::Radius(config.delta),
        false,
    )
}

/// Cross-source pairs where both word counts lie within `lambda` of the mode.
pub fn mode_window_pairs<'a>(corpus: &'a Corpus, config: &PairingConfig) -> Result<Pairs<'a>> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mode = mode_word_count(corpus)?;
    let lambda = config.lambda;
    Ok(Pairs::new(
        corpus,
        Strategy::ModeWindow,
        move |w| w.abs_diff(mode) <= lambda,
        Window::All,
        true,
    ))
}

/// Pairs where both titles have between 1 and `tau` words.
pub fn short_title_pairs<'a>(corpus: &'a Corpus, config: &PairingConfig) -> Pairs<'a> {
    let tau = config.tau;
    Pairs::new(
        corpus,
        Strategy::ShortTitles,
        move |w| w <= tau,
        Window::All,
        false,
    )
}

/// Dispatches on `config.strategy`.
pub fn generate<'a>(corpus: &'a Corpus, config: &PairingConfig) -> Result<Pairs<'a>> {
    Ok(match config.strategy {
        Strategy::Complete => complete_pairs(corpus),
        Strategy::CrossSource => cross_source_pairs(corpus),
        Strategy::LengthDiff => length_diff_pairs(corpus, config),
        Strategy::ModeWindow => mode_window_pairs(corpus, config)?,
        Strategy::ShortTitles => short_title_pairs(corpus, config),
    })
}

#[derive(Debug, Deserialize)]
struct PairRow {
    left_id: String,
    right_id: String,
    strategy: String,
}

/// Writes `left_id,right_id,strategy` rows in the order given.
pub fn write_pairs_csv<W, I>(pairs: I, writer: W) -> Result<usize>
where
    W: Write,
    I: IntoIterator<Item = CandidatePair>,
{
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["left_id", "right_id", "strategy"])?;
    let mut n = 0;
    for p in pairs {
        wtr.write_record([p.left_id.as_str(), p.right_id.as_str(), p.strategy.as_str()])?;
        n += 1;
    }
    wtr.flush()?;
    Ok(n)
}

/// Reads a pair file, canonicalizing each pair; self-pairs are rejected.
pub fn read_pairs_csv<R: Read>(reader: R) -> Result<Vec<CandidatePair>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<PairRow>().enumerate() {
        let line = i as u64 + 2;
        let row = row.map_err(|e| Error::MalformedRecord {
            line,
            reason: e.to_string(),
        })?;
        let strategy: Strategy = row
            .strategy
            .parse()
            .map_err(|reason| Error::MalformedRecord { line, reason })?;
        let pair = CandidatePair::new(row.left_id, row.right_id, strategy).ok_or_else(|| {
            Error::MalformedRecord {
                line,
                reason: "pair of a record with itself".into(),
            }
        })?;
        out.push(pair);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(rows: &[(&str, usize, &str)]) -> Corpus {
        Corpus::from_triples(
            rows.iter()
                .map(|&(id, n, src)| (id, vec!["w"; n].join(" "), src)),
        )
        .unwrap()
    }

    fn keys(p: Pairs<'_>) -> Vec<(String, String)> {
        p.map(|c| (c.left_id, c.right_id)).collect()
    }

    #[test]
    fn complete_counts() {
        let c = corpus(&[("a", 1, "s"), ("b", 2, "s"), ("c", 3, "s"), ("d", 4, "s")]);
        assert_eq!(complete_pairs(&c).count(), 6);
        assert_eq!(complete_pairs(&corpus(&[("a", 1, "s")])).count(), 0);
        assert_eq!(complete_pairs(&Corpus::default()).count(), 0);
    }

    #[test]
    fn complete_is_lexicographic() {
        let c = corpus(&[("c", 1, "s"), ("a", 1, "s"), ("b", 1, "s")]);
        assert_eq!(
            keys(complete_pairs(&c)),
            [("a", "b"), ("a", "c"), ("b", "c")].map(|(l, r)| (l.to_string(), r.to_string()))
        );
    }

    #[test]
    fn zero_word_records_are_skipped() {
        let c = corpus(&[("a", 0, "s"), ("b", 2, "s"), ("c", 3, "t")]);
        assert_eq!(keys(complete_pairs(&c)), [("b".into(), "c".into())]);
    }

    #[test]
    fn cross_source_examples() {
        let c = corpus(&[("a1", 2, "A"), ("a2", 2, "A"), ("b1", 2, "B"), ("b2", 2, "B")]);
        let got = keys(cross_source_pairs(&c));
        assert_eq!(got.len(), 4);
        assert!(got.iter().all(|(l, r)| l.starts_with('a') && r.starts_with('b')));

        let same = corpus(&[("a", 2, "A"), ("b", 2, "A")]);
        assert_eq!(cross_source_pairs(&same).count(), 0);

        let three = corpus(&[("x", 1, "A"), ("y", 1, "B"), ("z", 1, "C")]);
        assert_eq!(cross_source_pairs(&three).count(), 3);
    }

    #[test]
    fn length_diff_boundaries() {
        let cfg = PairingConfig::default();
        let c = corpus(&[("a", 7, "s"), ("b", 12, "s")]);
        assert_eq!(length_diff_pairs(&c, &cfg).count(), 1);
        let c = corpus(&[("a", 3, "s"), ("b", 9, "s")]);
        assert_eq!(length_diff_pairs(&c, &cfg).count(), 0);
        let zero = PairingConfig { delta: 0, ..cfg };
        let c = corpus(&[("a", 3, "s"), ("b", 3, "s"), ("c", 4, "s")]);
        assert_eq!(keys(length_diff_pairs(&c, &zero)), [("a".into(), "b".into())]);
    }

    #[test]
    fn mode_window_examples() {
        let cfg = PairingConfig::default();
        // Four 8-word fillers in one source fix the mode at 8.
        let base = [("m1", 8, "Z"), ("m2", 8, "Z"), ("m3", 8, "Z"), ("m4", 8, "Z")];
        let mut rows = base.to_vec();
        rows.extend([("p", 7, "A"), ("q", 10, "B"), ("r", 11, "B")]);
        let c = corpus(&rows);
        assert_eq!(mode_word_count(&c).unwrap(), 8);
        let got = keys(mode_window_pairs(&c, &cfg).unwrap());
        assert!(got.contains(&("p".into(), "q".into())));
        assert!(!got.iter().any(|(l, r)| l == "r" || r == "r"));
        // m* share a source, so none of them pair with each other.
        assert!(!got.contains(&("m1".into(), "m2".into())));
        assert!(matches!(
            mode_window_pairs(&Corpus::default(), &cfg),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn short_title_examples() {
        let cfg = PairingConfig::default();
        assert_eq!(short_title_pairs(&corpus(&[("a", 3, "s"), ("b", 2, "s")]), &cfg).count(), 1);
        assert_eq!(short_title_pairs(&corpus(&[("a", 4, "s"), ("b", 2, "s")]), &cfg).count(), 0);
        let tau0 = PairingConfig { tau: 0, ..cfg };
        assert_eq!(short_title_pairs(&corpus(&[("a", 0, "s"), ("b", 0, "s")]), &tau0).count(), 0);
    }

    #[test]
    fn generate_dispatch() {
        let c = corpus(&[("a", 5, "s"), ("b", 6, "t"), ("c", 4, "s")]);
        let cfg = PairingConfig::with_strategy(Strategy::Complete);
        assert_eq!(generate(&c, &cfg).unwrap().count(), 3);
        let cfg = PairingConfig::with_strategy(Strategy::ShortTitles);
        assert_eq!(generate(&c, &cfg).unwrap().count(), 0);
        assert!(generate(&c, &cfg).unwrap().all(|p| p.strategy == Strategy::ShortTitles));
    }

    #[test]
    fn strategy_names_parse() {
        for s in Strategy::ALL {
            assert_eq!(s.as_str().parse::<Strategy>().unwrap(), s);
            assert_eq!(s.as_str().replace('_', "-").parse::<Strategy>().unwrap(), s);
        }
        assert!("fuzzy".parse::<Strategy>().is_err());
    }

    #[test]
    fn pair_file_round_trip() {
        let c = corpus(&[("b", 1, "s"), ("a", 1, "t"), ("c", 2, "t")]);
        let mut first = Vec::new();
        write_pairs_csv(cross_source_pairs(&c), &mut first).unwrap();
        assert_eq!(
            std::str::from_utf8(&first).unwrap(),
            "left_id,right_id,strategy\na,b,cross_source\nb,c,cross_source\n"
        );
        let back = read_pairs_csv(first.as_slice()).unwrap();
        let mut second = Vec::new();
        write_pairs_csv(back, &mut second).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn pair_file_canonicalizes_and_rejects_self_pairs() {
        let data = "left_id,right_id,strategy\nz,a,complete\n";
        let p = read_pairs_csv(data.as_bytes()).unwrap();
        assert_eq!((p[0].left_id.as_str(), p[0].right_id.as_str()), ("a", "z"));
        let data = "left_id,right_id,strategy\na,a,complete\n";
        assert!(read_pairs_csv(data.as_bytes()).is_err());
    }
}
