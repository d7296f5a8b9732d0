//! Deterministic synthetic corpora for benchmarks and end-to-end checks.

use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{normalize_title, Corpus, TitleRecord};
use crate::embedding::EmbeddingStore;
use crate::error::Result;
use crate::pairing::PairKey;

#[derive(Debug, Clone)]
pub struct SynthConfig {
    /// Total records, injected copies included.
    pub titles: usize,
    pub sources: Vec<String>,
    /// Near-duplicate copies placed in a different source from their original.
    pub injected: usize,
    /// Letter substitutions applied to each copy (at least 1).
    pub max_edits: usize,
    pub vocabulary: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            titles: 1_000,
            sources: vec!["JSTOR".into(), "ELSEVIER".into(), "SSRN".into()],
            injected: 50,
            max_edits: 2,
            vocabulary: 3_000,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub corpus: Corpus,
    /// Original/copy pairs, canonical and sorted.
    pub injected: Vec<PairKey>,
}

const LETTERS: &[u8] = b"abcdefghijklmnopqrstuvwxyz";

fn random_word(rng: &mut ChaCha8Rng) -> String {
    let len = rng.random_range(3..=9);
    (0..len)
        .map(|_| *LETTERS.choose(rng).expect("non-empty alphabet") as char)
        .collect()
}

/// Replaces `edits` distinct letter positions with different letters.
fn perturb(title: &str, edits: usize, rng: &mut ChaCha8Rng) -> String {
    let mut chars: Vec<char> = title.chars().collect();
    let letters: Vec<usize> = (0..chars.len()).filter(|&i| chars[i].is_ascii_lowercase()).collect();
    for &i in letters.choose_multiple(rng, edits) {
        let old = chars[i];
        let mut new = old;
        while new == old {
            new = *LETTERS.choose(rng).expect("non-empty alphabet") as char;
        }
        chars[i] = new;
    }
    chars.into_iter().collect()
}

/// Random unique titles, optionally with injected cross-source near-duplicates.
///
/// Every title has at least 11 characters, so `max_edits = 2` keeps each
/// injected pair's normalized edit distance below 0.2.
pub fn synthetic_corpus(cfg: &SynthConfig) -> Result<SynthCorpus> {
    assert!(!cfg.sources.is_empty(), "need at least one source");
    assert!(cfg.injected == 0 || cfg.sources.len() >= 2, "injection needs two sources");
    assert!(cfg.injected <= cfg.titles / 2, "too many injected copies");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let vocab: Vec<String> = (0..cfg.vocabulary.max(1)).map(|_| random_word(&mut rng)).collect();

    let base = cfg.titles - cfg.injected;
    let mut seen = HashSet::new();
    let mut records = Vec::with_capacity(cfg.titles);
    while records.len() < base {
        let words = rng.random_range(3..=10);
        let title = (0..words)
            .map(|_| vocab.choose(&mut rng).expect("non-empty vocabulary").as_str())
            .collect::<Vec<_>>()
            .join(" ");
        if title.len() < 11 || !seen.insert(normalize_title(&title)) {
            continue;
        }
        let i = records.len();
        let source = &cfg.sources[i % cfg.sources.len()];
        records.push(TitleRecord::new(format!("t{i:06}"), title, source.clone()));
    }

    let originals: Vec<usize> = rand::seq::index::sample(&mut rng, base, cfg.injected).into_vec();
    let mut injected = Vec::with_capacity(cfg.injected);
    for (k, &orig) in originals.iter().enumerate() {
        let src = &records[orig];
        let edits = rng.random_range(1..=cfg.max_edits.max(1));
        let copy = loop {
            let candidate = perturb(&src.raw_title, edits, &mut rng);
            if seen.insert(normalize_title(&candidate)) {
                break candidate;
            }
        };
        let src_idx = cfg.sources.iter().position(|s| *s == src.source).unwrap_or(0);
        let other = (src_idx + 1 + k % (cfg.sources.len() - 1)) % cfg.sources.len();
        let id = format!("t{:06}", base + k);
        injected.push(PairKey::new(src.id.clone(), id.clone()).expect("distinct ids"));
        records.push(TitleRecord::new(id, copy, cfg.sources[other].clone()));
    }
    injected.sort();
    Ok(SynthCorpus {
        corpus: Corpus::new(records)?,
        injected,
    })
}

/// Independent random unit vectors for every record.
pub fn random_unit_embeddings(corpus: &Corpus, dimension: usize, seed: u64) -> Result<EmbeddingStore<f32>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut store = EmbeddingStore::new(dimension, format!("random-unit-{dimension}"))?;
    for r in corpus.records() {
        let v = loop {
            let v: Vec<f32> = (0..dimension).map(|_| rng.random_range(-1.0f32..1.0)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f32>().sqrt();
            if norm > 1e-3 {
                break v.into_iter().map(|x| x / norm).collect();
            }
        };
        store.insert(r.id.clone(), v)?;
    }
    Ok(store)
}
