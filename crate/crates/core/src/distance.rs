//! Edit distance, bag-of-words cosine and per-pair scoring.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use serde::Deserialize;

use crate::corpus::Corpus;
use crate::embedding::EmbeddingStore;
use crate::error::{Error, Result};
use crate::formats::{sig9, sig9_opt};
use crate::num::{dot, squared_norm, Real};
use crate::pairing::PairKey;

/// Levenshtein distance over arbitrary comparable items.
pub fn levenshtein_slice<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (a, b) = trim_common(a, b);
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    // Keep the row over the shorter side.
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, x) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let above = row[j + 1];
            let sub = diag + usize::from(x != y);
            row[j + 1] = sub.min(above + 1).min(row[j] + 1);
            diag = above;
        }
    }
    row[b.len()]
}

/// Exact distance if it is at most `max`, otherwise `None`.
///
/// Only cells within `max` of the diagonal are evaluated.
pub fn levenshtein_bounded_slice<T: PartialEq>(a: &[T], b: &[T], max: usize) -> Option<usize> {
    let (a, b) = trim_common(a, b);
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    let (m, n) = (a.len(), b.len());
    if m - n > max {
        return None;
    }
    if n == 0 {
        return Some(m);
    }
    const INF: usize = usize::MAX / 2;
    let mut prev: Vec<usize> = (0..=n).map(|j| if j <= max { j } else { INF }).collect();
    let mut cur = vec![INF; n + 1];
    for i in 1..=m {
        let lo = i.saturating_sub(max).max(1);
        let hi = (i + max).min(n);
        cur[lo - 1] = if lo == 1 { i } else { INF };
        let mut best = cur[lo - 1];
        for j in lo..=hi {
            let sub = prev[j - 1] + usize::from(a[i - 1] != b[j - 1]);
            let v = sub.min(prev[j] + 1).min(cur[j - 1] + 1);
            cur[j] = v;
            best = best.min(v);
        }
        if hi < n {
            cur[hi + 1] = INF;
        }
        if best > max {
            return None;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Some(prev[n]).filter(|&d| d <= max)
}

fn trim_common<'a, T: PartialEq>(a: &'a [T], b: &'a [T]) -> (&'a [T], &'a [T]) {
    let prefix = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let (a, b) = (&a[prefix..], &b[prefix..]);
    let suffix = a.iter().rev().zip(b.iter().rev()).take_while(|(x, y)| x == y).count();
    (&a[..a.len() - suffix], &b[..b.len() - suffix])
}

/// Edit distance counted in Unicode scalar values.
pub fn levenshtein(s1: &str, s2: &str) -> usize {
    let a: Vec<char> = s1.chars().collect();
    let b: Vec<char> = s2.chars().collect();
    levenshtein_slice(&a, &b)
}

pub fn levenshtein_bounded(s1: &str, s2: &str, max: usize) -> Option<usize> {
    let a: Vec<char> = s1.chars().collect();
    let b: Vec<char> = s2.chars().collect();
    levenshtein_bounded_slice(&a, &b, max)
}

/// Edit distance divided by the longer length; `0` for two empty strings.
pub fn levenshtein_normalized(s1: &str, s2: &str) -> f64 {
    let longest = s1.chars().count().max(s2.chars().count());
    if longest == 0 {
        return 0.0;
    }
    levenshtein(s1, s2) as f64 / longest as f64
}

/// Sorted union of the tokens of both titles.
pub fn union_vocabulary<'a>(a: &'a [String], b: &'a [String]) -> Vec<&'a str> {
    a.iter()
        .chain(b)
        .map(String::as_str)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Raw occurrence counts of `tokens` over `vocab`.
pub fn token_count_vector<S: AsRef<str>>(tokens: &[S], vocab: &[&str]) -> Vec<u32> {
    let mut v = vec![0u32; vocab.len()];
    for t in tokens {
        if let Ok(i) = vocab.binary_search(&t.as_ref()) {
            v[i] += 1;
        } else if let Some(i) = vocab.iter().position(|w| *w == t.as_ref()) {
            v[i] += 1;
        }
    }
    v
}

/// `dot(v1, v2) / (|v1| |v2|)`, clamped to `[-1, 1]`.
pub fn cosine_similarity<T: Real>(v1: &[T], v2: &[T]) -> Result<T> {
    assert_eq!(v1.len(), v2.len(), "cosine of vectors with different dimension");
    let (n1, n2) = (squared_norm(v1), squared_norm(v2));
    if n1.is_zero() || n2.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok((dot(v1, v2) / (n1 * n2).sqrt()).clamp_to(-T::one(), T::one()))
}

/// Bag-of-words cosine between two token lists.
pub fn token_cosine(a: &[String], b: &[String]) -> Result<f64> {
    let vocab = union_vocabulary(a, b);
    let to_f64 = |v: Vec<u32>| v.into_iter().map(f64::from).collect::<Vec<_>>();
    let va = to_f64(token_count_vector(a, &vocab));
    let vb = to_f64(token_count_vector(b, &vocab));
    cosine_similarity(&va, &vb)
}

/// The three distances for one candidate pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairScores {
    pub left_id: String,
    pub right_id: String,
    pub lev_raw: usize,
    pub lev_norm: f64,
    pub cosine_sim: f64,
    pub cosine_dist: f64,
    pub embed_sim: Option<f64>,
    pub embed_dist: Option<f64>,
}

impl PairScores {
    pub fn key(&self) -> PairKey {
        PairKey {
            left_id: self.left_id.clone(),
            right_id: self.right_id.clone(),
        }
    }
}

/// Maps an embedding cosine in `[-1, 1]` onto a distance in `[0, 1]`.
pub fn embed_distance(sim: f64) -> f64 {
    ((1.0 - sim) / 2.0).clamp(0.0, 1.0)
}

/// Scores one pair over normalized titles.
pub fn score_pair<T: Real>(
    pair: &PairKey,
    corpus: &Corpus,
    embeddings: Option<&EmbeddingStore<T>>,
) -> Result<PairScores> {
    let lookup = |id: &str| corpus.get(id).ok_or_else(|| Error::UnknownId(id.to_owned()));
    let left = lookup(&pair.left_id)?;
    let right = lookup(&pair.right_id)?;

    let lev_raw = levenshtein(&left.normalized, &right.normalized);
    let longest = left.normalized.chars().count().max(right.normalized.chars().count());
    let lev_norm = if longest == 0 {
        0.0
    } else {
        lev_raw as f64 / longest as f64
    };
    let cosine_sim = token_cosine(&left.tokens, &right.tokens)?.clamp(0.0, 1.0);

    let embed_sim = match embeddings {
        Some(store) => {
            for id in [&pair.left_id, &pair.right_id] {
                if !store.contains(id) {
                    return Err(Error::MissingEmbedding(id.clone()));
                }
            }
            Some(store.similarity(&pair.left_id, &pair.right_id)?.to_f64_lossless())
        }
        None => None,
    };

    Ok(PairScores {
        left_id: pair.left_id.clone(),
        right_id: pair.right_id.clone(),
        lev_raw,
        lev_norm,
        cosine_sim,
        cosine_dist: 1.0 - cosine_sim,
        embed_sim,
        embed_dist: embed_sim.map(embed_distance),
    })
}

pub const SCORES_HEADER: [&str; 8] = [
    "left_id",
    "right_id",
    "lev_raw",
    "lev_norm",
    "cosine_sim",
    "cosine_dist",
    "embed_sim",
    "embed_dist",
];

/// Writes score rows with reals at nine significant digits.
pub fn write_scores_csv<'a, W, I>(scores: I, writer: W) -> Result<usize>
where
    W: Write,
    I: IntoIterator<Item = &'a PairScores>,
{
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(SCORES_HEADER)?;
    let mut n = 0;
    for s in scores {
        wtr.write_record([
            s.left_id.clone(),
            s.right_id.clone(),
            s.lev_raw.to_string(),
            sig9(s.lev_norm),
            sig9(s.cosine_sim),
            sig9(s.cosine_dist),
            sig9_opt(s.embed_sim),
            sig9_opt(s.embed_dist),
        ])?;
        n += 1;
    }
    wtr.flush()?;
    Ok(n)
}

#[derive(Debug, Deserialize)]
struct ScoreRow {
    left_id: String,
    right_id: String,
    lev_raw: usize,
    lev_norm: f64,
    cosine_sim: f64,
    cosine_dist: f64,
    embed_sim: Option<f64>,
    embed_dist: Option<f64>,
}

pub fn read_scores_csv<R: Read>(reader: R) -> Result<Vec<PairScores>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<ScoreRow>().enumerate() {
        let line = i as u64 + 2;
        let r = row.map_err(|e| Error::MalformedRecord {
            line,
            reason: e.to_string(),
        })?;
        if r.embed_sim.is_some() != r.embed_dist.is_some() {
            return Err(Error::MalformedRecord {
                line,
                reason: "embed_sim and embed_dist must both be present or both empty".into(),
            });
        }
        out.push(PairScores {
            left_id: r.left_id,
            right_id: r.right_id,
            lev_raw: r.lev_raw,
            lev_norm: r.lev_norm,
            cosine_sim: r.cosine_sim,
            cosine_dist: r.cosine_dist,
            embed_sim: r.embed_sim,
            embed_dist: r.embed_dist,
        });
    }
    Ok(out)
}
