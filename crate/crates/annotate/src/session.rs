//! Labeling state shared by all HTTP handlers.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use chrono::{DateTime, Utc};
use serde::Serialize;
use titledup_core::corpus::Corpus;
use titledup_core::distance::PairScores;
use titledup_core::evaluation::{read_truth_csv, write_truth_row, GroundTruthLabel, Verdict, TRUTH_HEADER};
use titledup_core::pairing::PairKey;

use crate::error::{Result, ServiceError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Distances {
    pub lev_norm: f64,
    pub cosine_dist: f64,
    pub embed_dist: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairPayload {
    pub done: bool,
    pub left_id: String,
    pub right_id: String,
    pub left_title: String,
    pub right_title: String,
    pub left_source: String,
    pub right_source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distances: Option<Distances>,
    pub labeled_by_rater: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Progress {
    pub total: usize,
    pub labeled_any: usize,
    pub labeled_by_rater: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ack {
    pub ok: bool,
    pub labeled_at: String,
}

/// Append-only truth file; every row is synced before returning.
struct TruthLog {
    file: File,
    path: PathBuf,
}

impl TruthLog {
    /// Opens or creates the log, dropping an unterminated final line left by a crash.
    fn open(path: &Path) -> Result<(Self, Vec<GroundTruthLabel>)> {
        let io = |e| ServiceError::io(path, e);
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(path)
            .map_err(io)?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes).map_err(io)?;
        let complete = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
        if complete < bytes.len() {
            tracing::warn!(path = %path.display(), dropped = bytes.len() - complete, "discarding partial trailing row");
            file.set_len(complete as u64).map_err(io)?;
            file.seek(SeekFrom::End(0)).map_err(io)?;
            bytes.truncate(complete);
        }
        let mut log = Self { file, path: path.to_path_buf() };
        let labels = if bytes.is_empty() {
            let mut wtr = csv::Writer::from_writer(Vec::new());
            wtr.write_record(TRUTH_HEADER).expect("in-memory write");
            log.append(&wtr.into_inner().expect("in-memory flush"))?;
            Vec::new()
        } else {
            read_truth_csv(bytes.as_slice()).map_err(|e| ServiceError::Truth {
                path: path.to_path_buf(),
                source: e,
            })?
        };
        Ok((log, labels))
    }

    fn append(&mut self, row: &[u8]) -> Result<()> {
        let io = |e| ServiceError::io(&self.path, e);
        self.file.write_all(row).map_err(io)?;
        self.file.flush().map_err(io)?;
        self.file.sync_data().map_err(io)
    }
}

struct State {
    log: TruthLog,
    by_rater: HashMap<String, HashSet<PairKey>>,
    labeled_any: HashSet<PairKey>,
}

/// A queue of pairs awaiting verdicts plus the record of who labeled what.
pub struct AnnotationSession {
    queue: Vec<PairKey>,
    in_queue: HashSet<PairKey>,
    corpus: Corpus,
    scores: Option<HashMap<PairKey, PairScores>>,
    show_distances: bool,
    state: Mutex<State>,
}

impl AnnotationSession {
    /// Builds a session, replaying any labels already in `truth_path`.
    ///
    /// Queue order follows `pairs`; repeated pairs are served once. Every id
    /// must resolve in the corpus.
    pub fn open(
        corpus: Corpus,
        pairs: impl IntoIterator<Item = PairKey>,
        scores: Option<Vec<PairScores>>,
        truth_path: &Path,
        show_distances: bool,
    ) -> Result<Self> {
        let mut queue = Vec::new();
        let mut in_queue = HashSet::new();
        for key in pairs {
            for id in [&key.left_id, &key.right_id] {
                if corpus.get(id).is_none() {
                    return Err(ServiceError::UnknownRecord(id.clone()));
                }
            }
            if in_queue.insert(key.clone()) {
                queue.push(key);
            }
        }
        let scores = scores.map(|rows| rows.into_iter().map(|s| (s.key(), s)).collect());

        let (log, existing) = TruthLog::open(truth_path)?;
        let mut state = State {
            log,
            by_rater: HashMap::new(),
            labeled_any: HashSet::new(),
        };
        for label in existing {
            if in_queue.contains(&label.key) {
                state.record(label.rater, label.key);
            }
        }
        Ok(Self {
            queue,
            in_queue,
            corpus,
            scores,
            show_distances,
            state: Mutex::new(state),
        })
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    /// First queued pair this rater has not labeled, or `None` when done.
    pub fn next_pair(&self, rater: &str) -> Option<PairPayload> {
        let state = self.state.lock().expect("session lock poisoned");
        let done = state.by_rater.get(rater);
        let key = self
            .queue
            .iter()
            .find(|k| done.is_none_or(|d| !d.contains(*k)))?;
        let left = self.corpus.get(&key.left_id).expect("validated at open");
        let right = self.corpus.get(&key.right_id).expect("validated at open");
        let distances = if self.show_distances {
            self.scores.as_ref().and_then(|s| s.get(key)).map(|s| Distances {
                lev_norm: s.lev_norm,
                cosine_dist: s.cosine_dist,
                embed_dist: s.embed_dist,
            })
        } else {
            None
        };
        Some(PairPayload {
            done: false,
            left_id: key.left_id.clone(),
            right_id: key.right_id.clone(),
            left_title: left.raw_title.clone(),
            right_title: right.raw_title.clone(),
            left_source: left.source.clone(),
            right_source: right.source.clone(),
            distances,
            labeled_by_rater: done.map_or(0, HashSet::len),
            total: self.queue.len(),
        })
    }

    /// Appends and syncs one label; returns only once it is on disk.
    pub fn submit_label(&self, rater: &str, key: PairKey, verdict: Verdict) -> Result<Ack> {
        self.submit_label_at(rater, key, verdict, Utc::now())
    }

    pub fn submit_label_at(
        &self,
        rater: &str,
        key: PairKey,
        verdict: Verdict,
        labeled_at: DateTime<Utc>,
    ) -> Result<Ack> {
        let rater = rater.trim();
        if rater.is_empty() {
            return Err(ServiceError::MissingRater);
        }
        if !self.in_queue.contains(&key) {
            return Err(ServiceError::UnknownPair(key));
        }
        let label = GroundTruthLabel {
            key,
            verdict,
            rater: rater.to_owned(),
            labeled_at,
        };
        let mut row = csv::Writer::from_writer(Vec::new());
        write_truth_row(&mut row, &label).expect("in-memory write");
        let row = row.into_inner().expect("in-memory flush");

        let mut state = self.state.lock().expect("session lock poisoned");
        state.log.append(&row)?;
        state.record(label.rater, label.key);
        Ok(Ack {
            ok: true,
            labeled_at: titledup_core::evaluation::format_timestamp(&labeled_at),
        })
    }

    pub fn progress(&self) -> Progress {
        let state = self.state.lock().expect("session lock poisoned");
        Progress {
            total: self.queue.len(),
            labeled_any: state.labeled_any.len(),
            labeled_by_rater: state
                .by_rater
                .iter()
                .map(|(r, set)| (r.clone(), set.len()))
                .collect(),
        }
    }
}

impl State {
    fn record(&mut self, rater: String, key: PairKey) {
        self.labeled_any.insert(key.clone());
        self.by_rater.entry(rater).or_default().insert(key);
    }
}
