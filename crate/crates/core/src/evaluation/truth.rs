//! Ground-truth labels and their resolution into one verdict per pair.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pairing::PairKey;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Duplicate,
    NotDuplicate,
    Unsure,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Duplicate => "duplicate",
            Verdict::NotDuplicate => "not_duplicate",
            Verdict::Unsure => "unsure",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "duplicate" => Ok(Verdict::Duplicate),
            "not_duplicate" => Ok(Verdict::NotDuplicate),
            "unsure" => Ok(Verdict::Unsure),
            other => Err(Error::InvalidVerdict(other.to_owned())),
        }
    }
}

/// One rater's verdict on one pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruthLabel {
    pub key: PairKey,
    pub verdict: Verdict,
    pub rater: String,
    pub labeled_at: DateTime<Utc>,
}

/// Timestamp layout used in truth files.
pub fn format_timestamp(t: &DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Micros, true)
}

pub const TRUTH_HEADER: [&str; 5] = ["left_id", "right_id", "verdict", "rater", "labeled_at"];

/// Serializes one label as a CSV record (header excluded).
pub fn write_truth_row<W: Write>(wtr: &mut csv::Writer<W>, label: &GroundTruthLabel) -> Result<()> {
    wtr.write_record([
        label.key.left_id.as_str(),
        label.key.right_id.as_str(),
        label.verdict.as_str(),
        label.rater.as_str(),
        &format_timestamp(&label.labeled_at),
    ])?;
    Ok(())
}

pub fn write_truth_csv<'a, W, I>(labels: I, writer: W) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a GroundTruthLabel>,
{
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(TRUTH_HEADER)?;
    for l in labels {
        write_truth_row(&mut wtr, l)?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, Deserialize)]
struct TruthRow {
    left_id: String,
    right_id: String,
    verdict: String,
    rater: String,
    labeled_at: String,
}

/// Reads labels in file order. Pair ids are canonicalized.
pub fn read_truth_csv<R: Read>(reader: R) -> Result<Vec<GroundTruthLabel>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<TruthRow>().enumerate() {
        let line = i as u64 + 2;
        let malformed = |reason: String| Error::MalformedRecord { line, reason };
        let r = row.map_err(|e| malformed(e.to_string()))?;
        let key = PairKey::new(r.left_id, r.right_id)
            .ok_or_else(|| malformed("pair of a record with itself".into()))?;
        let verdict = r.verdict.parse().map_err(|e: Error| malformed(e.to_string()))?;
        let labeled_at = DateTime::parse_from_rfc3339(&r.labeled_at)
            .map_err(|e| malformed(format!("bad timestamp `{}`: {e}", r.labeled_at)))?
            .with_timezone(&Utc);
        out.push(GroundTruthLabel {
            key,
            verdict,
            rater: r.rater,
            labeled_at,
        });
    }
    Ok(out)
}

/// Latest verdict per `(pair, rater)`; equal timestamps go to the later row.
pub fn latest_per_rater(labels: &[GroundTruthLabel]) -> BTreeMap<(PairKey, String), Verdict> {
    let mut latest: HashMap<(PairKey, String), (DateTime<Utc>, Verdict)> = HashMap::new();
    for l in labels {
        let slot = (l.key.clone(), l.rater.clone());
        match latest.get(&slot) {
            Some((t, _)) if *t > l.labeled_at => {}
            _ => {
                latest.insert(slot, (l.labeled_at, l.verdict));
            }
        }
    }
    latest.into_iter().map(|(k, (_, v))| (k, v)).collect()
}

/// One verdict per pair across raters.
///
/// Duplicate and not-duplicate votes are counted; unsure votes abstain. The
/// larger side wins and an exact tie resolves to unsure.
pub fn resolve(labels: &[GroundTruthLabel]) -> BTreeMap<PairKey, Verdict> {
    let mut votes: BTreeMap<PairKey, (usize, usize)> = BTreeMap::new();
    for ((key, _), verdict) in latest_per_rater(labels) {
        let tally = votes.entry(key).or_default();
        match verdict {
            Verdict::Duplicate => tally.0 += 1,
            Verdict::NotDuplicate => tally.1 += 1,
            Verdict::Unsure => {}
        }
    }
    votes
        .into_iter()
        .map(|(k, (dup, not))| {
            let v = match dup.cmp(&not) {
                std::cmp::Ordering::Greater => Verdict::Duplicate,
                std::cmp::Ordering::Less => Verdict::NotDuplicate,
                std::cmp::Ordering::Equal => Verdict::Unsure,
            };
            (k, v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn label(l: &str, r: &str, v: Verdict, rater: &str, secs: i64) -> GroundTruthLabel {
        GroundTruthLabel {
            key: PairKey::new(l, r).unwrap(),
            verdict: v,
            rater: rater.into(),
            labeled_at: Utc.timestamp_opt(1_700_000_000 + secs, 0).unwrap(),
        }
    }

    #[test]
    fn latest_timestamp_wins() {
        let labels = [
            label("a", "b", Verdict::Duplicate, "r1", 10),
            label("a", "b", Verdict::NotDuplicate, "r1", 20),
            label("a", "b", Verdict::Duplicate, "r1", 5),
        ];
        assert_eq!(resolve(&labels)[&PairKey::new("a", "b").unwrap()], Verdict::NotDuplicate);
    }

    #[test]
    fn majority_and_ties() {
        use Verdict::*;
        let labels = [
            label("a", "b", Duplicate, "r1", 0),
            label("a", "b", Duplicate, "r2", 0),
            label("a", "b", NotDuplicate, "r3", 0),
            label("c", "d", Duplicate, "r1", 0),
            label("c", "d", NotDuplicate, "r2", 0),
            label("e", "f", Unsure, "r1", 0),
            label("e", "f", NotDuplicate, "r2", 0),
        ];
        let r = resolve(&labels);
        assert_eq!(r[&PairKey::new("a", "b").unwrap()], Duplicate);
        assert_eq!(r[&PairKey::new("c", "d").unwrap()], Unsure);
        assert_eq!(r[&PairKey::new("e", "f").unwrap()], NotDuplicate);
    }

    #[test]
    fn truth_file_round_trip() {
        let labels = vec![
            label("b", "a", Verdict::Duplicate, "ann, the rater", 1),
            label("c", "d", Verdict::Unsure, "bo", 2),
        ];
        let mut first = Vec::new();
        write_truth_csv(&labels, &mut first).unwrap();
        let text = String::from_utf8(first.clone()).unwrap();
        assert!(text.contains("a,b,duplicate,\"ann, the rater\",2023-11-14T22:13:21.000000Z"));
        let back = read_truth_csv(first.as_slice()).unwrap();
        assert_eq!(back, labels);
        let mut second = Vec::new();
        write_truth_csv(&back, &mut second).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn bad_rows_are_reported() {
        let bad = "left_id,right_id,verdict,rater,labeled_at\na,b,maybe,r,2024-01-01T00:00:00Z\n";
        assert!(matches!(
            read_truth_csv(bad.as_bytes()),
            Err(Error::MalformedRecord { line: 2, .. })
        ));
        let bad = "left_id,right_id,verdict,rater,labeled_at\na,b,unsure,r,yesterday\n";
        assert!(read_truth_csv(bad.as_bytes()).is_err());
    }
}
