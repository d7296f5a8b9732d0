//! Three-axis scatter export and its summary statistics.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::Measure;
use crate::distance::PairScores;
use crate::error::{io_at, Error, Result};
use crate::formats::sig9;

/// Distances strictly below this on all three axes count as bottom-left.
pub const BOTTOM_LEFT_CUTOFF: f64 = 0.2;

pub const SCATTER_CSV: &str = "scatter.csv";
pub const SUMMARY_JSON: &str = "summary.json";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisSummary {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterSummary {
    pub rows: usize,
    pub lev_norm: AxisSummary,
    pub cosine_dist: AxisSummary,
    pub embed_dist: AxisSummary,
    pub bottom_left_cutoff: f64,
    /// Share of rows with every distance below the cutoff; `None` with no rows.
    pub bottom_left_fraction: Option<f64>,
    pub bottom_left_count: usize,
}

/// One scatter point: `(lev_norm, cosine_dist, embed_dist)`.
fn point(s: &PairScores) -> Result<[f64; 3]> {
    let embed = s.embed_dist.ok_or(Error::MissingMeasure(Measure::EmbedDist.name()))?;
    Ok([s.lev_norm, s.cosine_dist, embed])
}

fn axis(values: impl Iterator<Item = f64> + Clone, n: usize) -> AxisSummary {
    if n == 0 {
        return AxisSummary { min: None, max: None, mean: None };
    }
    AxisSummary {
        min: values.clone().reduce(f64::min),
        max: values.clone().reduce(f64::max),
        mean: Some(values.sum::<f64>() / n as f64),
    }
}

pub fn scatter_summary(scores: &[PairScores]) -> Result<ScatterSummary> {
    let points = scores.iter().map(point).collect::<Result<Vec<_>>>()?;
    let n = points.len();
    let bottom_left_count = points
        .iter()
        .filter(|p| p.iter().all(|&d| d < BOTTOM_LEFT_CUTOFF))
        .count();
    Ok(ScatterSummary {
        rows: n,
        lev_norm: axis(points.iter().map(|p| p[0]), n),
        cosine_dist: axis(points.iter().map(|p| p[1]), n),
        embed_dist: axis(points.iter().map(|p| p[2]), n),
        bottom_left_cutoff: BOTTOM_LEFT_CUTOFF,
        bottom_left_fraction: (n > 0).then(|| bottom_left_count as f64 / n as f64),
        bottom_left_count,
    })
}

/// Writes `left_id,right_id,lev_norm,cosine_dist,embed_dist`.
pub fn write_scatter_csv<W: Write>(scores: &[PairScores], writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["left_id", "right_id", "lev_norm", "cosine_dist", "embed_dist"])?;
    for s in scores {
        let [lev, cos, emb] = point(s)?;
        wtr.write_record([
            s.left_id.clone(),
            s.right_id.clone(),
            sig9(lev),
            sig9(cos),
            sig9(emb),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Writes `scatter.csv` and `summary.json` into `dir`, creating it if needed.
///
/// Validates every row before touching the filesystem.
pub fn export_scatter(scores: &[PairScores], dir: &Path) -> Result<(ScatterSummary, PathBuf, PathBuf)> {
    let summary = scatter_summary(scores)?;
    fs::create_dir_all(dir).map_err(io_at(dir))?;
    let csv_path = dir.join(SCATTER_CSV);
    let json_path = dir.join(SUMMARY_JSON);

    let file = File::create(&csv_path).map_err(io_at(&csv_path))?;
    write_scatter_csv(scores, BufWriter::new(file))?;

    let mut json = serde_json::to_vec_pretty(&summary)?;
    json.push(b'\n');
    fs::write(&json_path, json).map_err(io_at(&json_path))?;
    Ok((summary, csv_path, json_path))
}
