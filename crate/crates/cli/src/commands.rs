use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde_json::json;
use titledup_annotate::AnnotationSession;
use titledup_core::corpus::{load_corpus, mode_word_count, write_corpus_csv, Corpus, Format};
use titledup_core::distance::{read_scores_csv, score_pair, write_scores_csv, PairScores};
use titledup_core::embedding::{load_embeddings, EmbeddingStore};
use titledup_core::evaluation::{
    evaluate, export_scatter, read_truth_csv, sample_pairs, CorrelationMethod,
};
use titledup_core::pairing::{generate, read_pairs_csv, write_pairs_csv, CandidatePair, PairingConfig};

use crate::{AnnotateCommand, BlockingArgs, Command, CorpusArgs};

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Ingest { input, format, lang, out } => ingest(&input, format, lang.as_deref(), out.as_deref()),
        Command::Pairs { corpus, blocking, out } => {
            let c = open_corpus(&corpus)?;
            pairs(&c, &blocking, &[&corpus.corpus], &out).map(drop)
        }
        Command::Score { corpus, pairs, embeddings, out } => {
            let c = open_corpus(&corpus)?;
            let store = embeddings.as_deref().map(open_embeddings).transpose()?;
            let candidates = open_pairs(&pairs)?;
            guard_output(&out, &[&corpus.corpus, &pairs])?;
            score(&c, &candidates, store.as_ref(), &out).map(drop)
        }
        Command::Sample { pairs, k, seed, out } => sample(&pairs, k, seed, out.as_deref()),
        Command::Evaluate { scores, truth, measure, threshold, spearman, out } => {
            let rows = open_scores(&scores)?;
            let labels = read_truth_csv(open(&truth)?)
                .with_context(|| format!("reading ground truth {}", truth.display()))?;
            let method = if spearman { CorrelationMethod::Spearman } else { CorrelationMethod::Pearson };
            let report = evaluate(&rows, &labels, measure, threshold, method)
                .with_context(|| format!("evaluating {} against {}", scores.display(), truth.display()))?;
            let text = serde_json::to_string_pretty(&report)? + "\n";
            if let Some(out) = out {
                guard_output(&out, &[&scores, &truth])?;
                fs::write(&out, &text).with_context(|| format!("writing {}", out.display()))?;
            }
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
        Command::Scatter { scores, out } => {
            let rows = open_scores(&scores)?;
            scatter(&rows, &scores, &out)
        }
        Command::Annotate { command } => match command {
            AnnotateCommand::Serve { corpus, pairs, scores, truth, port, host, ui, hide_distances } => {
                let c = open_corpus(&corpus)?;
                let queue = open_pairs(&pairs)?.into_iter().map(|p| p.key());
                let scores = scores.as_deref().map(open_scores).transpose()?;
                guard_output(&truth, &[&corpus.corpus, &pairs])?;
                let session = AnnotationSession::open(c, queue, scores, &truth, !hide_distances)
                    .with_context(|| format!("opening annotation session on {}", truth.display()))?;
                let runtime = tokio::runtime::Runtime::new()?;
                runtime
                    .block_on(titledup_annotate::serve(Arc::new(session), SocketAddr::new(host, port), ui))
                    .context("annotation server failed")
            }
        },
        Command::RunAll { input, format, lang, blocking, embeddings, k, seed, out_dir } => {
            run_all(&input, format, lang.as_deref(), &blocking, embeddings.as_deref(), k, seed, &out_dir)
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("cannot open {}", path.display()))?,
    ))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
    ))
}

/// Refuses to write over an input file.
fn guard_output(out: &Path, inputs: &[&Path]) -> Result<()> {
    let canon = |p: &Path| fs::canonicalize(p).ok();
    if let Some(o) = canon(out) {
        if inputs.iter().any(|i| canon(i).as_ref() == Some(&o)) {
            bail!("output {} would overwrite an input file", out.display());
        }
    }
    Ok(())
}

fn load(path: &Path, format: Option<Format>, lang: Option<&str>) -> Result<Corpus> {
    let format = format.unwrap_or_else(|| Format::from_path(path));
    load_corpus(path, format, lang).with_context(|| format!("reading corpus {}", path.display()))
}

fn open_corpus(args: &CorpusArgs) -> Result<Corpus> {
    load(&args.corpus, args.format, args.lang.as_deref())
}

fn open_pairs(path: &Path) -> Result<Vec<CandidatePair>> {
    read_pairs_csv(open(path)?).with_context(|| format!("reading pairs {}", path.display()))
}

fn open_scores(path: &Path) -> Result<Vec<PairScores>> {
    read_scores_csv(open(path)?).with_context(|| format!("reading scores {}", path.display()))
}

fn open_embeddings(path: &Path) -> Result<EmbeddingStore<f32>> {
    load_embeddings(path).with_context(|| format!("reading embeddings {}", path.display()))
}

fn ingest(input: &Path, format: Option<Format>, lang: Option<&str>, out: Option<&Path>) -> Result<()> {
    let corpus = load(input, format, lang)?;
    if let Some(out) = out {
        guard_output(out, &[input])?;
        let mut w = create(out)?;
        write_corpus_csv(&corpus, &mut w)?;
        w.flush()?;
    }
    let summary = json!({
        "records": corpus.len(),
        "eligible": corpus.eligible().count(),
        "sources": corpus.source_set(),
        "mode_word_count": mode_word_count(&corpus).ok(),
        "word_count_histogram": corpus.word_count_histogram(),
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn pairs(corpus: &Corpus, blocking: &BlockingArgs, inputs: &[&Path], out: &Path) -> Result<usize> {
    guard_output(out, inputs)?;
    let config = PairingConfig {
        delta: blocking.delta,
        lambda: blocking.lambda,
        tau: blocking.tau,
        strategy: blocking.strategy,
    };
    let stream = generate(corpus, &config).context("generating pairs")?;
    let mut w = create(out)?;
    let n = write_pairs_csv(stream, &mut w)?;
    w.flush()?;
    tracing::info!(pairs = n, strategy = %config.strategy, "wrote {}", out.display());
    Ok(n)
}

fn score(
    corpus: &Corpus,
    candidates: &[CandidatePair],
    store: Option<&EmbeddingStore<f32>>,
    out: &Path,
) -> Result<Vec<PairScores>> {
    let mut rows = candidates
        .par_iter()
        .map(|p| {
            score_pair(&p.key(), corpus, store)
                .with_context(|| format!("scoring pair ({}, {})", p.left_id, p.right_id))
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| (&a.left_id, &a.right_id).cmp(&(&b.left_id, &b.right_id)));
    let mut w = create(out)?;
    write_scores_csv(&rows, &mut w)?;
    w.flush()?;
    Ok(rows)
}

fn sample(pairs_path: &Path, k: usize, seed: u64, out: Option<&Path>) -> Result<()> {
    if k == 0 {
        bail!("sample size -k must be at least 1");
    }
    let candidates = open_pairs(pairs_path)?;
    let mut picked = sample_pairs(candidates, k, seed);
    picked.sort();
    match out {
        Some(out) => {
            guard_output(out, &[pairs_path])?;
            let mut w = create(out)?;
            write_pairs_csv(picked, &mut w)?;
            w.flush()?;
        }
        None => {
            write_pairs_csv(picked, io::stdout().lock())?;
        }
    }
    Ok(())
}

fn scatter(rows: &[PairScores], scores_path: &Path, out: &Path) -> Result<()> {
    let (summary, _, _) = export_scatter(rows, out)
        .with_context(|| format!("exporting scatter from {}", scores_path.display()))?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_all(
    input: &Path,
    format: Option<Format>,
    lang: Option<&str>,
    blocking: &BlockingArgs,
    embeddings: Option<&Path>,
    k: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<()> {
    if k == 0 {
        bail!("sample size -k must be at least 1");
    }
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let at = |name: &str| -> PathBuf { out_dir.join(name) };

    let corpus = load(input, format, lang)?;
    let corpus_out = at("corpus.csv");
    guard_output(&corpus_out, &[input])?;
    let mut w = create(&corpus_out)?;
    write_corpus_csv(&corpus, &mut w)?;
    w.flush()?;

    let pairs_out = at("pairs.csv");
    pairs(&corpus, blocking, &[input], &pairs_out)?;
    let candidates = open_pairs(&pairs_out)?;

    let store = embeddings.map(open_embeddings).transpose()?;
    let scores = score(&corpus, &candidates, store.as_ref(), &at("scores.csv"))?;

    let mut picked = sample_pairs(candidates, k, seed);
    picked.sort();
    let keys: std::collections::HashSet<_> = picked.iter().map(|p| p.key()).collect();
    let mut w = create(&at("sample.csv"))?;
    write_pairs_csv(picked, &mut w)?;
    w.flush()?;

    let sampled: Vec<PairScores> = scores.into_iter().filter(|s| keys.contains(&s.key())).collect();
    let mut w = create(&at("sample_scores.csv"))?;
    write_scores_csv(&sampled, &mut w)?;
    w.flush()?;

    scatter(&sampled, &at("sample_scores.csv"), &at("scatter"))
}
