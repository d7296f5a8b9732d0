use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use titledup_core::evaluation::{Measure, DEFAULT_THRESHOLD};
use titledup_core::{Format, Strategy};

mod commands;

/// Near-duplicate detection for title corpora.
#[derive(Debug, Parser)]
#[command(name = "titledup", version, about, long_about = None)]
struct Cli {
    /// Log filter for stderr (error, warn, info, debug, trace).
    #[arg(long, global = true, default_value = "warn")]
    log_level: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CorpusArgs {
    /// Corpus file (header `id,title,source` for CSV).
    #[arg(long)]
    corpus: PathBuf,

    /// Corpus format (csv or jsonl); inferred from the extension when omitted.
    #[arg(long)]
    format: Option<Format>,

    /// Keep only records detected as this language (or undetectable).
    #[arg(long)]
    lang: Option<String>,
}

#[derive(Debug, Args)]
struct BlockingArgs {
    /// Blocking strategy: complete, cross-source, length-diff, mode-window or short-titles.
    #[arg(long, default_value = "complete")]
    strategy: Strategy,

    /// Maximum word-count difference for length-diff.
    #[arg(long, default_value_t = 5)]
    delta: usize,

    /// Half-width of the word-count window around the mode for mode-window.
    #[arg(long, default_value_t = 2)]
    lambda: usize,

    /// Maximum word count for short-titles.
    #[arg(long, default_value_t = 3)]
    tau: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load and normalize a corpus; print summary statistics as JSON.
    Ingest {
        /// Corpus file.
        #[arg(long)]
        input: PathBuf,
        /// Input format (csv or jsonl); inferred from the extension when omitted.
        #[arg(long)]
        format: Option<Format>,
        /// Keep only records detected as this language (or undetectable).
        #[arg(long)]
        lang: Option<String>,
        /// Also write the retained records as CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Generate candidate pairs under a blocking strategy.
    Pairs {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        blocking: BlockingArgs,
        /// Output pair file.
        #[arg(long)]
        out: PathBuf,
    },

    /// Score candidate pairs with edit distance, token cosine and embeddings.
    Score {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Pair file from `pairs` or `sample`.
        #[arg(long)]
        pairs: PathBuf,
        /// DFV1 embedding file; embedding columns stay empty without it.
        #[arg(long)]
        embeddings: Option<PathBuf>,
        /// Output scores file.
        #[arg(long)]
        out: PathBuf,
    },

    /// Draw a seeded uniform sample from a pair file.
    Sample {
        /// Pair file to sample from.
        #[arg(long)]
        pairs: PathBuf,
        /// Sample size.
        #[arg(short = 'k', long = "k", default_value_t = 2000)]
        k: usize,
        /// Sampling seed.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output pair file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Compare thresholded scores with ground truth; print a JSON report.
    Evaluate {
        /// Scores file.
        #[arg(long)]
        scores: PathBuf,
        /// Ground-truth CSV.
        #[arg(long)]
        truth: PathBuf,
        /// Distance used for classification: lev, cos or embed.
        #[arg(long, default_value = "lev")]
        measure: Measure,
        /// Pairs at or below this distance are predicted duplicates.
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        /// Report Spearman instead of Pearson correlations.
        #[arg(long)]
        spearman: bool,
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Export the three-distance scatter CSV and its summary JSON.
    Scatter {
        /// Scores file with embedding columns filled.
        #[arg(long)]
        scores: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },

    /// Human annotation service.
    Annotate {
        #[command(subcommand)]
        command: AnnotateCommand,
    },

    /// Run ingest, pairs, score, sample and scatter in sequence.
    RunAll {
        /// Corpus file.
        #[arg(long)]
        input: PathBuf,
        /// Input format (csv or jsonl); inferred from the extension when omitted.
        #[arg(long)]
        format: Option<Format>,
        /// Keep only records detected as this language (or undetectable).
        #[arg(long)]
        lang: Option<String>,
        #[command(flatten)]
        blocking: BlockingArgs,
        /// DFV1 embedding file.
        #[arg(long)]
        embeddings: Option<PathBuf>,
        /// Number of pairs sampled for the scatter export.
        #[arg(short = 'k', long = "k", default_value_t = 2000)]
        k: usize,
        /// Sampling seed.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Directory receiving every stage's output.
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum AnnotateCommand {
    /// Serve pairs to raters over HTTP.
    Serve {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Pair file defining the queue.
        #[arg(long)]
        pairs: PathBuf,
        /// Scores shown to raters as context.
        #[arg(long)]
        scores: Option<PathBuf>,
        /// Ground-truth CSV receiving appended labels.
        #[arg(long)]
        truth: PathBuf,
        /// Listen port; 0 picks a free one.
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Listen address.
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Directory with the built rater UI.
        #[arg(long)]
        ui: Option<PathBuf>,
        /// Do not show distances to raters.
        #[arg(long)]
        hide_distances: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_new(&cli.log_level)
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn")),
        )
        .with_writer(std::io::stderr)
        .init();

    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
