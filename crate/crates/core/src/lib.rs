//! Near-duplicate detection for short titled records.
//!
//! The pipeline runs corpus loading and normalization ([`corpus`]),
//! candidate generation under blocking strategies ([`pairing`]), edit-distance
//! and bag-of-words scoring ([`distance`]), optional sentence-embedding
//! similarity ([`embedding`]) and evaluation against human labels
//! ([`evaluation`]).
//!
//! Vector math is generic over [`num::Real`]; the aliases below fix the
//! scalar for the common cases.

pub mod corpus;
pub mod distance;
pub mod embedding;
pub mod error;
pub mod evaluation;
pub mod formats;
pub mod num;
pub mod pairing;
pub mod synth;

pub use corpus::{load_corpus, mode_word_count, normalize_title, tokenize, Corpus, Format, TitleRecord};
pub use distance::{cosine_similarity, levenshtein, levenshtein_normalized, score_pair, PairScores};
pub use embedding::{embed_similarity, load_embeddings, EmbeddingStore};
pub use error::{Error, Result};
pub use evaluation::{GroundTruthLabel, Measure, Verdict};
pub use num::Real;
pub use pairing::{generate, CandidatePair, PairKey, PairingConfig, Strategy};

/// Store as read from and written to `DFV1` files.
pub type EmbeddingStoreF32 = EmbeddingStore<f32>;
/// Store widened to double precision for analysis.
pub type EmbeddingStoreF64 = EmbeddingStore<f64>;
