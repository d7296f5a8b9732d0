//! Embedded HTTP service that hands candidate pairs to human raters one at a
//! time and appends their verdicts to a ground-truth CSV.
//!
//! Raters identify themselves by name on every request; there is no
//! authentication. Writes are serialized and synced before acknowledgment, so
//! an acknowledged label survives a crash.

mod error;
mod server;
mod session;

pub use error::{Result, ServiceError};
pub use server::{router, serve};
pub use session::{Ack, AnnotationSession, Distances, PairPayload, Progress};
