//! Precomputed sentence embeddings and the `DFV1` vector file format.
//!
//! Layout, all integers little-endian `u32`:
//!
//! ```text
//! b"DFV1" | dimension | count | name_len | model name (UTF-8)
//! count x ( id_len | id (UTF-8) | dimension x f32 LE )
//! ```
//!
//! Entries are written sorted by id bytes. The whole file is held in memory;
//! very large corpora would need a memory-mapped reader.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{io_at, Error, Result};
use crate::num::{dot, squared_norm, Real};

pub const MAGIC: &[u8; 4] = b"DFV1";

/// Id-keyed vectors of one fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore<T: Real = f32> {
    dimension: usize,
    model_name: String,
    vectors: BTreeMap<String, Vec<T>>,
}

impl<T: Real> EmbeddingStore<T> {
    pub fn new(dimension: usize, model_name: impl Into<String>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Self {
            dimension,
            model_name: model_name.into(),
            vectors: BTreeMap::new(),
        })
    }

    /// Adds a vector after checking its length, finiteness and that it is non-zero.
    pub fn insert(&mut self, id: impl Into<String>, vector: Vec<T>) -> Result<()> {
        let id = id.into();
        if vector.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                id,
                expected: self.dimension,
                found: vector.len(),
            });
        }
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteComponent(id));
        }
        if vector.iter().all(|x| x.is_zero()) {
            return Err(Error::ZeroEmbedding(id));
        }
        if self.vectors.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        self.vectors.insert(id, vector);
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn model_name(&self) -> &str {
        &self.model_name
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&[T]> {
        self.vectors.get(id).map(Vec::as_slice)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.vectors.contains_key(id)
    }

    /// Ids in canonical (byte) order.
    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.vectors.keys().map(String::as_str)
    }

    /// Cosine of the two stored vectors, clamped to `[-1, 1]`.
    pub fn similarity(&self, id1: &str, id2: &str) -> Result<T> {
        let a = self
            .get(id1)
            .ok_or_else(|| Error::MissingEmbedding(id1.to_owned()))?;
        let b = self
            .get(id2)
            .ok_or_else(|| Error::MissingEmbedding(id2.to_owned()))?;
        // Stored vectors are validated non-zero.
        let denom = (squared_norm(a) * squared_norm(b)).sqrt();
        Ok((dot(a, b) / denom).clamp_to(-T::one(), T::one()))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cur = Cursor { bytes, pos: 0 };
        if cur.take(4, "magic")? != MAGIC {
            return Err(Error::BadMagic);
        }
        let dimension = cur.u32("dimension")? as usize;
        let count = cur.u32("count")? as usize;
        let name_len = cur.u32("model name length")? as usize;
        let model_name = cur.utf8(name_len, "model name")?;
        let mut store = Self::new(dimension, model_name)?;
        for _ in 0..count {
            let id_len = cur.u32("id length")? as usize;
            let id = cur.utf8(id_len, "id")?;
            let raw = cur.take(dimension * 4, "vector components")?;
            let vector = raw
                .chunks_exact(4)
                .map(|c| {
                    let x = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
                    T::from_f32(x).expect("f32 widening")
                })
                .collect();
            store.insert(id, vector)?;
        }
        if cur.pos != bytes.len() {
            return Err(Error::TrailingBytes(bytes.len() - cur.pos));
        }
        Ok(store)
    }

    /// Serializes with entries in id order; components are narrowed to `f32`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + self.len() * (8 + 4 * self.dimension));
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&len_u32(self.dimension).to_le_bytes())?;
        w.write_all(&len_u32(self.vectors.len()).to_le_bytes())?;
        w.write_all(&len_u32(self.model_name.len()).to_le_bytes())?;
        w.write_all(self.model_name.as_bytes())?;
        for (id, v) in &self.vectors {
            w.write_all(&len_u32(id.len()).to_le_bytes())?;
            w.write_all(id.as_bytes())?;
            for x in v {
                let x = x.to_f32().expect("f32 narrowing");
                w.write_all(&x.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes()).map_err(io_at(path))
    }
}

fn len_u32(n: usize) -> u32 {
    u32::try_from(n).expect("length exceeds u32 range of the DFV1 format")
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or(Error::TruncatedFile(what))?;
        let slice = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn u32(&mut self, what: &'static str) -> Result<u32> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn utf8(&mut self, n: usize, what: &'static str) -> Result<String> {
        let b = self.take(n, what)?;
        String::from_utf8(b.to_vec()).map_err(|_| Error::InvalidUtf8(what))
    }
}

/// Reads and validates a `DFV1` file.
pub fn load_embeddings(path: &Path) -> Result<EmbeddingStore<f32>> {
    let bytes = fs::read(path).map_err(io_at(path))?;
    EmbeddingStore::from_bytes(&bytes)
}

/// Cosine similarity between the stored vectors of two ids.
pub fn embed_similarity<T: Real>(store: &EmbeddingStore<T>, id1: &str, id2: &str) -> Result<T> {
    store.similarity(id1, id2)
}
