//! Tokenization and sentence embedding.
//!
//! The built-in encoder runs WordPiece tokenization, sums word, segment and
//! position embeddings per token, mean-pools the non-special tokens and
//! L2-normalizes the result. A remote sentence encoder can replace it through
//! [`RemoteEncoder`].

mod embed;
mod remote;
mod tokenize;
mod vocab;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use embed::{
    TokenEmbedder, TokenEmbedding, DEFAULT_DIM, DEFAULT_SEED, POSITION_SCALE, SEGMENT_SALT,
    SEGMENT_SCALE,
};
pub use remote::RemoteEncoder;
pub use tokenize::{normalize, pre_tokenize, tokenize, TokenSequence};
pub use vocab::{VocabError, Vocabulary, CLS, CONTINUATION, SEP, UNK};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self(self.0.iter().map(|v| v * k).collect())
    }

    /// Unit-length copy. The zero vector is returned unchanged.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        Self(self.0.iter().map(|v| v / n).collect())
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum SimilarityError {
    #[error("cosine similarity is undefined for the zero vector")]
    ZeroVector,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

/// `a·b / (‖a‖‖b‖)`.
pub fn cosine_similarity(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64, SimilarityError> {
    if a.dim() != b.dim() {
        return Err(SimilarityError::DimensionMismatch(a.dim(), b.dim()));
    }
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(SimilarityError::ZeroVector);
    }
    let dot: f64 = a.0.iter().zip(&b.0).map(|(x, y)| x * y).sum();
    Ok(dot / (na * nb))
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EncodeError {
    #[error("remote encoder unavailable: {0}")]
    RemoteEncoderUnavailable(String),
    #[error("remote encoder returned a {got}-dimensional vector, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Maps text to a unit vector (or the zero vector for text without content).
pub trait SentenceEncoder: Send + Sync {
    fn dim(&self) -> usize;

    fn encode(&self, text: &str) -> Result<EmbeddingVector, EncodeError>;

    fn encode_batch(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, EncodeError> {
        texts.iter().map(|t| self.encode(t)).collect()
    }
}

impl<T: SentenceEncoder + ?Sized> SentenceEncoder for Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn encode(&self, text: &str) -> Result<EmbeddingVector, EncodeError> {
        (**self).encode(text)
    }

    fn encode_batch(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, EncodeError> {
        (**self).encode_batch(texts)
    }
}

#[derive(Debug, Clone)]
pub struct BuiltinEncoder {
    vocab: Arc<Vocabulary>,
    embedder: TokenEmbedder,
}

impl BuiltinEncoder {
    pub fn new(vocab: Arc<Vocabulary>, embedder: TokenEmbedder) -> Self {
        Self { vocab, embedder }
    }

    pub fn with_vocab(vocab: Vocabulary) -> Self {
        Self::new(Arc::new(vocab), TokenEmbedder::default())
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn embedder(&self) -> &TokenEmbedder {
        &self.embedder
    }

    pub fn tokenize(&self, text: &str) -> TokenSequence {
        tokenize(text, &self.vocab)
    }
}

impl SentenceEncoder for BuiltinEncoder {
    fn dim(&self) -> usize {
        self.embedder.dim()
    }

    fn encode(&self, text: &str) -> Result<EmbeddingVector, EncodeError> {
        let seq = self.tokenize(text);
        let content = seq.content_len();
        if content == 0 {
            return Ok(EmbeddingVector::zeros(self.dim()));
        }
        let mut sum = vec![0.0; self.dim()];
        for (token, id) in self
            .embedder
            .embed_tokens(&seq, 0)
            .into_iter()
            .zip(&seq.ids)
        {
            if self.vocab.is_special(*id) {
                continue;
            }
            for (acc, v) in sum.iter_mut().zip(token.total.values()) {
                *acc += v;
            }
        }
        let mean = EmbeddingVector::new(sum.into_iter().map(|v| v / content as f64).collect());
        Ok(mean.normalized())
    }
}
