use std::hash::Hasher;

use fnv::FnvHasher;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tokenize::TokenSequence;
use super::EmbeddingVector;

pub const DEFAULT_DIM: usize = 256;
pub const DEFAULT_SEED: u64 = 42;

/// Salt mixed into the seed for the two-row segment table.
pub const SEGMENT_SALT: u64 = 0x5345_474d;
pub const SEGMENT_SCALE: f64 = 0.02;
pub const POSITION_SCALE: f64 = 0.05;

/// One token's embedding and its three additive parts.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenEmbedding {
    pub word: EmbeddingVector,
    pub segment: EmbeddingVector,
    pub position: EmbeddingVector,
    pub total: EmbeddingVector,
}

/// Deterministic stand-in for a learned embedding table.
///
/// * word vectors: a ChaCha8 stream seeded with `fnv1a64(token) ^ seed`,
///   drawing `dim` values uniform in `[-1, 1)`;
/// * segment vectors: two rows drawn the same way from
///   `seed ^ SEGMENT_SALT ^ row`, scaled by [`SEGMENT_SCALE`];
/// * position vectors: the usual sinusoid, `sin` on even and `cos` on odd
///   components with wavelength `10000^(2i/dim)`, scaled by
///   [`POSITION_SCALE`].
#[derive(Debug, Clone)]
pub struct TokenEmbedder {
    dim: usize,
    seed: u64,
    segments: [EmbeddingVector; 2],
}

impl Default for TokenEmbedder {
    fn default() -> Self {
        Self::new(DEFAULT_DIM, DEFAULT_SEED)
    }
}

fn uniform_stream(seed: u64, dim: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn token_hash(token: &str) -> u64 {
    let mut hasher = FnvHasher::default();
    hasher.write(token.as_bytes());
    hasher.finish()
}

impl TokenEmbedder {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim > 0 && dim % 2 == 0, "embedding dimension must be even and positive");
        let segment = |row: u64| {
            EmbeddingVector::new(
                uniform_stream(seed ^ SEGMENT_SALT ^ row, dim)
                    .into_iter()
                    .map(|v| v * SEGMENT_SCALE)
                    .collect(),
            )
        };
        Self {
            dim,
            seed,
            segments: [segment(0), segment(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn word(&self, token: &str) -> EmbeddingVector {
        EmbeddingVector::new(uniform_stream(token_hash(token) ^ self.seed, self.dim))
    }

    /// Segment row; indices past the two-row table reuse row `index % 2`.
    pub fn segment(&self, index: usize) -> EmbeddingVector {
        self.segments[index % 2].clone()
    }

    pub fn position(&self, position: usize) -> EmbeddingVector {
        let pos = position as f64;
        let values = (0..self.dim)
            .map(|k| {
                let pair = (k / 2) as f64;
                let angle = pos / 10000f64.powf(2.0 * pair / self.dim as f64);
                let v = if k % 2 == 0 { angle.sin() } else { angle.cos() };
                v * POSITION_SCALE
            })
            .collect();
        EmbeddingVector::new(values)
    }

    pub fn embed_tokens(&self, seq: &TokenSequence, segment_index: usize) -> Vec<TokenEmbedding> {
        let segment = self.segment(segment_index);
        seq.tokens
            .iter()
            .enumerate()
            .map(|(pos, token)| {
                let word = self.word(token);
                let position = self.position(pos);
                let total = EmbeddingVector::new(
                    word.values()
                        .iter()
                        .zip(segment.values())
                        .zip(position.values())
                        .map(|((w, s), p)| w + s + p)
                        .collect(),
                );
                TokenEmbedding {
                    word,
                    segment: segment.clone(),
                    position,
                    total,
                }
            })
            .collect()
    }
}
