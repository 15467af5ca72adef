//! Best-first application classification.
//!
//! The utterance is encoded once and compared against application nodes
//! only; parameter leaves are reached solely through the winning application.
//! [`classify_exhaustive`] is the flat scan over every node, kept as a
//! reference.

use serde::Serialize;
use thiserror::Error;

use crate::text::{cosine_similarity, normalize, EmbeddingVector, EncodeError, SimilarityError};
use crate::tree::AnnotationTree;

pub const DEFAULT_CONFIDENCE_THRESHOLD: f64 = 0.15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("utterance is empty")]
    EmptyUtterance,
    #[error("utterance has no content the encoder can represent")]
    ZeroVector,
    #[error(transparent)]
    Encode(#[from] EncodeError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationResult {
    pub app_id: String,
    pub score: f64,
    /// Every application, best first; equal scores keep manifest order.
    pub ranking: Vec<(String, f64)>,
    pub confident: bool,
    /// Similarity computations performed.
    pub comparisons: usize,
}

fn encode_utterance(tree: &AnnotationTree, utterance: &str) -> Result<EmbeddingVector, ClassifyError> {
    if normalize(utterance).is_empty() {
        return Err(ClassifyError::EmptyUtterance);
    }
    let vector = tree.encoder().encode(utterance)?;
    if vector.is_zero() {
        return Err(ClassifyError::ZeroVector);
    }
    Ok(vector)
}

fn similarity(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64, ClassifyError> {
    match cosine_similarity(a, b) {
        Ok(s) => Ok(s),
        // A node whose text has no content scores as orthogonal.
        Err(SimilarityError::ZeroVector) if !a.is_zero() => Ok(0.0),
        Err(_) => Err(ClassifyError::ZeroVector),
    }
}

fn finish(mut ranking: Vec<(String, f64)>, comparisons: usize, threshold: f64) -> ClassificationResult {
    // Stable sort keeps manifest order among equal scores.
    ranking.sort_by(|a, b| b.1.total_cmp(&a.1));
    let (app_id, score) = ranking[0].clone();
    ClassificationResult {
        app_id,
        score,
        confident: score >= threshold,
        ranking,
        comparisons,
    }
}

/// Ranks applications for an already-encoded utterance.
pub fn rank_applications(
    tree: &AnnotationTree,
    utterance: &EmbeddingVector,
    threshold: f64,
) -> Result<ClassificationResult, ClassifyError> {
    let mut ranking = Vec::with_capacity(tree.applications().len());
    for app in tree.applications() {
        let node = tree.embedding(&app.id).expect("every node is embedded");
        ranking.push((app.id.clone(), similarity(utterance, node)?));
    }
    let comparisons = ranking.len();
    Ok(finish(ranking, comparisons, threshold))
}

pub fn classify_with_threshold(
    tree: &AnnotationTree,
    utterance: &str,
    threshold: f64,
) -> Result<ClassificationResult, ClassifyError> {
    let vector = encode_utterance(tree, utterance)?;
    rank_applications(tree, &vector, threshold)
}

pub fn classify(tree: &AnnotationTree, utterance: &str) -> Result<ClassificationResult, ClassifyError> {
    classify_with_threshold(tree, utterance, DEFAULT_CONFIDENCE_THRESHOLD)
}

/// Compares against every node; an application scores as its best node.
pub fn classify_exhaustive(
    tree: &AnnotationTree,
    utterance: &str,
) -> Result<ClassificationResult, ClassifyError> {
    let vector = encode_utterance(tree, utterance)?;
    let mut comparisons = 0;
    let mut ranking = Vec::with_capacity(tree.applications().len());
    for app in tree.applications() {
        let mut best = f64::NEG_INFINITY;
        for node in std::iter::once(app).chain(app.children.iter()) {
            let embedding = tree.embedding(&node.id).expect("every node is embedded");
            comparisons += 1;
            let s = similarity(&vector, embedding)?;
            if s > best {
                best = s;
            }
        }
        ranking.push((app.id.clone(), best));
    }
    Ok(finish(ranking, comparisons, DEFAULT_CONFIDENCE_THRESHOLD))
}
