//! Natural-language UI control engine.
//!
//! An utterance is classified to one application of an annotated component
//! tree, the parameters that application needs are extracted from the text,
//! and the result is emitted as a [`StatePatch`] that a reducer-based
//! [`Store`] applies to per-session application state.
//!
//! The pipeline is:
//!
//! 1. [`text`]: WordPiece tokenization and a deterministic sentence encoder
//!    (word + segment + position embeddings, mean pooled, L2-normalized).
//! 2. [`tree`]: the manifest-backed tree of application and parameter nodes
//!    with precomputed node embeddings.
//! 3. [`classifier`]: best-first descent, comparing the utterance against
//!    application nodes only.
//! 4. [`extract`]: per-parameter backend routing and patch assembly.
//! 5. [`store`]: pure reducers, sessions and subscriptions.
//!
//! [`Engine`] wires these together; [`eval`] scores corpora against it.

pub mod apps;
pub mod bundled;
pub mod classifier;
pub mod engine;
pub mod eval;
pub mod extract;
pub mod store;
pub mod text;
pub mod tree;

pub use classifier::{classify, classify_exhaustive, ClassificationResult, ClassifyError};
pub use engine::{Engine, EngineBuilder, EngineError, ParseOutcome};
pub use extract::{Extractor, StatePatch};
pub use store::{Action, ActionOp, SessionState, Store};
pub use text::{cosine_similarity, EmbeddingVector, SentenceEncoder};
pub use tree::{AnnotationNode, AnnotationTree, NodeKind};
