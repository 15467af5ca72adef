//! Data files shipped with the crate.

use std::sync::Arc;

use crate::extract::{Extractor, Lexicon};
use crate::text::{BuiltinEncoder, Vocabulary};
use crate::tree::AnnotationTree;

pub const MANIFEST_JSON: &str = include_str!("../data/manifest.json");
pub const VOCAB_TXT: &str = include_str!("../data/vocab.txt");
pub const LEXICON_JSON: &str = include_str!("../data/lexicon.json");
pub const WEATHER_JSON: &str = include_str!("../data/weather.json");
pub const REFERENCE_CORPUS: &str = include_str!("../data/corpora/reference.txt");
pub const EXTRACTION_CORPUS: &str = include_str!("../data/corpora/extraction.txt");
pub const TASKS_CORPUS: &str = include_str!("../data/corpora/tasks.txt");

pub fn vocabulary() -> Vocabulary {
    Vocabulary::from_text(VOCAB_TXT).expect("bundled vocabulary is valid")
}

pub fn encoder() -> Arc<BuiltinEncoder> {
    Arc::new(BuiltinEncoder::with_vocab(vocabulary()))
}

pub fn tree() -> AnnotationTree {
    AnnotationTree::load_manifest(MANIFEST_JSON.as_bytes(), encoder()).expect("bundled manifest is valid")
}

pub fn lexicon() -> Lexicon {
    Lexicon::from_json(LEXICON_JSON).expect("bundled lexicon is valid")
}

pub fn extractor() -> Extractor {
    Extractor::new(lexicon())
}

/// Texts the bundled vocabulary is generated from.
pub fn vocabulary_sources() -> Vec<&'static str> {
    vec![MANIFEST_JSON, REFERENCE_CORPUS, EXTRACTION_CORPUS, TASKS_CORPUS, LEXICON_JSON]
}

/// Regenerates `data/vocab.txt` content from [`vocabulary_sources`].
pub fn generate_vocabulary() -> Vocabulary {
    Vocabulary::generate(vocabulary_sources())
}
