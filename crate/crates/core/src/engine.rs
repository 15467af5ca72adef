//! The end-to-end pipeline: classify, extract, dispatch.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::apps::{calc, AppLibrary, OfflineWeather, ValueRule, WeatherSource};
use crate::bundled;
use crate::classifier::{
    classify_with_threshold, ClassificationResult, ClassifyError, DEFAULT_CONFIDENCE_THRESHOLD,
};
use crate::extract::{ExtractError, Extractor, Lexicon, LexiconError, RemoteExtractor, StatePatch};
use crate::store::{ActionOp, AppSchema, SessionState, Store, StoreError};
use crate::text::{BuiltinEncoder, EncodeError, RemoteEncoder, SentenceEncoder, VocabError, Vocabulary};
use crate::tree::{AnnotationTree, ManifestError};

#[derive(Debug, Error)]
pub enum BuildError {
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error(transparent)]
    Vocab(#[from] VocabError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Encoder(#[from] EncodeError),
    #[error("weather table: {0}")]
    Weather(#[from] crate::apps::WeatherError),
    #[error("action log {path}: {source}")]
    Log {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("utterance is empty")]
    EmptyUtterance,
    #[error("utterance has no content the encoder can represent")]
    NoContent,
    #[error("could not extract any parameter for {}", .classification.app)]
    ClarificationNeeded { classification: ClassificationSummary },
    #[error("backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error(transparent)]
    Store(#[from] StoreError),
}

impl From<ClassifyError> for EngineError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::EmptyUtterance => EngineError::EmptyUtterance,
            ClassifyError::ZeroVector => EngineError::NoContent,
            ClassifyError::Encode(e) => EngineError::BackendUnavailable(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationSummary {
    pub app: String,
    pub score: f64,
    pub confident: bool,
}

impl From<&ClassificationResult> for ClassificationSummary {
    fn from(r: &ClassificationResult) -> Self {
        Self {
            app: r.app_id.clone(),
            score: r.score,
            confident: r.confident,
        }
    }
}

/// Result of one utterance that was dispatched to the store.
#[derive(Debug, Clone, Serialize)]
pub struct ParseOutcome {
    pub patch: StatePatch,
    pub classification: ClassificationSummary,
    pub state: SessionState,
    /// Display values computed from the patch: calculator results, weather
    /// summaries.
    pub derived: IndexMap<String, String>,
}

pub struct Engine {
    tree: Arc<AnnotationTree>,
    extractor: Extractor,
    store: Store,
    library: AppLibrary,
    weather: Box<dyn WeatherSource>,
    threshold: f64,
}

impl Engine {
    pub fn builder() -> EngineBuilder {
        EngineBuilder::default()
    }

    /// Bundled manifest, vocabulary and lexicon with built-in backends.
    pub fn bundled() -> Self {
        EngineBuilder::default()
            .build()
            .expect("bundled data is valid")
    }

    pub fn tree(&self) -> &Arc<AnnotationTree> {
        &self.tree
    }

    pub fn extractor(&self) -> &Extractor {
        &self.extractor
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn library(&self) -> &AppLibrary {
        &self.library
    }

    pub fn classify(&self, utterance: &str) -> Result<ClassificationResult, EngineError> {
        Ok(classify_with_threshold(&self.tree, utterance, self.threshold)?)
    }

    /// Classification and patch without touching the store.
    pub fn interpret(&self, utterance: &str) -> Result<(ClassificationResult, StatePatch), EngineError> {
        let result = self.classify(utterance)?;
        match self.extractor.extract_all(&self.tree, &result, utterance) {
            Ok(patch) => Ok((result, patch)),
            Err(ExtractError::NoParametersExtracted { .. }) => Err(EngineError::ClarificationNeeded {
                classification: ClassificationSummary::from(&result),
            }),
            Err(e) => Err(EngineError::BackendUnavailable(e.to_string())),
        }
    }

    /// Full pipeline; dispatches exactly once on success and never otherwise.
    pub fn parse(&self, session_id: &str, utterance: &str) -> Result<ParseOutcome, EngineError> {
        let (result, patch) = self.interpret(utterance)?;
        let derived = self.derive(&patch);
        let state = self.store.dispatch_next(
            session_id,
            ActionOp::ApplyPatch {
                patch: patch.clone(),
            },
        )?;
        Ok(ParseOutcome {
            classification: ClassificationSummary::from(&result),
            patch,
            state: (*state).clone(),
            derived,
        })
    }

    pub fn derive(&self, patch: &StatePatch) -> IndexMap<String, String> {
        let mut out = IndexMap::new();
        let Some(app) = self.library.app(&patch.current_app) else {
            return out;
        };
        for (name, value) in &patch.config {
            let Some(spec) = app.parameters.get(name) else { continue };
            match spec.rule {
                ValueRule::Expression => {
                    let shown = match calc::eval_expression(value) {
                        Ok(v) => v,
                        Err(e) => e.to_string(),
                    };
                    out.insert(name.clone(), shown);
                }
                _ if patch.current_app == "Weather" => {
                    if let Ok(Some(r)) = self.weather.lookup(value) {
                        out.insert(name.clone(), format!("{}, {:.1} °C", r.summary, r.temp_c));
                    }
                }
                _ => {}
            }
        }
        out
    }
}

#[derive(Default)]
pub struct EngineBuilder {
    manifest: Option<Vec<u8>>,
    vocab: Option<String>,
    lexicon: Option<String>,
    weather: Option<String>,
    remote_encoder: Option<String>,
    remote_extractor: Option<String>,
    remote_timeout: Option<Duration>,
    log: Option<PathBuf>,
    threshold: Option<f64>,
    encoder: Option<Arc<dyn SentenceEncoder>>,
}

impl EngineBuilder {
    pub fn manifest(mut self, bytes: impl Into<Vec<u8>>) -> Self {
        self.manifest = Some(bytes.into());
        self
    }

    pub fn vocab(mut self, text: impl Into<String>) -> Self {
        self.vocab = Some(text.into());
        self
    }

    pub fn lexicon(mut self, json: impl Into<String>) -> Self {
        self.lexicon = Some(json.into());
        self
    }

    pub fn weather_table(mut self, json: impl Into<String>) -> Self {
        self.weather = Some(json.into());
        self
    }

    pub fn remote_encoder(mut self, url: impl Into<String>) -> Self {
        self.remote_encoder = Some(url.into());
        self
    }

    pub fn remote_extractor(mut self, url: impl Into<String>) -> Self {
        self.remote_extractor = Some(url.into());
        self
    }

    pub fn remote_timeout(mut self, timeout: Duration) -> Self {
        self.remote_timeout = Some(timeout);
        self
    }

    pub fn action_log(mut self, path: impl Into<PathBuf>) -> Self {
        self.log = Some(path.into());
        self
    }

    pub fn confidence_threshold(mut self, threshold: f64) -> Self {
        self.threshold = Some(threshold);
        self
    }

    /// Overrides both the built-in and the remote encoder.
    pub fn encoder(mut self, encoder: Arc<dyn SentenceEncoder>) -> Self {
        self.encoder = Some(encoder);
        self
    }

    pub fn build(self) -> Result<Engine, BuildError> {
        let timeout = self
            .remote_timeout
            .unwrap_or(crate::extract::DEFAULT_TIMEOUT);
        let encoder: Arc<dyn SentenceEncoder> = match (self.encoder, &self.remote_encoder) {
            (Some(e), _) => e,
            (None, Some(url)) => Arc::new(RemoteEncoder::connect(url, timeout)?),
            (None, None) => {
                let vocab = match &self.vocab {
                    Some(text) => Vocabulary::from_text(text)?,
                    None => bundled::vocabulary(),
                };
                Arc::new(BuiltinEncoder::with_vocab(vocab))
            }
        };
        let manifest = self
            .manifest
            .unwrap_or_else(|| bundled::MANIFEST_JSON.as_bytes().to_vec());
        let tree = Arc::new(AnnotationTree::load_manifest(&manifest, encoder)?);
        let lexicon = Lexicon::from_json(self.lexicon.as_deref().unwrap_or(bundled::LEXICON_JSON))?;
        let mut extractor = Extractor::new(lexicon);
        if let Some(url) = &self.remote_extractor {
            let remote = RemoteExtractor::with_timeout(url, timeout);
            extractor = extractor
                .with_remote_span(remote.clone())
                .with_remote_arithmetic(remote);
        }
        let mut store = Store::new(AppSchema::from_tree(&tree));
        if let Some(path) = &self.log {
            store = store.with_log_file(path).map_err(|source| BuildError::Log {
                path: path.clone(),
                source,
            })?;
        }
        let weather = OfflineWeather::from_json(self.weather.as_deref().unwrap_or(bundled::WEATHER_JSON))?;
        Ok(Engine {
            tree,
            extractor,
            store,
            library: AppLibrary::bundled(),
            weather: Box::new(weather),
            threshold: self.threshold.unwrap_or(DEFAULT_CONFIDENCE_THRESHOLD),
        })
    }
}
