//! Parameter extraction.
//!
//! Each parameter node of the classified application is routed to a backend
//! by its extractor kind: the rule-based span matcher, the rule-based
//! arithmetic rewriter, or a remote model when one is configured for that
//! kind. Answers are assembled into a [`StatePatch`] in manifest order.

mod arithmetic;
mod lexicon;
mod patch;
mod remote;
mod span;

use serde::Serialize;
use thiserror::Error;

use crate::classifier::ClassificationResult;
use crate::tree::{AnnotationNode, AnnotationTree, ExtractorKind, NodeKind};

pub use arithmetic::extract_expression;
pub use lexicon::{Lexicon, LexiconError, PatternClass, OPERATOR_CLASSES};
pub use patch::StatePatch;
pub use remote::{RemoteExtractor, DEFAULT_REMOTE_CONFIDENCE, DEFAULT_TIMEOUT};
pub use span::{find_span, SpanMatch, CUE_CONFIDENCE, EXACT_CONFIDENCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Backend {
    RuleSpan,
    RuleArithmetic,
    RemoteModel,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtractError {
    #[error("no parameter could be extracted for {app}")]
    NoParametersExtracted { app: String },
    #[error("remote extraction backend unavailable: {0}")]
    RemoteBackendUnavailable(String),
    #[error("remote extraction backend sent a malformed response: {0}")]
    RemoteBackendMalformedResponse(String),
    #[error("node {0:?} is not a parameter")]
    NotAParameter(String),
    #[error("unknown application {0:?}")]
    UnknownApp(String),
}

#[derive(Debug, Clone, Copy)]
pub struct ExtractionRequest<'a> {
    pub utterance: &'a str,
    pub node: &'a AnnotationNode,
    pub prompt: &'a str,
}

impl<'a> ExtractionRequest<'a> {
    pub fn new(utterance: &'a str, node: &'a AnnotationNode) -> Result<Self, ExtractError> {
        match (&node.kind, &node.prompt) {
            (NodeKind::Parameter, Some(prompt)) => Ok(Self {
                utterance,
                node,
                prompt,
            }),
            _ => Err(ExtractError::NotAParameter(node.id.clone())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractionAnswer {
    pub value: Option<String>,
    pub confidence: f64,
    pub backend: Backend,
}

impl ExtractionAnswer {
    /// Keeps `value` absent exactly when confidence is zero.
    pub fn new(value: Option<String>, confidence: f64, backend: Backend) -> Self {
        match value {
            Some(v) if confidence > 0.0 => Self {
                value: Some(v),
                confidence,
                backend,
            },
            _ => Self::absent(backend),
        }
    }

    pub fn absent(backend: Backend) -> Self {
        Self {
            value: None,
            confidence: 0.0,
            backend,
        }
    }
}

pub struct Extractor {
    lexicon: Lexicon,
    remote_span: Option<RemoteExtractor>,
    remote_arithmetic: Option<RemoteExtractor>,
}

impl Extractor {
    pub fn new(lexicon: Lexicon) -> Self {
        Self {
            lexicon,
            remote_span: None,
            remote_arithmetic: None,
        }
    }

    pub fn with_remote_span(mut self, remote: RemoteExtractor) -> Self {
        self.remote_span = Some(remote);
        self
    }

    pub fn with_remote_arithmetic(mut self, remote: RemoteExtractor) -> Self {
        self.remote_arithmetic = Some(remote);
        self
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    fn remote_for(&self, kind: ExtractorKind) -> Option<&RemoteExtractor> {
        match kind {
            ExtractorKind::Span => self.remote_span.as_ref(),
            ExtractorKind::Arithmetic => self.remote_arithmetic.as_ref(),
        }
    }

    pub fn route(&self, node: &AnnotationNode) -> Backend {
        let kind = node.extractor_kind.unwrap_or_default();
        if self.remote_for(kind).is_some() {
            return Backend::RemoteModel;
        }
        match kind {
            ExtractorKind::Span => Backend::RuleSpan,
            ExtractorKind::Arithmetic => Backend::RuleArithmetic,
        }
    }

    pub fn extract_span(&self, req: &ExtractionRequest<'_>) -> ExtractionAnswer {
        let Some(class) = self.lexicon.class_for_parameter(&req.node.name) else {
            return ExtractionAnswer::absent(Backend::RuleSpan);
        };
        match find_span(class, req.utterance) {
            Some(m) => ExtractionAnswer::new(
                Some(req.utterance[m.start..m.end].to_string()),
                m.confidence,
                Backend::RuleSpan,
            ),
            None => ExtractionAnswer::absent(Backend::RuleSpan),
        }
    }

    pub fn extract_arithmetic(&self, req: &ExtractionRequest<'_>) -> ExtractionAnswer {
        match extract_expression(req.utterance, &self.lexicon) {
            Some((expr, confidence)) => {
                ExtractionAnswer::new(Some(expr), confidence, Backend::RuleArithmetic)
            }
            None => ExtractionAnswer::absent(Backend::RuleArithmetic),
        }
    }

    /// Runs whichever backend [`Extractor::route`] picks.
    pub fn extract(&self, req: &ExtractionRequest<'_>) -> Result<ExtractionAnswer, ExtractError> {
        match self.route(req.node) {
            Backend::RuleSpan => Ok(self.extract_span(req)),
            Backend::RuleArithmetic => Ok(self.extract_arithmetic(req)),
            Backend::RemoteModel => {
                let kind = req.node.extractor_kind.unwrap_or_default();
                self.remote_for(kind)
                    .expect("routed to a configured remote")
                    .extract(req)
            }
        }
    }

    /// Answers for every parameter of `app`, in manifest order. Remote
    /// extractions run concurrently.
    pub fn answers(
        &self,
        app: &AnnotationNode,
        utterance: &str,
    ) -> Result<Vec<ExtractionAnswer>, ExtractError> {
        let requests = app
            .children
            .iter()
            .map(|node| ExtractionRequest::new(utterance, node))
            .collect::<Result<Vec<_>, _>>()?;
        let any_remote = requests
            .iter()
            .any(|r| self.route(r.node) == Backend::RemoteModel);
        if !any_remote || requests.len() < 2 {
            return requests.iter().map(|r| self.extract(r)).collect();
        }
        std::thread::scope(|scope| {
            let handles: Vec<_> = requests
                .iter()
                .map(|r| scope.spawn(move || self.extract(r)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("extraction thread panicked"))
                .collect()
        })
    }

    pub fn extract_all(
        &self,
        tree: &AnnotationTree,
        result: &ClassificationResult,
        utterance: &str,
    ) -> Result<StatePatch, ExtractError> {
        let app = tree
            .node(&result.app_id)
            .filter(|n| n.is_application())
            .ok_or_else(|| ExtractError::UnknownApp(result.app_id.clone()))?;
        let answers = self.answers(app, utterance)?;
        let mut patch = StatePatch::new(app.name.clone());
        for (node, answer) in app.children.iter().zip(answers) {
            if let Some(value) = answer.value {
                patch.config.insert(node.name.clone(), value);
            }
        }
        if patch.config.is_empty() {
            return Err(ExtractError::NoParametersExtracted {
                app: app.name.clone(),
            });
        }
        Ok(patch)
    }
}
