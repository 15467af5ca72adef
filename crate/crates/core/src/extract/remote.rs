use std::time::Duration;

use serde::{Deserialize, Serialize};
use ureq::Agent;

use super::{Backend, ExtractError, ExtractionAnswer, ExtractionRequest};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(5);
pub const DEFAULT_REMOTE_CONFIDENCE: f64 = 0.5;

#[derive(Serialize)]
struct WireRequest<'a> {
    prompt: &'a str,
    text: &'a str,
}

#[derive(Deserialize)]
struct WireResponse {
    answer: Option<String>,
    #[serde(default)]
    confidence: Option<f64>,
}

/// Client for a model service speaking
/// `POST /extract {"prompt","text"} -> {"answer": str|null, "confidence": float}`.
#[derive(Debug, Clone)]
pub struct RemoteExtractor {
    base_url: String,
    agent: Agent,
}

impl RemoteExtractor {
    pub fn new(base_url: &str) -> Self {
        Self::with_timeout(base_url, DEFAULT_TIMEOUT)
    }

    pub fn with_timeout(base_url: &str, timeout: Duration) -> Self {
        let agent: Agent = Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        Self {
            base_url: base_url.trim_end_matches('/').to_string(),
            agent,
        }
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }

    pub fn extract(&self, req: &ExtractionRequest<'_>) -> Result<ExtractionAnswer, ExtractError> {
        let body = self
            .agent
            .post(format!("{}/extract", self.base_url))
            .send_json(WireRequest {
                prompt: req.prompt,
                text: req.utterance,
            })
            .map_err(|e| ExtractError::RemoteBackendUnavailable(e.to_string()))?
            .body_mut()
            .read_to_string()
            .map_err(|e| ExtractError::RemoteBackendUnavailable(e.to_string()))?;
        let wire: WireResponse = serde_json::from_str(&body)
            .map_err(|e| ExtractError::RemoteBackendMalformedResponse(e.to_string()))?;
        let confidence = wire.confidence.unwrap_or(DEFAULT_REMOTE_CONFIDENCE);
        if !confidence.is_finite() {
            return Err(ExtractError::RemoteBackendMalformedResponse(
                "non-finite confidence".into(),
            ));
        }
        Ok(ExtractionAnswer::new(
            wire.answer.filter(|a| !a.is_empty()),
            confidence.clamp(0.0, 1.0),
            Backend::RemoteModel,
        ))
    }
}
