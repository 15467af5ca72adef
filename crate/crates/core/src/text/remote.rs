use std::time::Duration;

use serde::{Deserialize, Serialize};
use ureq::Agent;

use super::{EmbeddingVector, EncodeError, SentenceEncoder};

#[derive(Serialize)]
struct EncodeRequest<'a> {
    texts: &'a [String],
}

#[derive(Deserialize)]
struct EncodeResponse {
    vectors: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct InfoResponse {
    dim: usize,
}

/// Client for an external sentence-encoder service.
///
/// `GET /info` returns `{"dim": n}` and is called once on connect;
/// `POST /encode` takes `{"texts": [..]}` and returns `{"vectors": [[..]]}`.
/// Returned vectors are L2-normalized locally.
#[derive(Debug, Clone)]
pub struct RemoteEncoder {
    base_url: String,
    agent: Agent,
    dim: usize,
}

fn unavailable(e: impl std::fmt::Display) -> EncodeError {
    EncodeError::RemoteEncoderUnavailable(e.to_string())
}

impl RemoteEncoder {
    pub fn connect(base_url: &str, timeout: Duration) -> Result<Self, EncodeError> {
        let agent: Agent = Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        let base_url = base_url.trim_end_matches('/').to_string();
        let info: InfoResponse = agent
            .get(format!("{base_url}/info"))
            .call()
            .map_err(unavailable)?
            .body_mut()
            .read_json()
            .map_err(unavailable)?;
        if info.dim == 0 {
            return Err(unavailable("remote encoder declared dimension 0"));
        }
        Ok(Self {
            base_url,
            agent,
            dim: info.dim,
        })
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }
}

impl SentenceEncoder for RemoteEncoder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn encode(&self, text: &str) -> Result<EmbeddingVector, EncodeError> {
        let mut out = self.encode_batch(&[text.to_string()])?;
        Ok(out.remove(0))
    }

    fn encode_batch(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, EncodeError> {
        if texts.is_empty() {
            return Ok(Vec::new());
        }
        let response: EncodeResponse = self
            .agent
            .post(format!("{}/encode", self.base_url))
            .send_json(EncodeRequest { texts })
            .map_err(unavailable)?
            .body_mut()
            .read_json()
            .map_err(unavailable)?;
        if response.vectors.len() != texts.len() {
            return Err(unavailable(format!(
                "asked for {} vectors, got {}",
                texts.len(),
                response.vectors.len()
            )));
        }
        response
            .vectors
            .into_iter()
            .map(|v| {
                if v.len() != self.dim {
                    return Err(EncodeError::DimensionMismatch {
                        expected: self.dim,
                        got: v.len(),
                    });
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(unavailable("remote encoder returned a non-finite value"));
                }
                Ok(EmbeddingVector::new(v).normalized())
            })
            .collect()
    }
}
