use std::collections::HashMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use ureq::Agent;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeatherRecord {
    pub city: String,
    pub summary: String,
    pub temp_c: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeatherError {
    #[error("malformed weather table: {0}")]
    MalformedTable(String),
    #[error("weather service unavailable: {0}")]
    Unavailable(String),
    #[error("weather service sent a malformed response: {0}")]
    MalformedResponse(String),
}

pub trait WeatherSource: Send + Sync {
    fn lookup(&self, city: &str) -> Result<Option<WeatherRecord>, WeatherError>;
}

fn key(city: &str) -> String {
    city.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// Canned records keyed by city string. Lookups ignore case and extra
/// whitespace, and fall back to the part before the first comma
/// (`"Venice, Italy"` finds `"Venice"`).
#[derive(Debug, Clone, Default)]
pub struct OfflineWeather {
    records: HashMap<String, WeatherRecord>,
}

impl OfflineWeather {
    pub fn from_json(text: &str) -> Result<Self, WeatherError> {
        let raw: HashMap<String, WeatherRecord> =
            serde_json::from_str(text).map_err(|e| WeatherError::MalformedTable(e.to_string()))?;
        Ok(Self {
            records: raw.into_iter().map(|(k, v)| (key(&k), v)).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

impl WeatherSource for OfflineWeather {
    fn lookup(&self, city: &str) -> Result<Option<WeatherRecord>, WeatherError> {
        let full = key(city);
        if let Some(r) = self.records.get(&full) {
            return Ok(Some(r.clone()));
        }
        let head = full.split(',').next().unwrap_or_default().trim();
        Ok(self.records.get(head).cloned())
    }
}

/// `GET /weather?city=…` → `{"city","summary","temp_c"}`; 404 means unknown.
#[derive(Debug, Clone)]
pub struct WeatherClient {
    base_url: String,
    agent: Agent,
}

impl WeatherClient {
    pub fn new(base_url: &str, timeout: Duration) -> Self {
        let agent: Agent = Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Self {
            base_url: base_url.trim_end_matches('/').to_string(),
            agent,
        }
    }
}

impl WeatherSource for WeatherClient {
    fn lookup(&self, city: &str) -> Result<Option<WeatherRecord>, WeatherError> {
        let mut response = self
            .agent
            .get(format!("{}/weather", self.base_url))
            .query("city", city)
            .call()
            .map_err(|e| WeatherError::Unavailable(e.to_string()))?;
        match response.status().as_u16() {
            404 => return Ok(None),
            200..=299 => {}
            code => return Err(WeatherError::Unavailable(format!("HTTP {code}"))),
        }
        let body = response
            .body_mut()
            .read_to_string()
            .map_err(|e| WeatherError::Unavailable(e.to_string()))?;
        serde_json::from_str(&body)
            .map(Some)
            .map_err(|e| WeatherError::MalformedResponse(e.to_string()))
    }
}
