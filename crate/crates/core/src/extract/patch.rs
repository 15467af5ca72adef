use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

/// The engine's output: which application to show and the parameter values
/// to set on it.
///
/// [`StatePatch::to_json`] writes the canonical byte layout
/// `{"CurrentApp":"Weather","Config":{"City": "Venice, Italy"}}`;
/// the serde impls accept any JSON layout with the same two keys.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatePatch {
    #[serde(rename = "CurrentApp")]
    pub current_app: String,
    #[serde(rename = "Config")]
    pub config: IndexMap<String, String>,
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

impl StatePatch {
    pub fn new(current_app: impl Into<String>) -> Self {
        Self {
            current_app: current_app.into(),
            config: IndexMap::new(),
        }
    }

    pub fn with(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.config.insert(key.into(), value.into());
        self
    }

    pub fn to_json(&self) -> String {
        let entries: Vec<String> = self
            .config
            .iter()
            .map(|(k, v)| format!("{}: {}", quote(k), quote(v)))
            .collect();
        format!(
            "{{\"CurrentApp\":{},\"Config\":{{{}}}}}",
            quote(&self.current_app),
            entries.join(", ")
        )
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

impl std::fmt::Display for StatePatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_json())
    }
}
