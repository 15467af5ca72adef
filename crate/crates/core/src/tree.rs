//! Annotation tree: applications and their parameter nodes.
//!
//! The tree is fixed at two levels below a virtual root (application →
//! parameter), loaded from a JSON manifest, validated, and embedded once.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{cosine_similarity, EmbeddingVector, EncodeError, SentenceEncoder};

/// Id of the virtual root. Real node ids are never empty.
pub const ROOT_ID: &str = "";

pub const DEFAULT_AMBIGUITY_THRESHOLD: f64 = 0.85;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeKind {
    Application,
    Parameter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ExtractorKind {
    #[default]
    Span,
    Arithmetic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnotationNode {
    pub id: String,
    pub kind: NodeKind,
    pub name: String,
    pub description: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prompt: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extractor_kind: Option<ExtractorKind>,
    pub examples: Vec<String>,
    pub children: Vec<AnnotationNode>,
}

impl AnnotationNode {
    /// Text the node is embedded from: name, description, then examples,
    /// space-joined.
    pub fn embedding_text(&self) -> String {
        let mut parts = vec![self.name.as_str(), self.description.as_str()];
        parts.extend(self.examples.iter().map(String::as_str));
        parts.join(" ")
    }

    pub fn is_application(&self) -> bool {
        self.kind == NodeKind::Application
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub apps: Vec<ManifestApp>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestApp {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    #[serde(default)]
    pub examples: Vec<String>,
    pub parameters: Vec<ManifestParameter>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestParameter {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    #[serde(default)]
    pub prompt: Option<String>,
    #[serde(default)]
    pub extractor: ExtractorKind,
    #[serde(default)]
    pub examples: Vec<String>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ManifestError {
    #[error("malformed manifest: {0}")]
    MalformedManifest(String),
    #[error("duplicate id {id:?} at {first} and {second}")]
    DuplicateId {
        id: String,
        first: String,
        second: String,
    },
    #[error("duplicate name {name:?} among siblings at {first} and {second}")]
    DuplicateName {
        name: String,
        first: String,
        second: String,
    },
    #[error("empty description at {0}")]
    EmptyDescription(String),
    #[error("parameter without prompt at {0}")]
    ParameterWithoutPrompt(String),
    #[error(transparent)]
    Encode(#[from] EncodeError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("unknown node {0:?}")]
    UnknownNode(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmbiguousPair {
    pub first: String,
    pub second: String,
    pub similarity: f64,
}

#[derive(Debug, Clone, Copy)]
struct Position {
    app: usize,
    param: Option<usize>,
}

/// Immutable, embedded annotation tree. Cheap to share behind an `Arc`.
pub struct AnnotationTree {
    apps: Vec<AnnotationNode>,
    index: HashMap<String, Position>,
    embeddings: HashMap<String, EmbeddingVector>,
    encoder: Arc<dyn SentenceEncoder>,
    manifest: Manifest,
}

impl std::fmt::Debug for AnnotationTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnnotationTree")
            .field("apps", &self.apps)
            .finish_non_exhaustive()
    }
}

fn non_empty(value: &Option<String>) -> Option<&str> {
    value.as_deref().map(str::trim).filter(|s| !s.is_empty())
}

fn check_identifier(value: &str, what: &str, path: &str) -> Result<(), ManifestError> {
    if value.trim().is_empty() {
        return Err(ManifestError::MalformedManifest(format!("{path}: empty {what}")));
    }
    if value.contains('.') {
        return Err(ManifestError::MalformedManifest(format!(
            "{path}: {what} {value:?} must not contain '.'"
        )));
    }
    Ok(())
}

fn build_nodes(manifest: &Manifest) -> Result<Vec<AnnotationNode>, ManifestError> {
    if manifest.apps.is_empty() {
        return Err(ManifestError::MalformedManifest(
            "manifest declares no applications".into(),
        ));
    }
    let mut seen_ids: HashMap<String, String> = HashMap::new();
    let mut claim = |id: &str, path: &str| -> Result<(), ManifestError> {
        if let Some(first) = seen_ids.get(id) {
            return Err(ManifestError::DuplicateId {
                id: id.to_string(),
                first: first.clone(),
                second: path.to_string(),
            });
        }
        seen_ids.insert(id.to_string(), path.to_string());
        Ok(())
    };
    let mut app_names: HashMap<&str, String> = HashMap::new();
    let mut apps = Vec::with_capacity(manifest.apps.len());
    for (ai, app) in manifest.apps.iter().enumerate() {
        let path = format!("apps[{ai}]");
        check_identifier(&app.name, "name", &path)?;
        let app_id = app.id.clone().unwrap_or_else(|| app.name.clone());
        check_identifier(&app_id, "id", &path)?;
        if let Some(first) = app_names.insert(app.name.as_str(), path.clone()) {
            return Err(ManifestError::DuplicateName {
                name: app.name.clone(),
                first,
                second: path,
            });
        }
        let description = non_empty(&app.description)
            .ok_or_else(|| ManifestError::EmptyDescription(path.clone()))?;
        claim(&app_id, &path)?;
        if app.parameters.is_empty() {
            return Err(ManifestError::MalformedManifest(format!(
                "{path}: application {:?} has no parameters",
                app.name
            )));
        }
        let mut param_names: HashMap<&str, String> = HashMap::new();
        let mut children = Vec::with_capacity(app.parameters.len());
        for (pi, param) in app.parameters.iter().enumerate() {
            let ppath = format!("{path}.parameters[{pi}]");
            check_identifier(&param.name, "name", &ppath)?;
            let raw_id = param.id.clone().unwrap_or_else(|| param.name.clone());
            check_identifier(&raw_id, "id", &ppath)?;
            if let Some(first) = param_names.insert(param.name.as_str(), ppath.clone()) {
                return Err(ManifestError::DuplicateName {
                    name: param.name.clone(),
                    first,
                    second: ppath,
                });
            }
            let pdescription = non_empty(&param.description)
                .ok_or_else(|| ManifestError::EmptyDescription(ppath.clone()))?;
            let prompt = non_empty(&param.prompt)
                .ok_or_else(|| ManifestError::ParameterWithoutPrompt(ppath.clone()))?;
            let id = format!("{app_id}.{raw_id}");
            claim(&id, &ppath)?;
            children.push(AnnotationNode {
                id,
                kind: NodeKind::Parameter,
                name: param.name.clone(),
                description: pdescription.to_string(),
                prompt: Some(prompt.to_string()),
                extractor_kind: Some(param.extractor),
                examples: param.examples.clone(),
                children: Vec::new(),
            });
        }
        apps.push(AnnotationNode {
            id: app_id,
            kind: NodeKind::Application,
            name: app.name.clone(),
            description: description.to_string(),
            prompt: None,
            extractor_kind: None,
            examples: app.examples.clone(),
            children,
        });
    }
    Ok(apps)
}

/// Parses and validates manifest JSON without embedding anything.
pub fn parse_manifest(bytes: &[u8]) -> Result<Manifest, ManifestError> {
    let manifest: Manifest = serde_json::from_slice(bytes)
        .map_err(|e| ManifestError::MalformedManifest(e.to_string()))?;
    build_nodes(&manifest)?;
    Ok(manifest)
}

impl AnnotationTree {
    pub fn load_manifest(
        bytes: &[u8],
        encoder: Arc<dyn SentenceEncoder>,
    ) -> Result<Self, ManifestError> {
        let manifest: Manifest = serde_json::from_slice(bytes)
            .map_err(|e| ManifestError::MalformedManifest(e.to_string()))?;
        Self::from_manifest(manifest, encoder)
    }

    pub fn from_manifest(
        manifest: Manifest,
        encoder: Arc<dyn SentenceEncoder>,
    ) -> Result<Self, ManifestError> {
        let apps = build_nodes(&manifest)?;
        let mut index = HashMap::new();
        let mut ids = Vec::new();
        let mut texts = Vec::new();
        for (ai, app) in apps.iter().enumerate() {
            index.insert(app.id.clone(), Position { app: ai, param: None });
            ids.push(app.id.clone());
            texts.push(app.embedding_text());
            for (pi, param) in app.children.iter().enumerate() {
                index.insert(
                    param.id.clone(),
                    Position {
                        app: ai,
                        param: Some(pi),
                    },
                );
                ids.push(param.id.clone());
                texts.push(param.embedding_text());
            }
        }
        let vectors = encoder.encode_batch(&texts)?;
        let embeddings = ids.into_iter().zip(vectors).collect();
        Ok(Self {
            apps,
            index,
            embeddings,
            encoder,
            manifest,
        })
    }

    pub fn applications(&self) -> &[AnnotationNode] {
        &self.apps
    }

    pub fn node(&self, id: &str) -> Option<&AnnotationNode> {
        let pos = self.index.get(id)?;
        let app = &self.apps[pos.app];
        match pos.param {
            None => Some(app),
            Some(pi) => Some(&app.children[pi]),
        }
    }

    /// Children in manifest order. [`ROOT_ID`] yields the applications.
    pub fn children_of(&self, id: &str) -> Result<&[AnnotationNode], TreeError> {
        if id == ROOT_ID {
            return Ok(&self.apps);
        }
        self.node(id)
            .map(|n| n.children.as_slice())
            .ok_or_else(|| TreeError::UnknownNode(id.to_string()))
    }

    /// Parent id; the root for applications, `None` for the root or unknown ids.
    pub fn parent_of(&self, id: &str) -> Option<&str> {
        let pos = self.index.get(id)?;
        match pos.param {
            None => Some(ROOT_ID),
            Some(_) => Some(self.apps[pos.app].id.as_str()),
        }
    }

    pub fn app_by_name(&self, name: &str) -> Option<&AnnotationNode> {
        self.apps.iter().find(|a| a.name == name)
    }

    pub fn embedding(&self, id: &str) -> Option<&EmbeddingVector> {
        self.embeddings.get(id)
    }

    pub fn node_count(&self) -> usize {
        self.index.len()
    }

    pub fn encoder(&self) -> &Arc<dyn SentenceEncoder> {
        &self.encoder
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    /// Sibling pairs whose description embeddings are more similar than
    /// `threshold`, most similar first.
    pub fn ambiguity_report(&self, threshold: f64) -> Result<Vec<AmbiguousPair>, EncodeError> {
        let mut pairs = Vec::new();
        let mut groups: Vec<&[AnnotationNode]> = vec![&self.apps];
        groups.extend(self.apps.iter().map(|a| a.children.as_slice()));
        for siblings in groups {
            let texts: Vec<String> = siblings.iter().map(|n| n.description.clone()).collect();
            let vectors = self.encoder.encode_batch(&texts)?;
            for i in 0..siblings.len() {
                for j in i + 1..siblings.len() {
                    let Ok(similarity) = cosine_similarity(&vectors[i], &vectors[j]) else {
                        continue;
                    };
                    if similarity > threshold {
                        pairs.push(AmbiguousPair {
                            first: siblings[i].id.clone(),
                            second: siblings[j].id.clone(),
                            similarity,
                        });
                    }
                }
            }
        }
        pairs.sort_by(|a, b| b.similarity.total_cmp(&a.similarity));
        Ok(pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{BuiltinEncoder, Vocabulary};

    fn encoder() -> Arc<dyn SentenceEncoder> {
        Arc::new(BuiltinEncoder::with_vocab(Vocabulary::generate([
            "weather location city calculator sum",
        ])))
    }

    const WEATHER: &str = r#"{"apps":[{"name":"Weather","description":"Current weather for a city",
        "parameters":[{"name":"City","description":"The city to look up","prompt":"What is the location?"}]}]}"#;

    #[test]
    fn loads_single_app_manifest() {
        let tree = AnnotationTree::load_manifest(WEATHER.as_bytes(), encoder()).unwrap();
        assert_eq!(tree.applications().len(), 1);
        let kids = tree.children_of("Weather").unwrap();
        assert_eq!(kids.len(), 1);
        assert_eq!(kids[0].id, "Weather.City");
        assert_eq!(kids[0].prompt.as_deref(), Some("What is the location?"));
        assert_eq!(kids[0].extractor_kind, Some(ExtractorKind::Span));
        assert!(tree.children_of("Weather.City").unwrap().is_empty());
        assert_eq!(tree.parent_of("Weather.City"), Some("Weather"));
        assert_eq!(tree.parent_of("Weather"), Some(ROOT_ID));
        assert_eq!(
            tree.children_of("Nope"),
            Err(TreeError::UnknownNode("Nope".into()))
        );
    }

    #[test]
    fn every_node_has_one_embedding() {
        let tree = AnnotationTree::load_manifest(WEATHER.as_bytes(), encoder()).unwrap();
        assert_eq!(tree.node_count(), 2);
        assert!(tree.embedding("Weather").is_some());
        assert!(tree.embedding("Weather.City").is_some());
    }

    #[test]
    fn validation_errors() {
        let cases: &[(&str, fn(&ManifestError) -> bool)] = &[
            (r#"{"apps":[]}"#, |e| matches!(e, ManifestError::MalformedManifest(_))),
            ("not json", |e| matches!(e, ManifestError::MalformedManifest(_))),
            (
                r#"{"apps":[{"name":"A","description":"x","parameters":[]}]}"#,
                |e| matches!(e, ManifestError::MalformedManifest(_)),
            ),
            (
                r#"{"apps":[{"name":"A","description":" ","parameters":[{"name":"P","description":"d","prompt":"q"}]}]}"#,
                |e| matches!(e, ManifestError::EmptyDescription(p) if p == "apps[0]"),
            ),
            (
                r#"{"apps":[{"name":"A","description":"d","parameters":[{"name":"P","description":"d"}]}]}"#,
                |e| matches!(e, ManifestError::ParameterWithoutPrompt(p) if p == "apps[0].parameters[0]"),
            ),
            (
                r#"{"apps":[{"name":"A","description":"d","parameters":[{"name":"P","description":"d","prompt":"q",
                    "parameters":[]}]}]}"#,
                |e| matches!(e, ManifestError::MalformedManifest(_)),
            ),
            (
                r#"{"apps":[{"id":"X","name":"A","description":"d","parameters":[{"name":"P","description":"d","prompt":"q"}]},
                            {"id":"X","name":"B","description":"d","parameters":[{"name":"P","description":"d","prompt":"q"}]}]}"#,
                |e| matches!(e, ManifestError::DuplicateId { first, second, .. }
                    if first == "apps[0]" && second == "apps[1]"),
            ),
            (
                r#"{"apps":[{"name":"A","description":"d","parameters":[
                    {"name":"P","description":"d","prompt":"q"},{"name":"P","id":"Q","description":"d","prompt":"q"}]}]}"#,
                |e| matches!(e, ManifestError::DuplicateName { first, second, .. }
                    if first == "apps[0].parameters[0]" && second == "apps[0].parameters[1]"),
            ),
        ];
        for (json, check) in cases {
            let err = AnnotationTree::load_manifest(json.as_bytes(), encoder()).unwrap_err();
            assert!(check(&err), "{json} -> {err:?}");
        }
    }

    #[test]
    fn ambiguity_flags_identical_descriptions() {
        let json = r#"{"apps":[
            {"name":"A","description":"sum two numbers","parameters":[{"name":"P","description":"first","prompt":"q"}]},
            {"name":"B","description":"sum two numbers","parameters":[{"name":"P","description":"second one","prompt":"q"}]}]}"#;
        let tree = AnnotationTree::load_manifest(json.as_bytes(), encoder()).unwrap();
        let report = tree.ambiguity_report(DEFAULT_AMBIGUITY_THRESHOLD).unwrap();
        assert_eq!(report.len(), 1);
        assert_eq!((report[0].first.as_str(), report[0].second.as_str()), ("A", "B"));
        assert!((report[0].similarity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_app_has_no_ambiguity() {
        let tree = AnnotationTree::load_manifest(WEATHER.as_bytes(), encoder()).unwrap();
        assert!(tree.ambiguity_report(DEFAULT_AMBIGUITY_THRESHOLD).unwrap().is_empty());
    }
}
