use std::collections::BTreeMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::StatePatch;
use crate::tree::AnnotationTree;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StoreError {
    #[error("unknown application {0:?}")]
    UnknownApp(String),
    #[error("application {app:?} has no parameter {parameter:?}")]
    UnknownParameter { app: String, parameter: String },
    #[error("stale sequence {got}: last applied was {last}")]
    StaleSequence { got: u64, last: u64 },
    #[error("unknown session {0:?}")]
    UnknownSession(String),
}

/// Application names and their parameter names, in manifest order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AppSchema {
    apps: IndexMap<String, Vec<String>>,
}

impl AppSchema {
    pub fn new<I, P>(apps: I) -> Self
    where
        I: IntoIterator<Item = (String, P)>,
        P: IntoIterator<Item = String>,
    {
        Self {
            apps: apps
                .into_iter()
                .map(|(a, ps)| (a, ps.into_iter().collect()))
                .collect(),
        }
    }

    pub fn from_tree(tree: &AnnotationTree) -> Self {
        Self::new(tree.applications().iter().map(|a| {
            (
                a.name.clone(),
                a.children.iter().map(|p| p.name.clone()).collect::<Vec<_>>(),
            )
        }))
    }

    pub fn parameters(&self, app: &str) -> Option<&[String]> {
        self.apps.get(app).map(Vec::as_slice)
    }

    pub fn apps(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.apps.iter().map(|(a, p)| (a.as_str(), p.as_slice()))
    }

    fn check_app(&self, app: &str) -> Result<&[String], StoreError> {
        self.parameters(app)
            .ok_or_else(|| StoreError::UnknownApp(app.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum ActionOp {
    ApplyPatch { patch: StatePatch },
    ResetApp { app: String },
    SwitchApp { app: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Action {
    pub sequence: u64,
    #[serde(flatten)]
    pub op: ActionOp,
}

impl Action {
    pub fn apply_patch(sequence: u64, patch: StatePatch) -> Self {
        Self {
            sequence,
            op: ActionOp::ApplyPatch { patch },
        }
    }

    pub fn reset_app(sequence: u64, app: impl Into<String>) -> Self {
        Self {
            sequence,
            op: ActionOp::ResetApp { app: app.into() },
        }
    }

    pub fn switch_app(sequence: u64, app: impl Into<String>) -> Self {
        Self {
            sequence,
            op: ActionOp::SwitchApp { app: app.into() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionState {
    pub session_id: String,
    pub current_app: Option<String>,
    pub app_states: BTreeMap<String, IndexMap<String, String>>,
    pub version: u64,
    pub last_sequence: u64,
}

impl SessionState {
    pub fn new(session_id: impl Into<String>) -> Self {
        Self {
            session_id: session_id.into(),
            current_app: None,
            app_states: BTreeMap::new(),
            version: 0,
            last_sequence: 0,
        }
    }

    pub fn value(&self, app: &str, parameter: &str) -> Option<&str> {
        self.app_states.get(app)?.get(parameter).map(String::as_str)
    }
}

/// The reducer: `(state, action) -> state`. Never mutates its input.
pub fn reduce(
    schema: &AppSchema,
    state: &SessionState,
    action: &Action,
) -> Result<SessionState, StoreError> {
    if action.sequence <= state.last_sequence {
        return Err(StoreError::StaleSequence {
            got: action.sequence,
            last: state.last_sequence,
        });
    }
    let mut next = state.clone();
    match &action.op {
        ActionOp::ApplyPatch { patch } => {
            let params = schema.check_app(&patch.current_app)?;
            if let Some(unknown) = patch.config.keys().find(|k| !params.contains(k)) {
                return Err(StoreError::UnknownParameter {
                    app: patch.current_app.clone(),
                    parameter: unknown.clone(),
                });
            }
            let values = next.app_states.entry(patch.current_app.clone()).or_default();
            for (k, v) in &patch.config {
                values.insert(k.clone(), v.clone());
            }
            next.current_app = Some(patch.current_app.clone());
        }
        ActionOp::ResetApp { app } => {
            schema.check_app(app)?;
            next.app_states.insert(app.clone(), IndexMap::new());
        }
        ActionOp::SwitchApp { app } => {
            schema.check_app(app)?;
            next.current_app = Some(app.clone());
        }
    }
    next.version += 1;
    next.last_sequence = action.sequence;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema() -> AppSchema {
        AppSchema::new([
            (
                "AccountForm".to_string(),
                vec!["Name".to_string(), "Address".to_string(), "Email".to_string()],
            ),
            ("Weather".to_string(), vec!["City".to_string()]),
        ])
    }

    fn account_patch() -> StatePatch {
        StatePatch::new("AccountForm")
            .with("Name", "Connor Syle")
            .with("Address", "34 Coronation Street")
            .with("Email", "connor32@outlook.com")
    }

    #[test]
    fn apply_patch_on_empty_session() {
        let s0 = SessionState::new("s");
        let s1 = reduce(&schema(), &s0, &Action::apply_patch(1, account_patch())).unwrap();
        assert_eq!(s1.current_app.as_deref(), Some("AccountForm"));
        assert_eq!(s1.value("AccountForm", "Name"), Some("Connor Syle"));
        assert_eq!(s1.value("AccountForm", "Address"), Some("34 Coronation Street"));
        assert_eq!(s1.value("AccountForm", "Email"), Some("connor32@outlook.com"));
        assert_eq!(s1.version, 1);
        assert_eq!(s0, SessionState::new("s"));
    }

    #[test]
    fn empty_patch_only_bumps_version() {
        let s1 = reduce(&schema(), &SessionState::new("s"), &Action::apply_patch(1, account_patch())).unwrap();
        let s2 = reduce(&schema(), &s1, &Action::apply_patch(2, StatePatch::new("AccountForm"))).unwrap();
        assert_eq!(s2.app_states, s1.app_states);
        assert_eq!(s2.current_app, s1.current_app);
        assert_eq!(s2.version, 2);
    }

    #[test]
    fn merge_preserves_unmentioned_keys() {
        let s = SessionState::new("s");
        let s = reduce(&schema(), &s, &Action::apply_patch(1, StatePatch::new("AccountForm").with("Name", "Ann"))).unwrap();
        let s = reduce(&schema(), &s, &Action::apply_patch(2, StatePatch::new("AccountForm").with("Email", "a@b.co"))).unwrap();
        assert_eq!(s.value("AccountForm", "Name"), Some("Ann"));
        assert_eq!(s.value("AccountForm", "Email"), Some("a@b.co"));
        assert_eq!(s.app_states["AccountForm"].len(), 2);
    }

    #[test]
    fn reset_and_switch() {
        let s = reduce(&schema(), &SessionState::new("s"), &Action::apply_patch(1, account_patch())).unwrap();
        let s = reduce(&schema(), &s, &Action::switch_app(2, "Weather")).unwrap();
        assert_eq!(s.current_app.as_deref(), Some("Weather"));
        assert_eq!(s.value("AccountForm", "Name"), Some("Connor Syle"));
        let s = reduce(&schema(), &s, &Action::reset_app(3, "AccountForm")).unwrap();
        assert!(s.app_states["AccountForm"].is_empty());
        assert_eq!(s.version, 3);
    }

    #[test]
    fn rejects_unknown_and_stale() {
        let sch = schema();
        let s = SessionState::new("s");
        assert_eq!(
            reduce(&sch, &s, &Action::switch_app(1, "Nope")),
            Err(StoreError::UnknownApp("Nope".into()))
        );
        assert!(matches!(
            reduce(&sch, &s, &Action::apply_patch(1, StatePatch::new("Weather").with("Town", "x"))),
            Err(StoreError::UnknownParameter { .. })
        ));
        let s1 = reduce(&sch, &s, &Action::switch_app(5, "Weather")).unwrap();
        assert_eq!(
            reduce(&sch, &s1, &Action::switch_app(5, "Weather")),
            Err(StoreError::StaleSequence { got: 5, last: 5 })
        );
    }

    #[test]
    fn action_wire_format() {
        let a = Action::switch_app(3, "Weather");
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"{"sequence":3,"type":"SwitchApp","app":"Weather"}"#);
        assert_eq!(serde_json::from_str::<Action>(&json).unwrap(), a);
    }
}
