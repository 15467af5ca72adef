//! Bundled demo applications: value rules, widget hints, the calculator and
//! the weather lookup.

pub mod calc;
pub mod weather;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

pub use calc::{eval_expression, evaluate, CalcError};
pub use weather::{OfflineWeather, WeatherClient, WeatherError, WeatherRecord, WeatherSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ValueRule {
    NonEmpty,
    Email,
    Expression,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WidgetKind {
    TextField,
    ResultDisplay,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterSpec {
    pub rule: ValueRule,
    pub widget: WidgetKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppDefinition {
    pub name: String,
    pub parameters: IndexMap<String, ParameterSpec>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LibraryError {
    #[error("unknown application {0:?}")]
    UnknownApp(String),
    #[error("application {app:?} has no parameter {parameter:?}")]
    UnknownParameter { app: String, parameter: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    Violation(String),
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok)
    }
}

fn check_email(value: &str) -> Verdict {
    let Some((local, domain)) = value.rsplit_once('@') else {
        return Verdict::Violation("missing '@'".into());
    };
    if local.is_empty() || value.chars().any(char::is_whitespace) {
        return Verdict::Violation("malformed local part".into());
    }
    let labels: Vec<&str> = domain.split('.').collect();
    if labels.len() < 2 || labels.iter().any(|l| l.is_empty()) {
        return Verdict::Violation("domain needs a dot-separated name".into());
    }
    Verdict::Ok
}

pub fn check(rule: ValueRule, value: &str) -> Verdict {
    match rule {
        ValueRule::NonEmpty if value.trim().is_empty() => Verdict::Violation("empty value".into()),
        ValueRule::NonEmpty => Verdict::Ok,
        ValueRule::Email => check_email(value),
        ValueRule::Expression => match calc::evaluate(value) {
            Ok(_) | Err(CalcError::DivisionByZero) => Verdict::Ok,
            Err(e) => Verdict::Violation(e.to_string()),
        },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AppLibrary {
    apps: IndexMap<String, AppDefinition>,
}

impl Default for AppLibrary {
    fn default() -> Self {
        Self::bundled()
    }
}

impl AppLibrary {
    pub fn new(apps: impl IntoIterator<Item = AppDefinition>) -> Self {
        Self {
            apps: apps.into_iter().map(|a| (a.name.clone(), a)).collect(),
        }
    }

    /// AccountForm, Weather and Calculator.
    pub fn bundled() -> Self {
        let text = |rule| ParameterSpec {
            rule,
            widget: WidgetKind::TextField,
        };
        Self::new([
            AppDefinition {
                name: "AccountForm".into(),
                parameters: IndexMap::from([
                    ("Name".into(), text(ValueRule::NonEmpty)),
                    ("Address".into(), text(ValueRule::NonEmpty)),
                    ("Email".into(), text(ValueRule::Email)),
                ]),
            },
            AppDefinition {
                name: "Weather".into(),
                parameters: IndexMap::from([("City".into(), text(ValueRule::NonEmpty))]),
            },
            AppDefinition {
                name: "Calculator".into(),
                parameters: IndexMap::from([(
                    "promptSequence".into(),
                    ParameterSpec {
                        rule: ValueRule::Expression,
                        widget: WidgetKind::ResultDisplay,
                    },
                )]),
            },
        ])
    }

    pub fn app(&self, name: &str) -> Option<&AppDefinition> {
        self.apps.get(name)
    }

    pub fn apps(&self) -> impl Iterator<Item = &AppDefinition> {
        self.apps.values()
    }

    pub fn validate_value(&self, app: &str, parameter: &str, value: &str) -> Result<Verdict, LibraryError> {
        let def = self
            .apps
            .get(app)
            .ok_or_else(|| LibraryError::UnknownApp(app.to_string()))?;
        let spec = def
            .parameters
            .get(parameter)
            .ok_or_else(|| LibraryError::UnknownParameter {
                app: app.to_string(),
                parameter: parameter.to_string(),
            })?;
        Ok(check(spec.rule, value))
    }
}
