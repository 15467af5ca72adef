//! Corpus scoring: parse labeled lines, run the pipeline over them and
//! report per-task accuracy.

pub mod corpus;

use std::fmt::Write as _;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::engine::{Engine, EngineError};
use crate::extract::{ExtractError, ExtractionRequest, StatePatch};
use crate::tree::AnnotationNode;

pub use corpus::{parse_corpus, parse_corpus_line, CorpusError, CorpusExample};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{examples} examples but {predictions} predictions")]
    LengthMismatch { examples: usize, predictions: usize },
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct TaskScore {
    pub examples: usize,
    pub passes: usize,
    pub accuracy: f64,
}

impl TaskScore {
    fn add(&mut self, pass: bool) {
        self.examples += 1;
        self.passes += usize::from(pass);
        self.accuracy = self.passes as f64 / self.examples as f64;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExampleVerdict {
    pub task_label: String,
    pub expected: String,
    pub produced: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classified_as: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EvalReport {
    pub per_task: IndexMap<String, TaskScore>,
    pub total: TaskScore,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<TaskScore>,
    pub verdicts: Vec<ExampleVerdict>,
}

impl EvalReport {
    pub fn render_table(&self) -> String {
        let width = self
            .per_task
            .keys()
            .map(String::len)
            .chain(["classification".len()])
            .max()
            .unwrap_or(0);
        let mut out = format!(
            "{:<width$}  {:>8}  {:>6}  {:>8}\n",
            "task", "examples", "passes", "accuracy"
        );
        let total = self.per_task.iter().map(|(k, v)| (k.as_str(), v));
        let extra = [("total", Some(&self.total)), ("classification", self.classification.as_ref())];
        let rows = total.chain(extra.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))));
        for (name, s) in rows {
            let _ = writeln!(
                out,
                "{name:<width$}  {:>8}  {:>6}  {:>8.3}",
                s.examples, s.passes, s.accuracy
            );
        }
        out
    }
}

/// The three shapes an expected answer can take.
#[derive(Debug, Clone, PartialEq)]
pub enum Expected {
    /// A full `{"CurrentApp":…,"Config":{…}}` patch.
    Patch(StatePatch),
    /// `"Key": value`, naming the parameter.
    KeyValue { key: String, value: String },
    /// A bare value, optionally quoted.
    Plain(String),
}

impl Expected {
    pub fn parse(text: &str) -> Self {
        let t = text.trim();
        if t.starts_with('{') {
            if let Ok(p) = StatePatch::from_json(t) {
                return Expected::Patch(p);
            }
        }
        if let Some((key, value)) = t
            .strip_prefix('"')
            .and_then(|rest| rest.split_once("\":"))
            .filter(|(k, _)| !k.is_empty() && !k.contains('"'))
        {
            return Expected::KeyValue {
                key: key.to_string(),
                value: corpus::strip_quotes(value).to_string(),
            };
        }
        Expected::Plain(corpus::strip_quotes(t).to_string())
    }
}

fn squash(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

fn values_match(expected: &str, produced: &str, arithmetic: bool) -> bool {
    if arithmetic {
        squash(expected) == squash(produced)
    } else {
        expected.trim() == produced.trim()
    }
}

/// Whether `produced` answers `example`. Arithmetic tasks compare with
/// whitespace removed.
pub fn matches(example: &CorpusExample, produced: &str) -> bool {
    let arithmetic = example.is_arithmetic();
    match (Expected::parse(&example.expected), Expected::parse(produced)) {
        (Expected::Patch(e), Expected::Patch(p)) => {
            e.current_app == p.current_app
                && e.config.len() == p.config.len()
                && e.config.iter().all(|(k, v)| {
                    p.config
                        .get(k)
                        .is_some_and(|pv| values_match(v, pv, arithmetic))
                })
        }
        (Expected::KeyValue { key, value }, Expected::KeyValue { key: pk, value: pv }) => {
            key == pk && values_match(&value, &pv, arithmetic)
        }
        (Expected::KeyValue { value, .. }, Expected::Plain(pv)) => {
            values_match(&value, &pv, arithmetic)
        }
        (Expected::Plain(e), Expected::Plain(p)) => values_match(&e, &p, arithmetic),
        _ => false,
    }
}

/// Scores precomputed predictions, one per example in order.
pub fn score(examples: &[CorpusExample], produced: &[String]) -> Result<EvalReport, EvalError> {
    if examples.len() != produced.len() {
        return Err(EvalError::LengthMismatch {
            examples: examples.len(),
            predictions: produced.len(),
        });
    }
    let mut report = EvalReport::default();
    for (example, output) in examples.iter().zip(produced) {
        let pass = matches(example, output);
        record(&mut report, example, output.clone(), pass, None);
    }
    Ok(report)
}

fn record(
    report: &mut EvalReport,
    example: &CorpusExample,
    produced: String,
    pass: bool,
    classified_as: Option<String>,
) {
    report
        .per_task
        .entry(example.task_label.clone())
        .or_default()
        .add(pass);
    report.total.add(pass);
    report.verdicts.push(ExampleVerdict {
        task_label: example.task_label.clone(),
        expected: example.expected.clone(),
        produced,
        pass,
        classified_as,
    });
}

fn words(s: &str) -> Vec<String> {
    s.split(|c: char| !c.is_alphanumeric())
        .filter(|w| w.len() > 2)
        .map(str::to_lowercase)
        .collect()
}

/// Parameter whose prompt or name best overlaps the task prompt. A name
/// mentioned in the task prompt counts double; ties go to the first.
pub fn parameter_for_prompt<'a>(app: &'a AnnotationNode, task_prompt: &str) -> Option<&'a AnnotationNode> {
    let task = words(task_prompt);
    let mut best: Option<(usize, &AnnotationNode)> = None;
    for node in &app.children {
        let mut score = words(node.prompt.as_deref().unwrap_or_default())
            .iter()
            .filter(|w| task.contains(w))
            .count();
        if task.contains(&node.name.to_lowercase()) {
            score += 2;
        }
        if best.is_none_or(|(b, _)| score > b) {
            best = Some((score, node));
        }
    }
    best.map(|(_, n)| n)
}

fn classification_correct(label: &str, app_name: &str) -> bool {
    label == app_name || label.ends_with(app_name)
}

/// Runs every example through `engine` without dispatching and scores the
/// output in the same shape as the expected answer.
pub fn run_pipeline_eval(engine: &Engine, examples: &[CorpusExample]) -> Result<EvalReport, EvalError> {
    let mut report = EvalReport::default();
    let mut classification = TaskScore::default();
    for example in examples {
        let text = &example.input_text;
        let result = match engine.classify(text) {
            Ok(r) => r,
            Err(EngineError::EmptyUtterance | EngineError::NoContent) => {
                classification.add(false);
                record(&mut report, example, String::new(), false, None);
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let tree = engine.tree();
        let app = tree
            .node(&result.app_id)
            .ok_or_else(|| ExtractError::UnknownApp(result.app_id.clone()))?;
        classification.add(classification_correct(&example.task_label, &app.name));
        let produced = match Expected::parse(&example.expected) {
            Expected::Patch(_) => match engine.extractor().extract_all(tree, &result, text) {
                Ok(p) => p.to_json(),
                Err(ExtractError::NoParametersExtracted { .. }) => StatePatch::new(app.name.clone()).to_json(),
                Err(e) => return Err(e.into()),
            },
            Expected::KeyValue { key, .. } => {
                match app.children.iter().find(|c| c.name == key) {
                    Some(node) => {
                        let answer = engine.extractor().extract(&ExtractionRequest::new(text, node)?)?;
                        match answer.value {
                            Some(v) => format!("\"{key}\": \"{v}\""),
                            None => String::new(),
                        }
                    }
                    None => String::new(),
                }
            }
            Expected::Plain(_) => match parameter_for_prompt(app, &example.task_prompt) {
                Some(node) => engine
                    .extractor()
                    .extract(&ExtractionRequest::new(text, node)?)?
                    .value
                    .unwrap_or_default(),
                None => String::new(),
            },
        };
        let pass = matches(example, &produced);
        record(&mut report, example, produced, pass, Some(app.name.clone()));
    }
    report.classification = Some(classification);
    Ok(report)
}
