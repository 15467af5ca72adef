use serde::{Deserialize, Serialize};
use thiserror::Error;

const INPUT_OPEN: &str = ": \"";
const SEPARATOR: &str = "\" || ";
const TASK_DIRECTIVE: &str = "#task=";

/// One labeled line: `<task prompt>: "<input>" || <expected>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusExample {
    pub task_prompt: String,
    pub input_text: String,
    pub expected: String,
    pub task_label: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorpusError {
    #[error("malformed corpus line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
}

fn malformed(reason: &str) -> CorpusError {
    CorpusError::MalformedLine {
        line: 0,
        reason: reason.to_string(),
    }
}

pub fn strip_quotes(s: &str) -> &str {
    let t = s.trim();
    t.strip_prefix('"')
        .and_then(|r| r.strip_suffix('"'))
        .filter(|inner| !inner.contains('"'))
        .unwrap_or(t)
}

/// Label guessed from the line itself, used when no `#task=` directive is
/// in effect.
pub fn infer_task_label(task_prompt: &str, expected: &str) -> String {
    let prompt = task_prompt.to_lowercase();
    let key = expected
        .strip_prefix('"')
        .and_then(|rest| rest.split_once("\":"))
        .map(|(k, _)| k);
    let label = match key {
        Some("Name" | "Address" | "Email") => "AccountForm",
        Some("City") => "Weather",
        Some("promptSequence") => "SimpleCalculator",
        _ if prompt.contains("arithmetic") || prompt.contains("calculat") => "SimpleCalculator",
        _ if prompt.contains("location") || prompt.contains("city") => "Weather",
        _ if prompt.contains("name") || prompt.contains("email") || prompt.contains("address") => {
            "AccountForm"
        }
        _ => "Unlabeled",
    };
    label.to_string()
}

/// Splits on the first `: "` and the first `" || ` after it.
pub fn parse_corpus_line(line: &str) -> Result<CorpusExample, CorpusError> {
    let (task_prompt, rest) = line
        .split_once(INPUT_OPEN)
        .ok_or_else(|| malformed("missing ': \"' before the input"))?;
    let (input_text, expected) = rest
        .split_once(SEPARATOR)
        .ok_or_else(|| malformed("missing '\" || ' after the input"))?;
    if task_prompt.trim().is_empty() {
        return Err(malformed("empty task prompt"));
    }
    if input_text.is_empty() {
        return Err(malformed("empty input"));
    }
    if expected.trim().is_empty() {
        return Err(malformed("empty expected answer"));
    }
    Ok(CorpusExample {
        task_label: infer_task_label(task_prompt, expected),
        task_prompt: task_prompt.to_string(),
        input_text: input_text.to_string(),
        expected: expected.to_string(),
    })
}

impl CorpusExample {
    pub fn to_line(&self) -> String {
        format!(
            "{}{INPUT_OPEN}{}{SEPARATOR}{}",
            self.task_prompt, self.input_text, self.expected
        )
    }

    /// `expected` without one layer of surrounding double quotes.
    pub fn expected_value(&self) -> &str {
        strip_quotes(&self.expected)
    }

    pub fn is_arithmetic(&self) -> bool {
        self.task_label.ends_with("Calculator")
    }
}

/// Parses a corpus file. Blank lines and `#` comments are skipped;
/// `#task=<label>` sets the label for the lines that follow.
pub fn parse_corpus(text: &str) -> Result<Vec<CorpusExample>, CorpusError> {
    let mut label: Option<String> = None;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if let Some(l) = line.strip_prefix(TASK_DIRECTIVE) {
            let l = l.trim();
            label = (!l.is_empty()).then(|| l.to_string());
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let mut example = parse_corpus_line(line).map_err(|e| match e {
            CorpusError::MalformedLine { reason, .. } => CorpusError::MalformedLine {
                line: i + 1,
                reason,
            },
        })?;
        if let Some(l) = &label {
            example.task_label = l.clone();
        }
        out.push(example);
    }
    Ok(out)
}
