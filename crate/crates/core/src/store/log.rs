use std::io::{self, BufRead, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::reducer::{Action, ActionOp, StoreError};

/// One line of the action log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogEntry {
    pub session: String,
    pub sequence: u64,
    pub action: ActionOp,
    /// Milliseconds since the Unix epoch.
    pub timestamp: u64,
}

impl LogEntry {
    pub fn new(session: &str, action: &Action) -> Self {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0);
        Self {
            session: session.to_string(),
            sequence: action.sequence,
            action: action.op.clone(),
            timestamp,
        }
    }

    pub fn action(&self) -> Action {
        Action {
            sequence: self.sequence,
            op: self.action.clone(),
        }
    }
}

#[derive(Debug, Error)]
pub enum LogError {
    #[error("action log I/O: {0}")]
    Io(#[from] io::Error),
    #[error("malformed action log line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("replaying line {line}: {source}")]
    Replay {
        line: usize,
        #[source]
        source: StoreError,
    },
}

pub fn parse_log_line(line: &str) -> Result<LogEntry, serde_json::Error> {
    serde_json::from_str(line)
}

/// Reads every entry, skipping blank lines. Line numbers are 1-based.
pub fn read_log<R: BufRead>(reader: R) -> Result<Vec<(usize, LogEntry)>, LogError> {
    let mut entries = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let entry = parse_log_line(&line).map_err(|e| LogError::Malformed {
            line: i + 1,
            message: e.to_string(),
        })?;
        entries.push((i + 1, entry));
    }
    Ok(entries)
}

pub(crate) struct ActionLog {
    out: Box<dyn Write + Send>,
}

impl ActionLog {
    pub(crate) fn new(out: Box<dyn Write + Send>) -> Self {
        Self { out }
    }

    pub(crate) fn append(&mut self, entry: &LogEntry) -> io::Result<()> {
        let line = serde_json::to_string(entry).map_err(io::Error::other)?;
        writeln!(self.out, "{line}")?;
        self.out.flush()
    }
}
