//! Central store: per-session application state driven only by actions.
//!
//! [`reduce`] is the pure transition function. [`Store`] keeps the latest
//! state of every session, serializes dispatches within a session, and fans
//! each new state out to that session's subscribers.

mod log;
mod reducer;

use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::{self, BufRead, Write};
use std::path::Path;
use std::sync::Arc;

use parking_lot::{Mutex, RwLock};
use tokio::sync::mpsc::{self, UnboundedReceiver, UnboundedSender};

pub use self::log::{parse_log_line, read_log, LogEntry, LogError};
pub use reducer::{reduce, Action, ActionOp, AppSchema, SessionState, StoreError};

use self::log::ActionLog;

struct Session {
    state: Mutex<Arc<SessionState>>,
    subscribers: Mutex<Vec<UnboundedSender<Arc<SessionState>>>>,
}

impl Session {
    fn new(id: &str) -> Self {
        Self {
            state: Mutex::new(Arc::new(SessionState::new(id))),
            subscribers: Mutex::new(Vec::new()),
        }
    }
}

/// Post-dispatch states of one session, in version order.
#[derive(Debug)]
pub struct Subscription {
    rx: UnboundedReceiver<Arc<SessionState>>,
}

impl Subscription {
    pub async fn recv(&mut self) -> Option<Arc<SessionState>> {
        self.rx.recv().await
    }

    pub fn try_recv(&mut self) -> Option<Arc<SessionState>> {
        self.rx.try_recv().ok()
    }

    pub fn into_receiver(self) -> UnboundedReceiver<Arc<SessionState>> {
        self.rx
    }
}

pub struct Store {
    schema: Arc<AppSchema>,
    sessions: RwLock<HashMap<String, Arc<Session>>>,
    auto_create: bool,
    log: Option<Mutex<ActionLog>>,
}

impl Store {
    pub fn new(schema: AppSchema) -> Self {
        Self {
            schema: Arc::new(schema),
            sessions: RwLock::new(HashMap::new()),
            auto_create: true,
            log: None,
        }
    }

    /// When off, reads of a session that has never been dispatched to fail
    /// with [`StoreError::UnknownSession`].
    pub fn auto_create(mut self, on: bool) -> Self {
        self.auto_create = on;
        self
    }

    pub fn with_log_writer(mut self, out: Box<dyn Write + Send>) -> Self {
        self.log = Some(Mutex::new(ActionLog::new(out)));
        self
    }

    pub fn with_log_file(self, path: &Path) -> io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(self.with_log_writer(Box::new(file)))
    }

    pub fn schema(&self) -> &AppSchema {
        &self.schema
    }

    fn session(&self, id: &str, create: bool) -> Option<Arc<Session>> {
        if let Some(s) = self.sessions.read().get(id) {
            return Some(s.clone());
        }
        if !create {
            return None;
        }
        let mut sessions = self.sessions.write();
        Some(
            sessions
                .entry(id.to_string())
                .or_insert_with(|| Arc::new(Session::new(id)))
                .clone(),
        )
    }

    fn commit(
        &self,
        session_id: &str,
        session: &Session,
        current: &mut Arc<SessionState>,
        action: &Action,
        record: bool,
    ) -> Result<Arc<SessionState>, StoreError> {
        let next = Arc::new(reduce(&self.schema, current, action)?);
        if let Some(log) = self.log.as_ref().filter(|_| record) {
            // A failed log write does not undo an applied transition.
            let _ = log.lock().append(&LogEntry::new(session_id, action));
        }
        *current = next.clone();
        session
            .subscribers
            .lock()
            .retain(|tx| tx.send(next.clone()).is_ok());
        Ok(next)
    }

    /// Applies an action carrying its own sequence number.
    pub fn dispatch(&self, session_id: &str, action: &Action) -> Result<Arc<SessionState>, StoreError> {
        let session = self.session(session_id, true).expect("created on dispatch");
        let mut current = session.state.lock();
        self.commit(session_id, &session, &mut current, action, true)
    }

    /// Applies `op` with the next sequence number for the session.
    pub fn dispatch_next(&self, session_id: &str, op: ActionOp) -> Result<Arc<SessionState>, StoreError> {
        let session = self.session(session_id, true).expect("created on dispatch");
        let mut current = session.state.lock();
        let action = Action {
            sequence: current.last_sequence + 1,
            op,
        };
        self.commit(session_id, &session, &mut current, &action, true)
    }

    pub fn snapshot(&self, session_id: &str) -> Result<SessionState, StoreError> {
        self.snapshot_arc(session_id).map(|s| (*s).clone())
    }

    pub fn snapshot_arc(&self, session_id: &str) -> Result<Arc<SessionState>, StoreError> {
        let session = self
            .session(session_id, self.auto_create)
            .ok_or_else(|| StoreError::UnknownSession(session_id.to_string()))?;
        let state = session.state.lock().clone();
        Ok(state)
    }

    pub fn subscribe(&self, session_id: &str) -> Result<Subscription, StoreError> {
        self.subscribe_with_snapshot(session_id).map(|(_, s)| s)
    }

    /// The current state and a subscription starting right after it.
    pub fn subscribe_with_snapshot(
        &self,
        session_id: &str,
    ) -> Result<(Arc<SessionState>, Subscription), StoreError> {
        let session = self
            .session(session_id, self.auto_create)
            .ok_or_else(|| StoreError::UnknownSession(session_id.to_string()))?;
        let (tx, rx) = mpsc::unbounded_channel();
        let current = session.state.lock();
        session.subscribers.lock().push(tx);
        Ok((current.clone(), Subscription { rx }))
    }

    pub fn session_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.sessions.read().keys().cloned().collect();
        ids.sort();
        ids
    }

    /// Re-applies every entry of an action log. Replayed actions are not
    /// written back to this store's own log.
    pub fn replay<R: BufRead>(&self, reader: R) -> Result<usize, LogError> {
        let entries = read_log(reader)?;
        for (line, entry) in &entries {
            let session = self.session(&entry.session, true).expect("created on replay");
            let mut current = session.state.lock();
            self.commit(&entry.session, &session, &mut current, &entry.action(), false)
                .map_err(|source| LogError::Replay {
                    line: *line,
                    source,
                })?;
        }
        Ok(entries.len())
    }
}
