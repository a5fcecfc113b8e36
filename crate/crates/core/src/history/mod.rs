//! Append-only event log. A session is exactly the fold of its log, which
//! makes replay, branching from any earlier point, and process summaries
//! possible without storing anything else.

mod summary;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

pub use summary::{summarize, ActivityEntry, Actor, CriterionTimeline, ProcessSummary, RoundDigest, TierChange};

use crate::session::{DecisionSession, SessionCommand, SessionError, SessionId};

/// One log entry. `timestamp` is informational: it is ignored by equality
/// and by replay.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(into = "EventRecord", try_from = "EventRecord")]
pub struct SessionEvent {
    pub seq: u64,
    pub timestamp: DateTime<Utc>,
    pub command: SessionCommand,
}

impl PartialEq for SessionEvent {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq && self.command == other.command
    }
}

impl Eq for SessionEvent {}

impl SessionEvent {
    pub fn new(seq: u64, command: SessionCommand) -> Self {
        Self {
            seq,
            timestamp: Utc::now(),
            command,
        }
    }

    pub fn kind(&self) -> &'static str {
        self.command.kind()
    }
}

/// Wire shape: `{"seq", "timestamp", "kind", "payload"?}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventRecord {
    seq: u64,
    timestamp: DateTime<Utc>,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    payload: Option<serde_json::Value>,
}

impl From<SessionEvent> for EventRecord {
    fn from(event: SessionEvent) -> Self {
        let mut tagged = match serde_json::to_value(&event.command) {
            Ok(serde_json::Value::Object(map)) => map,
            _ => unreachable!("commands serialize as tagged objects"),
        };
        EventRecord {
            seq: event.seq,
            timestamp: event.timestamp,
            kind: event.command.kind().to_string(),
            payload: tagged.remove("payload"),
        }
    }
}

impl TryFrom<EventRecord> for SessionEvent {
    type Error = serde_json::Error;

    fn try_from(record: EventRecord) -> Result<Self, Self::Error> {
        let mut tagged = serde_json::Map::new();
        tagged.insert("kind".into(), serde_json::Value::String(record.kind));
        if let Some(payload) = record.payload {
            tagged.insert("payload".into(), payload);
        }
        Ok(SessionEvent {
            seq: record.seq,
            timestamp: record.timestamp,
            command: serde_json::from_value(serde_json::Value::Object(tagged))?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "kebab-case")]
pub enum HistoryError {
    #[error("event seq {got} does not follow log length {len}")]
    SeqGap { len: u64, got: u64 },
    #[error("corrupt log at seq {seq}: {reason}")]
    CorruptLog { seq: u64, reason: String },
    #[error("cannot branch at seq {at_seq} of a {len}-event log")]
    BadBranchPoint { at_seq: u64, len: u64 },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SessionLog {
    events: Vec<SessionEvent>,
}

impl SessionLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> u64 {
        self.events.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn events(&self) -> &[SessionEvent] {
        &self.events
    }

    pub fn last(&self) -> Option<&SessionEvent> {
        self.events.last()
    }

    /// Append `event`, which must carry seq `len + 1`.
    pub fn append(&mut self, event: SessionEvent) -> Result<(), HistoryError> {
        if event.seq != self.len() + 1 {
            return Err(HistoryError::SeqGap {
                len: self.len(),
                got: event.seq,
            });
        }
        self.events.push(event);
        Ok(())
    }

    /// Build a log from stored events, checking seqs are dense from 1.
    pub fn from_events(events: Vec<SessionEvent>) -> Result<Self, HistoryError> {
        let mut log = Self::new();
        for event in events {
            let seq = event.seq;
            log.append(event).map_err(|_| HistoryError::CorruptLog {
                seq,
                reason: format!("expected seq {}", log.len() + 1),
            })?;
        }
        Ok(log)
    }

    /// The first `len` events as a new log.
    pub fn prefix(&self, len: u64) -> SessionLog {
        SessionLog {
            events: self.events[..(len as usize).min(self.events.len())].to_vec(),
        }
    }
}

fn corrupt(seq: u64, err: SessionError) -> HistoryError {
    HistoryError::CorruptLog {
        seq,
        reason: format!("{} ({err})", err.code()),
    }
}

/// Fold every event through the state machine.
pub fn replay(log: &SessionLog) -> Result<DecisionSession, HistoryError> {
    let mut events = log.events().iter();
    let first = events.next().ok_or(HistoryError::CorruptLog {
        seq: 1,
        reason: "empty log".into(),
    })?;
    let mut session = DecisionSession::from_created(&first.command).map_err(|e| corrupt(first.seq, e))?;
    for event in events {
        session.apply(&event.command).map_err(|e| corrupt(event.seq, e))?;
    }
    Ok(session)
}

/// Start a new session from the first `at_seq` events of `log`. The new log
/// is a copy of that prefix plus a `session_branched` event carrying the
/// fresh id and lineage; the parent log is untouched.
pub fn branch(
    log: &SessionLog,
    at_seq: u64,
    new_id: SessionId,
) -> Result<(SessionLog, DecisionSession), HistoryError> {
    if at_seq == 0 || at_seq > log.len() {
        return Err(HistoryError::BadBranchPoint {
            at_seq,
            len: log.len(),
        });
    }
    let mut child_log = log.prefix(at_seq);
    let mut child = replay(&child_log)?;
    let command = SessionCommand::SessionBranched {
        session_id: new_id,
        parent_session_id: child.id.clone(),
        branch_point_seq: at_seq,
    };
    child.apply(&command).map_err(|e| corrupt(at_seq + 1, e))?;
    child_log
        .append(SessionEvent::new(at_seq + 1, command))
        .expect("prefix length is at_seq");
    Ok((child_log, child))
}

#[cfg(test)]
mod tests;
