//! A session paired with its log, and the driver that fills `awaiting_*`
//! phases with generated content.

use serde::{Deserialize, Serialize};

use crate::generation::{GenerationContext, GenerationError, Generator};
use crate::history::{self, HistoryError, SessionEvent, SessionLog};
use crate::session::{DecisionSession, PhaseKind, SessionCommand, SessionConfig, SessionError, SessionId};

/// Live session state plus the log it folds from. The only way to change
/// either is [`RecordedSession::execute`], which keeps them in lockstep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordedSession {
    session: DecisionSession,
    log: SessionLog,
}

impl RecordedSession {
    pub fn create(id: SessionId, config: SessionConfig) -> Result<Self, SessionError> {
        let command = SessionCommand::SessionCreated {
            session_id: id,
            config,
        };
        let session = DecisionSession::from_created(&command)?;
        let mut log = SessionLog::new();
        log.append(SessionEvent::new(1, command)).expect("empty log");
        Ok(Self { session, log })
    }

    pub fn from_log(log: SessionLog) -> Result<Self, HistoryError> {
        let session = history::replay(&log)?;
        Ok(Self { session, log })
    }

    pub fn session(&self) -> &DecisionSession {
        &self.session
    }

    pub fn log(&self) -> &SessionLog {
        &self.log
    }

    pub fn into_parts(self) -> (DecisionSession, SessionLog) {
        (self.session, self.log)
    }

    /// Apply `command` and record it. On error neither state nor log changes.
    pub fn execute(&mut self, command: SessionCommand) -> Result<&SessionEvent, SessionError> {
        self.session.apply(&command)?;
        self.log
            .append(SessionEvent::new(self.session.event_seq, command))
            .expect("session seq tracks log length");
        Ok(self.log.last().expect("just appended"))
    }

    pub fn branch(&self, at_seq: u64, new_id: SessionId) -> Result<RecordedSession, HistoryError> {
        let (log, session) = history::branch(&self.log, at_seq, new_id)?;
        Ok(RecordedSession { session, log })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EngineError {
    #[error(transparent)]
    Generation(#[from] GenerationError),
    #[error(transparent)]
    Session(#[from] SessionError),
}

impl EngineError {
    pub fn code(&self) -> &'static str {
        match self {
            EngineError::Generation(e) => e.code(),
            EngineError::Session(e) => e.code(),
        }
    }
}

/// The install command the session is waiting for, or `None` when the
/// person owes the next step. Pure with respect to the session.
pub fn next_install(
    session: &DecisionSession,
    generator: &Generator,
) -> Result<Option<SessionCommand>, GenerationError> {
    let context = GenerationContext::from_session(session);
    let command = match session.phase.kind {
        PhaseKind::AwaitingOptions => {
            let plan = generator.plan_strategies(&context);
            SessionCommand::OptionsInstalled {
                cards: generator.generate_options(&context, &plan)?,
            }
        }
        PhaseKind::AwaitingCriteria => SessionCommand::CriteriaInstalled {
            criteria: generator.infer_criteria(&context)?,
        },
        PhaseKind::AwaitingDefinitions => {
            let Some(criterion_id) = session.pending_definitions.first() else {
                return Ok(None);
            };
            SessionCommand::DefinitionsInstalled {
                criterion_id: criterion_id.clone(),
                definitions: generator.generate_definitions(&context, criterion_id)?,
            }
        }
        _ => return Ok(None),
    };
    Ok(Some(command))
}

/// Generate and install until the session leaves its `awaiting_*` phases.
/// Returns the number of install events appended.
pub fn fulfill(recorded: &mut RecordedSession, generator: &Generator) -> Result<usize, EngineError> {
    let mut installed = 0;
    while let Some(command) = next_install(recorded.session(), generator)? {
        recorded.execute(command)?;
        installed += 1;
    }
    Ok(installed)
}
