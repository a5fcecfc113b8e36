use serde::{Deserialize, Serialize};

use super::types::{CriterionId, DefinitionId, OptionId, PhaseKind};

/// Rejection from the session state machine. A rejected command never
/// changes the session.
///
/// Serializes as `{"code": "<kebab-case>", ...fields}`; the HTTP API passes
/// this body through unchanged.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "kebab-case")]
pub enum SessionError {
    #[error("invalid config: {reason}")]
    InvalidConfig { reason: String },
    #[error("decision text must not be empty")]
    EmptyDecisionText,
    #[error("command not allowed in phase {phase} (round {round})")]
    WrongPhase { phase: PhaseKind, round: u32 },
    #[error("expected {expected} items, got {actual}")]
    WrongCount { expected: u32, actual: u32 },
    #[error("no option {option_id} in the current round")]
    UnknownOption { option_id: OptionId },
    #[error("text must not be empty")]
    EmptyText,
    #[error("exactly {target} options must be kept, {actual} are")]
    WrongKeepCount { actual: u32, target: u32 },
    #[error("at most {max} inferred criteria per round, got {actual}")]
    TooManyCriteria { actual: u32, max: u32 },
    #[error("an active criterion is already labelled {label:?}")]
    DuplicateLabel { label: String },
    #[error("no active criterion {criterion_id}")]
    UnknownCriterion { criterion_id: CriterionId },
    #[error("criteria without a tier: {criterion_ids:?}")]
    UnassignedTiers { criterion_ids: Vec<CriterionId> },
    #[error("at least one active criterion is required")]
    NoActiveCriteria,
    #[error("definition {text:?} already exists for this criterion")]
    DuplicateDefinition { text: String },
    #[error("no definition {definition_id} on this criterion")]
    UnknownDefinition { definition_id: DefinitionId },
    #[error("option text {text:?} appears twice")]
    DuplicateOption { text: String },
    #[error("id {id} is already in use")]
    DuplicateId { id: String },
    #[error("criterion {criterion_id} is not waiting for definitions")]
    DefinitionsNotPending { criterion_id: CriterionId },
    #[error("invalid content: {reason}")]
    InvalidContent { reason: String },
}

impl SessionError {
    /// The stable kebab-case code shared by the engine, API, and UI.
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::InvalidConfig { .. } => "invalid-config",
            SessionError::EmptyDecisionText => "empty-decision-text",
            SessionError::WrongPhase { .. } => "wrong-phase",
            SessionError::WrongCount { .. } => "wrong-count",
            SessionError::UnknownOption { .. } => "unknown-option",
            SessionError::EmptyText => "empty-text",
            SessionError::WrongKeepCount { .. } => "wrong-keep-count",
            SessionError::TooManyCriteria { .. } => "too-many-criteria",
            SessionError::DuplicateLabel { .. } => "duplicate-label",
            SessionError::UnknownCriterion { .. } => "unknown-criterion",
            SessionError::UnassignedTiers { .. } => "unassigned-tiers",
            SessionError::NoActiveCriteria => "no-active-criteria",
            SessionError::DuplicateDefinition { .. } => "duplicate-definition",
            SessionError::UnknownDefinition { .. } => "unknown-definition",
            SessionError::DuplicateOption { .. } => "duplicate-option",
            SessionError::DuplicateId { .. } => "duplicate-id",
            SessionError::DefinitionsNotPending { .. } => "definitions-not-pending",
            SessionError::InvalidContent { .. } => "invalid-content",
        }
    }

    /// Every code the state machine can produce.
    pub const CODES: [&'static str; 18] = [
        "invalid-config",
        "empty-decision-text",
        "wrong-phase",
        "wrong-count",
        "unknown-option",
        "empty-text",
        "wrong-keep-count",
        "too-many-criteria",
        "duplicate-label",
        "unknown-criterion",
        "unassigned-tiers",
        "no-active-criteria",
        "duplicate-definition",
        "unknown-definition",
        "duplicate-option",
        "duplicate-id",
        "definitions-not-pending",
        "invalid-content",
    ];
}
