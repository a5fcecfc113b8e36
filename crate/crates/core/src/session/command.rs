use serde::{Deserialize, Serialize};

use super::types::{
    Criterion, CriterionId, Definition, DefinitionId, OptionCard, OptionId, OptionStatus,
    SessionConfig, SessionId, Tier,
};

/// Every input the state machine accepts, in the exact shape stored in the
/// event log. Install commands carry the generated content, so replay never
/// needs a provider.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case", deny_unknown_fields)]
pub enum SessionCommand {
    SessionCreated {
        session_id: SessionId,
        config: SessionConfig,
    },
    FramingSubmitted {
        decision_text: String,
        ideal_qualities_text: String,
    },
    OptionsInstalled {
        cards: Vec<OptionCard>,
    },
    OptionToggled {
        option_id: OptionId,
        status: OptionStatus,
    },
    CustomOptionAdded {
        text: String,
    },
    NarrowingConfirmed,
    CriteriaInstalled {
        criteria: Vec<Criterion>,
    },
    TierSet {
        criterion_id: CriterionId,
        tier: Tier,
    },
    CriterionAdded {
        label: String,
    },
    CriterionRemoved {
        criterion_id: CriterionId,
    },
    PrioritizationConfirmed,
    DefinitionsInstalled {
        criterion_id: CriterionId,
        definitions: Vec<Definition>,
    },
    DefinitionsSelected {
        criterion_id: CriterionId,
        selected_ids: Vec<DefinitionId>,
        custom_texts: Vec<String>,
    },
    /// Loop back for another round.
    RedefinitionConfirmed,
    /// Close the loop; terminal.
    SessionFinished,
    SessionBranched {
        session_id: SessionId,
        parent_session_id: SessionId,
        branch_point_seq: u64,
    },
}

impl SessionCommand {
    pub fn kind(&self) -> &'static str {
        match self {
            SessionCommand::SessionCreated { .. } => "session_created",
            SessionCommand::FramingSubmitted { .. } => "framing_submitted",
            SessionCommand::OptionsInstalled { .. } => "options_installed",
            SessionCommand::OptionToggled { .. } => "option_toggled",
            SessionCommand::CustomOptionAdded { .. } => "custom_option_added",
            SessionCommand::NarrowingConfirmed => "narrowing_confirmed",
            SessionCommand::CriteriaInstalled { .. } => "criteria_installed",
            SessionCommand::TierSet { .. } => "tier_set",
            SessionCommand::CriterionAdded { .. } => "criterion_added",
            SessionCommand::CriterionRemoved { .. } => "criterion_removed",
            SessionCommand::PrioritizationConfirmed => "prioritization_confirmed",
            SessionCommand::DefinitionsInstalled { .. } => "definitions_installed",
            SessionCommand::DefinitionsSelected { .. } => "definitions_selected",
            SessionCommand::RedefinitionConfirmed => "redefinition_confirmed",
            SessionCommand::SessionFinished => "session_finished",
            SessionCommand::SessionBranched { .. } => "session_branched",
        }
    }

    /// System-originated events (generated content, bookkeeping) as opposed
    /// to the person's own actions.
    pub fn is_system(&self) -> bool {
        matches!(
            self,
            SessionCommand::SessionCreated { .. }
                | SessionCommand::OptionsInstalled { .. }
                | SessionCommand::CriteriaInstalled { .. }
                | SessionCommand::DefinitionsInstalled { .. }
                | SessionCommand::SessionBranched { .. }
        )
    }

    pub fn confirm_redefinition(finish: bool) -> Self {
        if finish {
            SessionCommand::SessionFinished
        } else {
            SessionCommand::RedefinitionConfirmed
        }
    }
}
