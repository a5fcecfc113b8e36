use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(value: &str) -> Self {
                Self(value.to_string())
            }
        }

        impl From<String> for $name {
            fn from(value: String) -> Self {
                Self(value)
            }
        }
    };
}

string_id!(
    /// Identifies one session (and its log file).
    SessionId
);
string_id!(OptionId);
string_id!(CriterionId);
string_id!(DefinitionId);

impl SessionId {
    pub fn random() -> Self {
        Self(uuid::Uuid::new_v4().to_string())
    }
}

/// The person's description of the decision. Revisable at any user-facing phase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionFraming {
    pub decision_text: String,
    pub ideal_qualities_text: String,
    pub revision: u32,
}

impl Default for DecisionFraming {
    fn default() -> Self {
        Self {
            decision_text: String::new(),
            ideal_qualities_text: String::new(),
            revision: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptionOrigin {
    Generated,
    UserAuthored,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptionStatus {
    Undecided,
    Kept,
    Removed,
}

/// How a generated option was meant to provoke. User-authored cards carry `None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Tests an assumption implicit in the framing (first round).
    AssumptionTest,
    /// Embodies one or more active criteria.
    Align,
    /// Runs against an active criterion.
    Challenge,
    /// Sits where two possibly competing criteria meet.
    EdgeCase,
    None,
}

impl Strategy {
    pub const PLANNED: [Strategy; 4] = [
        Strategy::AssumptionTest,
        Strategy::Align,
        Strategy::Challenge,
        Strategy::EdgeCase,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::AssumptionTest => "assumption_test",
            Strategy::Align => "align",
            Strategy::Challenge => "challenge",
            Strategy::EdgeCase => "edge_case",
            Strategy::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionCard {
    pub id: OptionId,
    pub text: String,
    pub origin: OptionOrigin,
    pub round: u32,
    pub status: OptionStatus,
    pub strategy: Strategy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Common,
    Provocative,
    UserAuthored,
}

/// One candidate meaning of a criterion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Definition {
    pub id: DefinitionId,
    pub text: String,
    pub flavor: Flavor,
    pub selected: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionOrigin {
    Inferred,
    UserAdded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    MustHave,
    ShouldHave,
    CouldHave,
    Unassigned,
}

impl Tier {
    /// Distance between two assigned tiers; unassigned counts as the bottom.
    pub fn rank(self) -> u8 {
        match self {
            Tier::MustHave => 0,
            Tier::ShouldHave => 1,
            Tier::CouldHave => 2,
            Tier::Unassigned => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Tier::MustHave => "must_have",
            Tier::ShouldHave => "should_have",
            Tier::CouldHave => "could_have",
            Tier::Unassigned => "unassigned",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Criterion {
    pub id: CriterionId,
    pub label: String,
    pub origin: CriterionOrigin,
    pub tier: Tier,
    pub active: bool,
    pub definitions: Vec<Definition>,
    pub introduced_round: u32,
}

impl Criterion {
    pub fn selected_definitions(&self) -> impl Iterator<Item = &Definition> {
        self.definitions.iter().filter(|d| d.selected)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseKind {
    Describing,
    AwaitingOptions,
    Narrowing,
    AwaitingCriteria,
    Prioritizing,
    AwaitingDefinitions,
    Redefining,
    Finished,
}

impl PhaseKind {
    /// Phases during which the system, not the person, owes the next step.
    pub fn is_awaiting(self) -> bool {
        matches!(
            self,
            PhaseKind::AwaitingOptions | PhaseKind::AwaitingCriteria | PhaseKind::AwaitingDefinitions
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PhaseKind::Describing => "describing",
            PhaseKind::AwaitingOptions => "awaiting_options",
            PhaseKind::Narrowing => "narrowing",
            PhaseKind::AwaitingCriteria => "awaiting_criteria",
            PhaseKind::Prioritizing => "prioritizing",
            PhaseKind::AwaitingDefinitions => "awaiting_definitions",
            PhaseKind::Redefining => "redefining",
            PhaseKind::Finished => "finished",
        }
    }
}

impl fmt::Display for PhaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Phase {
    pub kind: PhaseKind,
    pub round: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    #[default]
    Stub,
    External,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfig {
    pub options_per_round: u32,
    pub keep_target: u32,
    pub max_inferred_criteria: u32,
    pub definitions_per_criterion: u32,
    pub provider: ProviderKind,
    pub seed: u64,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            options_per_round: 8,
            keep_target: 3,
            max_inferred_criteria: 6,
            definitions_per_criterion: 8,
            provider: ProviderKind::Stub,
            seed: 0,
        }
    }
}

/// Where a branched session came from.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Lineage {
    pub parent_session_id: Option<SessionId>,
    pub branch_point_seq: Option<u64>,
}

/// One person's full iterative run. Only ever changed through
/// [`DecisionSession::apply`], so it is always the fold of its event log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionSession {
    pub id: SessionId,
    pub lineage: Lineage,
    pub framing: DecisionFraming,
    pub phase: Phase,
    pub options: BTreeMap<u32, Vec<OptionCard>>,
    pub criteria: Vec<Criterion>,
    /// Criteria still owed definitions while in `awaiting_definitions`.
    pub pending_definitions: Vec<CriterionId>,
    pub config: SessionConfig,
    pub event_seq: u64,
}

impl DecisionSession {
    pub fn round(&self) -> u32 {
        self.phase.round
    }

    pub fn current_options(&self) -> &[OptionCard] {
        self.options
            .get(&self.phase.round)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn active_criteria(&self) -> impl Iterator<Item = &Criterion> {
        self.criteria.iter().filter(|c| c.active)
    }

    pub fn criterion(&self, id: &CriterionId) -> Option<&Criterion> {
        self.criteria.iter().find(|c| &c.id == id)
    }

    pub fn kept_count(&self) -> u32 {
        self.current_options()
            .iter()
            .filter(|c| c.status == OptionStatus::Kept)
            .count() as u32
    }

    pub fn is_finished(&self) -> bool {
        self.phase.kind == PhaseKind::Finished
    }
}
