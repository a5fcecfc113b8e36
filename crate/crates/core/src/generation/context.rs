use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::session::{
    CriterionId, DecisionFraming, DecisionSession, OptionOrigin, OptionStatus, Strategy, Tier,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionSummary {
    pub text: String,
    pub strategy: Strategy,
    pub origin: OptionOrigin,
}

/// The person's verdicts on one round of options.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundVerdicts {
    pub round: u32,
    pub kept: Vec<OptionSummary>,
    pub removed: Vec<OptionSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionSummary {
    pub id: CriterionId,
    pub label: String,
    pub tier: Tier,
    pub selected_definitions: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub options_per_round: u32,
    pub max_inferred_criteria: u32,
    pub definitions_per_criterion: u32,
}

/// Everything a generator may know about a session, projected from it.
/// Removed options, removed criteria, and unselected definitions are
/// included as negative signal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationContext {
    pub framing: DecisionFraming,
    pub round: u32,
    pub verdicts: Vec<RoundVerdicts>,
    pub active_criteria: Vec<CriterionSummary>,
    pub removed_criteria: Vec<String>,
    pub prior_definition_rejections: BTreeMap<CriterionId, Vec<String>>,
    pub limits: Limits,
}

impl GenerationContext {
    pub fn from_session(session: &DecisionSession) -> Self {
        let verdicts = session
            .options
            .iter()
            .map(|(round, cards)| {
                let pick = |status| {
                    cards
                        .iter()
                        .filter(|c| c.status == status)
                        .map(|c| OptionSummary {
                            text: c.text.clone(),
                            strategy: c.strategy,
                            origin: c.origin,
                        })
                        .collect()
                };
                RoundVerdicts {
                    round: *round,
                    kept: pick(OptionStatus::Kept),
                    removed: pick(OptionStatus::Removed),
                }
            })
            .collect();
        let active_criteria = session
            .active_criteria()
            .map(|c| CriterionSummary {
                id: c.id.clone(),
                label: c.label.clone(),
                tier: c.tier,
                selected_definitions: c.selected_definitions().map(|d| d.text.clone()).collect(),
            })
            .collect();
        let removed_criteria = session
            .criteria
            .iter()
            .filter(|c| !c.active)
            .map(|c| c.label.clone())
            .collect();
        let prior_definition_rejections = session
            .active_criteria()
            .filter(|c| !c.definitions.is_empty())
            .map(|c| {
                let rejected = c
                    .definitions
                    .iter()
                    .filter(|d| !d.selected)
                    .map(|d| d.text.clone())
                    .collect();
                (c.id.clone(), rejected)
            })
            .collect();
        Self {
            framing: session.framing.clone(),
            round: session.phase.round,
            verdicts,
            active_criteria,
            removed_criteria,
            prior_definition_rejections,
            limits: Limits {
                options_per_round: session.config.options_per_round,
                max_inferred_criteria: session.config.max_inferred_criteria,
                definitions_per_criterion: session.config.definitions_per_criterion,
            },
        }
    }

    /// Verdicts for the current round, if options were already shown.
    pub fn current_verdicts(&self) -> Option<&RoundVerdicts> {
        self.verdicts.iter().find(|v| v.round == self.round)
    }

    pub fn criterion(&self, id: &CriterionId) -> Option<&CriterionSummary> {
        self.active_criteria.iter().find(|c| &c.id == id)
    }
}
