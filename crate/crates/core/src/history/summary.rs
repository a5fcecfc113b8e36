use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{corrupt, HistoryError, SessionLog};
use crate::session::{
    CriterionId, CriterionOrigin, DecisionSession, OptionOrigin, OptionStatus, PhaseKind,
    SessionCommand, SessionId, Tier,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Actor {
    /// Generated content and bookkeeping.
    System,
    /// The person's own choices.
    User,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityEntry {
    pub seq: u64,
    pub round: u32,
    pub kind: String,
    pub actor: Actor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CarriedCriterion {
    pub id: CriterionId,
    pub label: String,
    pub tier: Tier,
    pub introduced_round: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundDigest {
    pub round: u32,
    pub framing_revisions: u32,
    pub options_generated: u32,
    pub options_user_authored: u32,
    pub options_kept: u32,
    pub options_removed: u32,
    pub criteria_carried: Vec<CarriedCriterion>,
    pub criteria_inferred: u32,
    pub criteria_added: u32,
    pub criteria_removed: u32,
    pub criteria_retiered: u32,
    pub definitions_installed: u32,
    pub definitions_selected: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TierChange {
    pub seq: u64,
    pub round: u32,
    pub from: Tier,
    pub to: Tier,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionTimeline {
    pub id: CriterionId,
    pub label: String,
    pub origin: CriterionOrigin,
    pub introduced_round: u32,
    pub tier_changes: Vec<TierChange>,
    pub removed_at_seq: Option<u64>,
}

/// Per-round digest of a log plus how each criterion evolved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessSummary {
    pub session_id: SessionId,
    pub phase: PhaseKind,
    pub rounds: Vec<RoundDigest>,
    pub timeline: Vec<CriterionTimeline>,
    pub activity: Vec<ActivityEntry>,
}

fn selected_count(session: &DecisionSession) -> u32 {
    session
        .active_criteria()
        .map(|c| c.selected_definitions().count() as u32)
        .sum()
}

/// Deterministic digest of `log`; replays it event by event.
pub fn summarize(log: &SessionLog) -> Result<ProcessSummary, HistoryError> {
    let mut events = log.events().iter();
    let first = events.next().ok_or(HistoryError::CorruptLog {
        seq: 1,
        reason: "empty log".into(),
    })?;
    let mut session = DecisionSession::from_created(&first.command).map_err(|e| corrupt(first.seq, e))?;
    let mut rounds: BTreeMap<u32, RoundDigest> = BTreeMap::new();
    let mut timeline: Vec<CriterionTimeline> = Vec::new();
    let mut closed: Vec<u32> = Vec::new();
    let mut activity = vec![ActivityEntry {
        seq: first.seq,
        round: 1,
        kind: first.kind().to_string(),
        actor: Actor::System,
    }];

    for event in events {
        let round = session.phase.round;
        let before = session.clone();
        session.apply(&event.command).map_err(|e| corrupt(event.seq, e))?;
        activity.push(ActivityEntry {
            seq: event.seq,
            round,
            kind: event.kind().to_string(),
            actor: if event.command.is_system() {
                Actor::System
            } else {
                Actor::User
            },
        });
        let digest = rounds.entry(round).or_insert_with(|| RoundDigest {
            round,
            ..RoundDigest::default()
        });
        match &event.command {
            SessionCommand::FramingSubmitted { .. } => digest.framing_revisions += 1,
            SessionCommand::CriteriaInstalled { criteria } => digest.criteria_inferred += criteria.len() as u32,
            SessionCommand::CriterionAdded { .. } => digest.criteria_added += 1,
            SessionCommand::CriterionRemoved { criterion_id } => {
                digest.criteria_removed += 1;
                if let Some(t) = timeline.iter_mut().find(|t| &t.id == criterion_id) {
                    t.removed_at_seq = Some(event.seq);
                }
            }
            SessionCommand::TierSet { criterion_id, tier } => {
                let from = before.criterion(criterion_id).map(|c| c.tier).unwrap_or(Tier::Unassigned);
                if from != *tier {
                    if from != Tier::Unassigned {
                        digest.criteria_retiered += 1;
                    }
                    if let Some(t) = timeline.iter_mut().find(|t| &t.id == criterion_id) {
                        t.tier_changes.push(TierChange {
                            seq: event.seq,
                            round,
                            from,
                            to: *tier,
                        });
                    }
                }
            }
            SessionCommand::DefinitionsInstalled { definitions, .. } => {
                digest.definitions_installed += definitions.len() as u32
            }
            SessionCommand::RedefinitionConfirmed | SessionCommand::SessionFinished => {
                digest.definitions_selected = selected_count(&session);
                closed.push(round);
                if matches!(event.command, SessionCommand::RedefinitionConfirmed) {
                    let next = rounds.entry(round + 1).or_insert_with(|| RoundDigest {
                        round: round + 1,
                        ..RoundDigest::default()
                    });
                    next.criteria_carried = session
                        .active_criteria()
                        .map(|c| CarriedCriterion {
                            id: c.id.clone(),
                            label: c.label.clone(),
                            tier: c.tier,
                            introduced_round: c.introduced_round,
                        })
                        .collect();
                }
            }
            _ => {}
        }
        for criterion in session.criteria.iter().skip(timeline.len()) {
            timeline.push(CriterionTimeline {
                id: criterion.id.clone(),
                label: criterion.label.clone(),
                origin: criterion.origin,
                introduced_round: criterion.introduced_round,
                tier_changes: Vec::new(),
                removed_at_seq: None,
            });
        }
    }

    let open_round = session.phase.round;
    if !closed.contains(&open_round) {
        if let Some(digest) = rounds.get_mut(&open_round) {
            digest.definitions_selected = selected_count(&session);
        }
    }
    for (round, cards) in &session.options {
        let digest = rounds.entry(*round).or_insert_with(|| RoundDigest {
            round: *round,
            ..RoundDigest::default()
        });
        for card in cards {
            match card.origin {
                OptionOrigin::Generated => digest.options_generated += 1,
                OptionOrigin::UserAuthored => digest.options_user_authored += 1,
            }
            match card.status {
                OptionStatus::Kept => digest.options_kept += 1,
                OptionStatus::Removed => digest.options_removed += 1,
                OptionStatus::Undecided => {}
            }
        }
    }

    Ok(ProcessSummary {
        session_id: session.id.clone(),
        phase: session.phase.kind,
        rounds: rounds.into_values().collect(),
        timeline,
        activity,
    })
}
