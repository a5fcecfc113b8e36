//! Domain types and the session state machine.
//!
//! The loop runs describing → awaiting_options → narrowing →
//! awaiting_criteria → prioritizing → awaiting_definitions → redefining, then
//! either back to awaiting_options for the next round or to finished.
//! `awaiting_*` phases are where generated content is installed.
//!
//! Every transition goes through [`DecisionSession::apply`], which validates
//! fully before touching any field: an `Err` leaves the session unchanged.

mod command;
mod error;
mod types;

use std::collections::HashSet;

pub use command::SessionCommand;
pub use error::SessionError;
pub use types::*;

use crate::text::normalize;

impl SessionConfig {
    pub fn validate(&self) -> Result<(), SessionError> {
        let invalid = |reason: &str| {
            Err(SessionError::InvalidConfig {
                reason: reason.to_string(),
            })
        };
        if self.keep_target == 0 || self.keep_target >= self.options_per_round {
            return invalid("keep_target must satisfy 0 < keep_target < options_per_round");
        }
        // A later-round plan needs a slot for each of align, challenge and edge_case.
        if self.options_per_round < 3 {
            return invalid("options_per_round must be at least 3");
        }
        if self.max_inferred_criteria < 1 {
            return invalid("max_inferred_criteria must be at least 1");
        }
        // Two common plus two provocative definitions per criterion.
        if self.definitions_per_criterion < 4 {
            return invalid("definitions_per_criterion must be at least 4");
        }
        Ok(())
    }
}

impl DecisionSession {
    /// Start a session in `describing`, round 1. Equivalent to applying the
    /// `session_created` event.
    pub fn create(id: SessionId, config: SessionConfig) -> Result<Self, SessionError> {
        config.validate()?;
        Ok(Self {
            id,
            lineage: Lineage::default(),
            framing: DecisionFraming::default(),
            phase: Phase {
                kind: PhaseKind::Describing,
                round: 1,
            },
            options: Default::default(),
            criteria: Vec::new(),
            pending_definitions: Vec::new(),
            config,
            event_seq: 1,
        })
    }

    /// Build a session from its creation command.
    pub fn from_created(command: &SessionCommand) -> Result<Self, SessionError> {
        match command {
            SessionCommand::SessionCreated { session_id, config } => {
                Self::create(session_id.clone(), config.clone())
            }
            _ => Err(SessionError::InvalidContent {
                reason: format!("a log must start with session_created, not {}", command.kind()),
            }),
        }
    }

    /// Apply one command. On success `event_seq` advances by one; on error
    /// nothing changes.
    pub fn apply(&mut self, command: &SessionCommand) -> Result<(), SessionError> {
        // Ids minted by this command embed the seq of the event recording it.
        let seq = self.event_seq + 1;
        match command {
            SessionCommand::SessionCreated { .. } => return Err(self.wrong_phase()),
            SessionCommand::FramingSubmitted {
                decision_text,
                ideal_qualities_text,
            } => self.do_submit_framing(decision_text, ideal_qualities_text)?,
            SessionCommand::OptionsInstalled { cards } => self.do_install_options(cards)?,
            SessionCommand::OptionToggled { option_id, status } => {
                self.do_toggle_option(option_id, *status)?
            }
            SessionCommand::CustomOptionAdded { text } => self.do_add_custom_option(text, seq)?,
            SessionCommand::NarrowingConfirmed => self.do_confirm_narrowing()?,
            SessionCommand::CriteriaInstalled { criteria } => self.do_install_criteria(criteria)?,
            SessionCommand::TierSet { criterion_id, tier } => self.do_set_tier(criterion_id, *tier)?,
            SessionCommand::CriterionAdded { label } => self.do_add_criterion(label, seq)?,
            SessionCommand::CriterionRemoved { criterion_id } => {
                self.do_remove_criterion(criterion_id)?
            }
            SessionCommand::PrioritizationConfirmed => self.do_confirm_prioritization()?,
            SessionCommand::DefinitionsInstalled {
                criterion_id,
                definitions,
            } => self.do_install_definitions(criterion_id, definitions)?,
            SessionCommand::DefinitionsSelected {
                criterion_id,
                selected_ids,
                custom_texts,
            } => self.do_select_definitions(criterion_id, selected_ids, custom_texts, seq)?,
            SessionCommand::RedefinitionConfirmed => self.do_confirm_redefinition(false)?,
            SessionCommand::SessionFinished => self.do_confirm_redefinition(true)?,
            SessionCommand::SessionBranched {
                session_id,
                parent_session_id,
                branch_point_seq,
            } => {
                if *branch_point_seq != self.event_seq || parent_session_id != &self.id {
                    return Err(SessionError::InvalidContent {
                        reason: "branch event does not match the prefix it follows".into(),
                    });
                }
                self.id = session_id.clone();
                self.lineage = Lineage {
                    parent_session_id: Some(parent_session_id.clone()),
                    branch_point_seq: Some(*branch_point_seq),
                };
            }
        }
        self.event_seq = seq;
        Ok(())
    }

    pub fn submit_framing(
        &mut self,
        decision_text: &str,
        ideal_qualities_text: &str,
    ) -> Result<(), SessionError> {
        self.apply(&SessionCommand::FramingSubmitted {
            decision_text: decision_text.to_string(),
            ideal_qualities_text: ideal_qualities_text.to_string(),
        })
    }

    pub fn install_options(&mut self, cards: Vec<OptionCard>) -> Result<(), SessionError> {
        self.apply(&SessionCommand::OptionsInstalled { cards })
    }

    pub fn toggle_option(&mut self, option_id: &OptionId, status: OptionStatus) -> Result<(), SessionError> {
        self.apply(&SessionCommand::OptionToggled {
            option_id: option_id.clone(),
            status,
        })
    }

    pub fn add_custom_option(&mut self, text: &str) -> Result<(), SessionError> {
        self.apply(&SessionCommand::CustomOptionAdded {
            text: text.to_string(),
        })
    }

    pub fn confirm_narrowing(&mut self) -> Result<(), SessionError> {
        self.apply(&SessionCommand::NarrowingConfirmed)
    }

    pub fn install_criteria(&mut self, criteria: Vec<Criterion>) -> Result<(), SessionError> {
        self.apply(&SessionCommand::CriteriaInstalled { criteria })
    }

    pub fn set_tier(&mut self, criterion_id: &CriterionId, tier: Tier) -> Result<(), SessionError> {
        self.apply(&SessionCommand::TierSet {
            criterion_id: criterion_id.clone(),
            tier,
        })
    }

    pub fn add_criterion(&mut self, label: &str) -> Result<(), SessionError> {
        self.apply(&SessionCommand::CriterionAdded {
            label: label.to_string(),
        })
    }

    pub fn remove_criterion(&mut self, criterion_id: &CriterionId) -> Result<(), SessionError> {
        self.apply(&SessionCommand::CriterionRemoved {
            criterion_id: criterion_id.clone(),
        })
    }

    pub fn confirm_prioritization(&mut self) -> Result<(), SessionError> {
        self.apply(&SessionCommand::PrioritizationConfirmed)
    }

    pub fn install_definitions(
        &mut self,
        criterion_id: &CriterionId,
        definitions: Vec<Definition>,
    ) -> Result<(), SessionError> {
        self.apply(&SessionCommand::DefinitionsInstalled {
            criterion_id: criterion_id.clone(),
            definitions,
        })
    }

    pub fn select_definitions(
        &mut self,
        criterion_id: &CriterionId,
        selected_ids: Vec<DefinitionId>,
        custom_texts: Vec<String>,
    ) -> Result<(), SessionError> {
        self.apply(&SessionCommand::DefinitionsSelected {
            criterion_id: criterion_id.clone(),
            selected_ids,
            custom_texts,
        })
    }

    pub fn confirm_redefinition(&mut self, finish: bool) -> Result<(), SessionError> {
        self.apply(&SessionCommand::confirm_redefinition(finish))
    }

    fn wrong_phase(&self) -> SessionError {
        SessionError::WrongPhase {
            phase: self.phase.kind,
            round: self.phase.round,
        }
    }

    fn expect_phase(&self, kind: PhaseKind) -> Result<(), SessionError> {
        if self.phase.kind == kind {
            Ok(())
        } else {
            Err(self.wrong_phase())
        }
    }

    fn active_index(&self, id: &CriterionId) -> Result<usize, SessionError> {
        self.criteria
            .iter()
            .position(|c| c.active && &c.id == id)
            .ok_or_else(|| SessionError::UnknownCriterion {
                criterion_id: id.clone(),
            })
    }

    fn active_label_taken(&self, label: &str) -> bool {
        let key = normalize(label);
        self.active_criteria().any(|c| normalize(&c.label) == key)
    }

    fn do_submit_framing(&mut self, decision: &str, ideal: &str) -> Result<(), SessionError> {
        match self.phase.kind {
            PhaseKind::Describing
            | PhaseKind::Narrowing
            | PhaseKind::Prioritizing
            | PhaseKind::Redefining => {}
            _ => return Err(self.wrong_phase()),
        }
        if decision.trim().is_empty() {
            return Err(SessionError::EmptyDecisionText);
        }
        self.framing.decision_text = decision.to_string();
        self.framing.ideal_qualities_text = ideal.to_string();
        self.framing.revision += 1;
        if self.phase.kind == PhaseKind::Describing {
            self.phase.kind = PhaseKind::AwaitingOptions;
        }
        Ok(())
    }

    fn do_install_options(&mut self, cards: &[OptionCard]) -> Result<(), SessionError> {
        self.expect_phase(PhaseKind::AwaitingOptions)?;
        let expected = self.config.options_per_round;
        if cards.len() != expected as usize {
            return Err(SessionError::WrongCount {
                expected,
                actual: cards.len() as u32,
            });
        }
        let existing: HashSet<&OptionId> = self.options.values().flatten().map(|c| &c.id).collect();
        let mut ids = HashSet::new();
        let mut texts = HashSet::new();
        for card in cards {
            if card.round != self.phase.round {
                return Err(self.wrong_phase());
            }
            if card.origin != OptionOrigin::Generated || card.strategy == Strategy::None {
                return Err(SessionError::InvalidContent {
                    reason: "installed options must be generated and carry a strategy".into(),
                });
            }
            if card.text.trim().is_empty() {
                return Err(SessionError::EmptyText);
            }
            if existing.contains(&card.id) || !ids.insert(&card.id) {
                return Err(SessionError::DuplicateId {
                    id: card.id.to_string(),
                });
            }
            if !texts.insert(normalize(&card.text)) {
                return Err(SessionError::DuplicateOption {
                    text: card.text.clone(),
                });
            }
        }
        let installed = cards
            .iter()
            .map(|card| OptionCard {
                status: OptionStatus::Undecided,
                ..card.clone()
            })
            .collect();
        self.options.insert(self.phase.round, installed);
        self.phase.kind = PhaseKind::Narrowing;
        Ok(())
    }

    fn do_toggle_option(&mut self, id: &OptionId, status: OptionStatus) -> Result<(), SessionError> {
        self.expect_phase(PhaseKind::Narrowing)?;
        let card = self
            .options
            .get_mut(&self.phase.round)
            .and_then(|cards| cards.iter_mut().find(|c| &c.id == id))
            .ok_or_else(|| SessionError::UnknownOption { option_id: id.clone() })?;
        card.status = status;
        Ok(())
    }

    fn do_add_custom_option(&mut self, text: &str, seq: u64) -> Result<(), SessionError> {
        self.expect_phase(PhaseKind::Narrowing)?;
        if text.trim().is_empty() {
            return Err(SessionError::EmptyText);
        }
        let round = self.phase.round;
        self.options.entry(round).or_default().push(OptionCard {
            id: OptionId(format!("r{round}-u{seq}")),
            text: text.to_string(),
            origin: OptionOrigin::UserAuthored,
            round,
            status: OptionStatus::Kept,
            strategy: Strategy::None,
        });
        Ok(())
    }

    fn do_confirm_narrowing(&mut self) -> Result<(), SessionError> {
        self.expect_phase(PhaseKind::Narrowing)?;
        let actual = self.kept_count();
        let target = self.config.keep_target;
        if actual != target {
            return Err(SessionError::WrongKeepCount { actual, target });
        }
        self.phase.kind = PhaseKind::AwaitingCriteria;
        Ok(())
    }

    fn do_install_criteria(&mut self, inferred: &[Criterion]) -> Result<(), SessionError> {
        self.expect_phase(PhaseKind::AwaitingCriteria)?;
        let max = self.config.max_inferred_criteria;
        if inferred.len() > max as usize {
            return Err(SessionError::TooManyCriteria {
                actual: inferred.len() as u32,
                max,
            });
        }
        let existing: HashSet<&CriterionId> = self.criteria.iter().map(|c| &c.id).collect();
        let mut ids = HashSet::new();
        let mut labels = HashSet::new();
        for criterion in inferred {
            if criterion.label.trim().is_empty() {
                return Err(SessionError::EmptyText);
            }
            if criterion.origin != CriterionOrigin::Inferred {
                return Err(SessionError::InvalidContent {
                    reason: "installed criteria must be inferred".into(),
                });
            }
            if criterion.introduced_round != self.phase.round {
                return Err(self.wrong_phase());
            }
            if existing.contains(&criterion.id) || !ids.insert(&criterion.id) {
                return Err(SessionError::DuplicateId {
                    id: criterion.id.to_string(),
                });
            }
            if self.active_label_taken(&criterion.label) || !labels.insert(normalize(&criterion.label)) {
                return Err(SessionError::DuplicateLabel {
                    label: criterion.label.clone(),
                });
            }
        }
        self.criteria.extend(inferred.iter().map(|c| Criterion {
            tier: Tier::Unassigned,
            active: true,
            definitions: Vec::new(),
            ..c.clone()
        }));
        self.phase.kind = PhaseKind::Prioritizing;
        Ok(())
    }

    fn do_set_tier(&mut self, id: &CriterionId, tier: Tier) -> Result<(), SessionError> {
        self.expect_phase(PhaseKind::Prioritizing)?;
        let idx = self.active_index(id)?;
        self.criteria[idx].tier = tier;
        Ok(())
    }

    fn do_add_criterion(&mut self, label: &str, seq: u64) -> Result<(), SessionError> {
        self.expect_phase(PhaseKind::Prioritizing)?;
        if label.trim().is_empty() {
            return Err(SessionError::EmptyText);
        }
        if self.active_label_taken(label) {
            return Err(SessionError::DuplicateLabel {
                label: label.to_string(),
            });
        }
        let round = self.phase.round;
        self.criteria.push(Criterion {
            id: CriterionId(format!("c{round}-u{seq}")),
            label: label.to_string(),
            origin: CriterionOrigin::UserAdded,
            tier: Tier::Unassigned,
            active: true,
            definitions: Vec::new(),
            introduced_round: round,
        });
        Ok(())
    }

    fn do_remove_criterion(&mut self, id: &CriterionId) -> Result<(), SessionError> {
        self.expect_phase(PhaseKind::Prioritizing)?;
        let idx = self.active_index(id)?;
        self.criteria[idx].active = false;
        Ok(())
    }

    fn do_confirm_prioritization(&mut self) -> Result<(), SessionError> {
        self.expect_phase(PhaseKind::Prioritizing)?;
        if self.active_criteria().next().is_none() {
            return Err(SessionError::NoActiveCriteria);
        }
        let unassigned: Vec<CriterionId> = self
            .active_criteria()
            .filter(|c| c.tier == Tier::Unassigned)
            .map(|c| c.id.clone())
            .collect();
        if !unassigned.is_empty() {
            return Err(SessionError::UnassignedTiers {
                criterion_ids: unassigned,
            });
        }
        // Criteria without definitions get them; when every active criterion
        // already has some, all of them get a fresh set (selected ones are kept).
        let mut pending: Vec<CriterionId> = self
            .active_criteria()
            .filter(|c| c.definitions.is_empty())
            .map(|c| c.id.clone())
            .collect();
        if pending.is_empty() {
            pending = self.active_criteria().map(|c| c.id.clone()).collect();
        }
        self.pending_definitions = pending;
        self.phase.kind = PhaseKind::AwaitingDefinitions;
        Ok(())
    }

    fn do_install_definitions(&mut self, id: &CriterionId, defs: &[Definition]) -> Result<(), SessionError> {
        self.expect_phase(PhaseKind::AwaitingDefinitions)?;
        let idx = self.active_index(id)?;
        if !self.pending_definitions.contains(id) {
            return Err(SessionError::DefinitionsNotPending {
                criterion_id: id.clone(),
            });
        }
        let expected = self.config.definitions_per_criterion;
        if defs.len() != expected as usize {
            return Err(SessionError::WrongCount {
                expected,
                actual: defs.len() as u32,
            });
        }
        let retained: Vec<&Definition> = self.criteria[idx].selected_definitions().collect();
        let mut texts: HashSet<String> = retained.iter().map(|d| normalize(&d.text)).collect();
        let mut ids: HashSet<&DefinitionId> = self.criteria[idx].definitions.iter().map(|d| &d.id).collect();
        for def in defs {
            if def.text.trim().is_empty() {
                return Err(SessionError::EmptyText);
            }
            if def.flavor == Flavor::UserAuthored {
                return Err(SessionError::InvalidContent {
                    reason: "installed definitions must be common or provocative".into(),
                });
            }
            if !ids.insert(&def.id) {
                return Err(SessionError::DuplicateId {
                    id: def.id.to_string(),
                });
            }
            if !texts.insert(normalize(&def.text)) {
                return Err(SessionError::DuplicateDefinition { text: def.text.clone() });
            }
        }
        let criterion = &mut self.criteria[idx];
        criterion.definitions.retain(|d| d.selected);
        criterion.definitions.extend(defs.iter().map(|d| Definition {
            selected: false,
            ..d.clone()
        }));
        self.pending_definitions.retain(|p| p != id);
        if self.pending_definitions.is_empty() {
            self.phase.kind = PhaseKind::Redefining;
        }
        Ok(())
    }

    fn do_select_definitions(
        &mut self,
        id: &CriterionId,
        selected: &[DefinitionId],
        custom: &[String],
        seq: u64,
    ) -> Result<(), SessionError> {
        self.expect_phase(PhaseKind::Redefining)?;
        let idx = self.active_index(id)?;
        let criterion = &self.criteria[idx];
        for def_id in selected {
            if !criterion.definitions.iter().any(|d| &d.id == def_id) {
                return Err(SessionError::UnknownDefinition {
                    definition_id: def_id.clone(),
                });
            }
        }
        let mut texts: HashSet<String> = criterion.definitions.iter().map(|d| normalize(&d.text)).collect();
        for text in custom {
            if text.trim().is_empty() {
                return Err(SessionError::EmptyText);
            }
            if !texts.insert(normalize(text)) {
                return Err(SessionError::DuplicateDefinition { text: text.clone() });
            }
        }
        let criterion = &mut self.criteria[idx];
        for def in &mut criterion.definitions {
            def.selected = selected.contains(&def.id);
        }
        let base = criterion.id.clone();
        criterion.definitions.extend(custom.iter().enumerate().map(|(i, text)| Definition {
            id: DefinitionId(format!("{base}.u{seq}-{i}")),
            text: text.clone(),
            flavor: Flavor::UserAuthored,
            selected: true,
        }));
        Ok(())
    }

    fn do_confirm_redefinition(&mut self, finish: bool) -> Result<(), SessionError> {
        self.expect_phase(PhaseKind::Redefining)?;
        if finish {
            self.phase.kind = PhaseKind::Finished;
        } else {
            self.phase = Phase {
                kind: PhaseKind::AwaitingOptions,
                round: self.phase.round + 1,
            };
        }
        Ok(())
    }
}
