//! Helpers for tests: a scripted person who walks the loop, and a random
//! command source for fuzzing the state machine.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{self, RecordedSession};
use crate::generation::Generator;
use crate::session::{
    Criterion, CriterionId, CriterionOrigin, DecisionSession, DefinitionId, Flavor, OptionId,
    OptionStatus, Phase, PhaseKind, SessionCommand, SessionConfig, SessionId, Tier,
};

pub const DECISION_TEXT: &str = "Which PhD applicants should our lab admit this cycle?";
pub const IDEAL_QUALITIES_TEXT: &str =
    "Curious, strong researchers who communicate clearly and can learn new methods quickly.";

const TIER_CYCLE: [Tier; 3] = [Tier::MustHave, Tier::ShouldHave, Tier::CouldHave];

/// Commands a scripted person issues in the current phase, or `None` in
/// `awaiting_*` and `finished`. Deterministic in the session state.
///
/// Keeps the first `keep_target` options and removes the rest; in round 1
/// removes inferred criteria beyond the fourth; tiers new criteria by
/// cycling must/should/could and moves the first carried criterion one tier
/// down each later round; selects the first two common definitions of each
/// criterion on top of whatever was already selected.
pub fn scripted_step(session: &DecisionSession, last_round: u32, finish: bool) -> Option<Vec<SessionCommand>> {
    let round = session.phase.round;
    let commands = match session.phase.kind {
        PhaseKind::Describing => vec![SessionCommand::FramingSubmitted {
            decision_text: DECISION_TEXT.into(),
            ideal_qualities_text: IDEAL_QUALITIES_TEXT.into(),
        }],
        PhaseKind::Narrowing => {
            let keep = session.config.keep_target as usize;
            let mut out: Vec<SessionCommand> = session
                .current_options()
                .iter()
                .enumerate()
                .map(|(i, card)| SessionCommand::OptionToggled {
                    option_id: card.id.clone(),
                    status: if i < keep {
                        OptionStatus::Kept
                    } else {
                        OptionStatus::Removed
                    },
                })
                .collect();
            out.push(SessionCommand::NarrowingConfirmed);
            out
        }
        PhaseKind::Prioritizing => {
            let mut out = Vec::new();
            let active: Vec<&Criterion> = session.active_criteria().collect();
            let mut kept = 0;
            for c in &active {
                if round == 1 && kept >= 4 {
                    out.push(SessionCommand::CriterionRemoved {
                        criterion_id: c.id.clone(),
                    });
                    continue;
                }
                kept += 1;
                if c.introduced_round == round {
                    out.push(SessionCommand::TierSet {
                        criterion_id: c.id.clone(),
                        tier: TIER_CYCLE[(kept - 1) % 3],
                    });
                }
            }
            if round > 1 {
                if let Some(c) = active.iter().find(|c| c.introduced_round < round) {
                    let next = match c.tier {
                        Tier::MustHave => Tier::ShouldHave,
                        Tier::ShouldHave => Tier::CouldHave,
                        _ => Tier::MustHave,
                    };
                    out.push(SessionCommand::TierSet {
                        criterion_id: c.id.clone(),
                        tier: next,
                    });
                }
            }
            out.push(SessionCommand::PrioritizationConfirmed);
            out
        }
        PhaseKind::Redefining => {
            let mut out: Vec<SessionCommand> = session
                .active_criteria()
                .map(|c| {
                    let mut ids: Vec<DefinitionId> =
                        c.selected_definitions().map(|d| d.id.clone()).collect();
                    ids.extend(
                        c.definitions
                            .iter()
                            .filter(|d| !d.selected && d.flavor == Flavor::Common)
                            .take(2)
                            .map(|d| d.id.clone()),
                    );
                    SessionCommand::DefinitionsSelected {
                        criterion_id: c.id.clone(),
                        selected_ids: ids,
                        custom_texts: Vec::new(),
                    }
                })
                .collect();
            out.push(SessionCommand::confirm_redefinition(finish && round >= last_round));
            out
        }
        _ => return None,
    };
    Some(commands)
}

/// Run the scripted person for `rounds` rounds against `generator`. With
/// `finish` the last round ends the session; otherwise it stops in the
/// `redefining` phase of the last round.
pub fn scripted_run(generator: &Generator, rounds: u32, finish: bool) -> RecordedSession {
    let config = SessionConfig {
        seed: generator.seed(),
        ..SessionConfig::default()
    };
    let mut rec = RecordedSession::create(SessionId(format!("scripted-{rounds}")), config).expect("valid config");
    loop {
        engine::fulfill(&mut rec, generator).expect("stub generation succeeds");
        let session = rec.session();
        if session.is_finished() {
            break;
        }
        if !finish && session.phase.round == rounds && session.phase.kind == PhaseKind::Redefining {
            break;
        }
        let commands = scripted_step(session, rounds, finish).expect("person's turn");
        for command in commands {
            rec.execute(command).expect("scripted command is valid");
        }
    }
    rec
}

/// Whether the phase graph allows `from` → `to` in one accepted command.
pub fn legal_transition(from: Phase, to: Phase) -> bool {
    use PhaseKind::*;
    if from == to {
        return from.kind != Finished;
    }
    let same_round = from.round == to.round;
    match (from.kind, to.kind) {
        (Describing, AwaitingOptions)
        | (AwaitingOptions, Narrowing)
        | (Narrowing, AwaitingCriteria)
        | (AwaitingCriteria, Prioritizing)
        | (Prioritizing, AwaitingDefinitions)
        | (Prioritizing, Redefining)
        | (AwaitingDefinitions, Redefining)
        | (Redefining, Finished) => same_round,
        (Redefining, AwaitingOptions) => to.round == from.round + 1,
        _ => false,
    }
}

/// Random command source: mostly plausible commands for the current phase,
/// sometimes corrupted installs, sometimes arbitrary commands of any kind.
pub struct CommandFuzzer {
    rng: ChaCha8Rng,
    generator: Generator,
}

impl CommandFuzzer {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            generator: Generator::stub(seed),
        }
    }

    pub fn next_command(&mut self, session: &DecisionSession) -> SessionCommand {
        if self.rng.random_bool(0.25) {
            self.arbitrary(session)
        } else {
            self.plausible(session)
        }
    }

    fn plausible(&mut self, session: &DecisionSession) -> SessionCommand {
        let rng = &mut self.rng;
        match session.phase.kind {
            PhaseKind::AwaitingOptions | PhaseKind::AwaitingCriteria | PhaseKind::AwaitingDefinitions => {
                match engine::next_install(session, &self.generator) {
                    Ok(Some(command)) if rng.random_bool(0.85) => command,
                    Ok(Some(command)) => corrupt_install(command, rng),
                    _ => self.arbitrary(session),
                }
            }
            PhaseKind::Describing => SessionCommand::FramingSubmitted {
                decision_text: if rng.random_bool(0.9) {
                    DECISION_TEXT.into()
                } else {
                    "   ".into()
                },
                ideal_qualities_text: IDEAL_QUALITIES_TEXT.into(),
            },
            PhaseKind::Narrowing => {
                let kept = session.kept_count();
                let target = session.config.keep_target;
                let options = session.current_options();
                let roll = rng.random_range(0..10);
                if kept == target && roll < 6 {
                    SessionCommand::NarrowingConfirmed
                } else if roll == 0 {
                    SessionCommand::CustomOptionAdded {
                        text: format!("You admit a walk-in applicant #{}", rng.random_range(0..1000)),
                    }
                } else if roll == 1 {
                    SessionCommand::NarrowingConfirmed
                } else {
                    let card = options.choose(rng).expect("options installed");
                    let status = if kept < target {
                        OptionStatus::Kept
                    } else {
                        *[OptionStatus::Removed, OptionStatus::Undecided, OptionStatus::Kept]
                            .choose(rng)
                            .unwrap()
                    };
                    SessionCommand::OptionToggled {
                        option_id: card.id.clone(),
                        status,
                    }
                }
            }
            PhaseKind::Prioritizing => {
                let unassigned: Vec<&Criterion> =
                    session.active_criteria().filter(|c| c.tier == Tier::Unassigned).collect();
                let active: Vec<&Criterion> = session.active_criteria().collect();
                let roll = rng.random_range(0..20);
                if let Some(c) = unassigned.first().filter(|_| roll < 14) {
                    SessionCommand::TierSet {
                        criterion_id: c.id.clone(),
                        tier: *TIER_CYCLE.choose(rng).unwrap(),
                    }
                } else if roll == 14 && active.len() < 8 {
                    SessionCommand::CriterionAdded {
                        label: format!("criterion {}", rng.random_range(0..50)),
                    }
                } else if roll == 15 && active.len() > 1 {
                    SessionCommand::CriterionRemoved {
                        criterion_id: active.choose(rng).unwrap().id.clone(),
                    }
                } else if roll == 16 && !active.is_empty() {
                    SessionCommand::TierSet {
                        criterion_id: active.choose(rng).unwrap().id.clone(),
                        tier: *TIER_CYCLE.choose(rng).unwrap(),
                    }
                } else {
                    SessionCommand::PrioritizationConfirmed
                }
            }
            PhaseKind::Redefining => {
                let active: Vec<&Criterion> = session.active_criteria().collect();
                let roll = rng.random_range(0..10);
                match active.choose(rng) {
                    Some(c) if roll < 6 => {
                        let mut ids: Vec<DefinitionId> = c.definitions.iter().map(|d| d.id.clone()).collect();
                        ids.shuffle(rng);
                        ids.truncate(rng.random_range(0..4));
                        let custom_texts = if rng.random_bool(0.2) {
                            vec![format!("custom meaning {}", rng.random_range(0..100))]
                        } else {
                            Vec::new()
                        };
                        SessionCommand::DefinitionsSelected {
                            criterion_id: c.id.clone(),
                            selected_ids: ids,
                            custom_texts,
                        }
                    }
                    _ => SessionCommand::confirm_redefinition(rng.random_bool(0.1)),
                }
            }
            PhaseKind::Finished => self.arbitrary(session),
        }
    }

    fn arbitrary(&mut self, session: &DecisionSession) -> SessionCommand {
        let rng = &mut self.rng;
        let option_id = session
            .options
            .values()
            .flatten()
            .collect::<Vec<_>>()
            .choose(rng)
            .map(|c| c.id.clone())
            .unwrap_or_else(|| OptionId("r9-o99".into()));
        let criterion_id = session
            .criteria
            .choose(rng)
            .map(|c| c.id.clone())
            .unwrap_or_else(|| CriterionId("c9-99".into()));
        let text = ["", "  ", "x", "You admit nobody", "Curiosity"].choose(rng).unwrap().to_string();
        match rng.random_range(0..16) {
            0 => SessionCommand::SessionCreated {
                session_id: "again".into(),
                config: SessionConfig::default(),
            },
            1 => SessionCommand::FramingSubmitted {
                decision_text: text.clone(),
                ideal_qualities_text: text,
            },
            2 => SessionCommand::OptionsInstalled { cards: Vec::new() },
            3 => SessionCommand::OptionToggled {
                option_id,
                status: OptionStatus::Kept,
            },
            4 => SessionCommand::CustomOptionAdded { text },
            5 => SessionCommand::NarrowingConfirmed,
            6 => SessionCommand::CriteriaInstalled {
                criteria: vec![Criterion {
                    id: criterion_id,
                    label: text,
                    origin: CriterionOrigin::Inferred,
                    tier: Tier::Unassigned,
                    active: true,
                    definitions: Vec::new(),
                    introduced_round: session.phase.round,
                }],
            },
            7 => SessionCommand::TierSet {
                criterion_id,
                tier: Tier::Unassigned,
            },
            8 => SessionCommand::CriterionAdded { label: text },
            9 => SessionCommand::CriterionRemoved { criterion_id },
            10 => SessionCommand::PrioritizationConfirmed,
            11 => SessionCommand::DefinitionsInstalled {
                criterion_id,
                definitions: Vec::new(),
            },
            12 => SessionCommand::DefinitionsSelected {
                criterion_id,
                selected_ids: vec![DefinitionId("nope".into())],
                custom_texts: vec![text],
            },
            13 => SessionCommand::RedefinitionConfirmed,
            14 => SessionCommand::SessionFinished,
            _ => SessionCommand::SessionBranched {
                session_id: "child".into(),
                parent_session_id: "someone-else".into(),
                branch_point_seq: session.event_seq + 7,
            },
        }
    }
}

fn corrupt_install(command: SessionCommand, rng: &mut ChaCha8Rng) -> SessionCommand {
    match command {
        SessionCommand::OptionsInstalled { mut cards } => {
            match rng.random_range(0..3) {
                0 => {
                    cards.pop();
                }
                1 => cards[1].text = cards[0].text.to_uppercase(),
                _ => cards[0].round += 1,
            }
            SessionCommand::OptionsInstalled { cards }
        }
        SessionCommand::CriteriaInstalled { mut criteria } => {
            match rng.random_range(0..3) {
                0 if !criteria.is_empty() => criteria[0].label = " ".into(),
                1 if !criteria.is_empty() => criteria[0].origin = CriterionOrigin::UserAdded,
                _ => {
                    let extra = criteria.first().cloned();
                    criteria.extend((0..7).filter_map(|i| {
                        extra.clone().map(|mut c| {
                            c.id = CriterionId(format!("{}-x{i}", c.id));
                            c.label = format!("{} {i}", c.label);
                            c
                        })
                    }));
                }
            }
            SessionCommand::CriteriaInstalled { criteria }
        }
        SessionCommand::DefinitionsInstalled {
            criterion_id,
            mut definitions,
        } => {
            match rng.random_range(0..3) {
                0 => {
                    definitions.pop();
                }
                1 => definitions[0].flavor = Flavor::UserAuthored,
                _ => definitions[1].id = definitions[0].id.clone(),
            }
            SessionCommand::DefinitionsInstalled {
                criterion_id,
                definitions,
            }
        }
        other => other,
    }
}
