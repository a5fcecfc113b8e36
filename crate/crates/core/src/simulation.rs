//! Scripted people with hidden keyword preferences, driven through the full
//! loop against the stub provider. Recovery (how many hidden keywords end up
//! in the criteria) is the convergence metric.
//!
//! Matching is keyword-based: a keyword matches a text when its normalized
//! form is a substring of the normalized text.

use serde::{Deserialize, Serialize};

use crate::engine::{self, EngineError, RecordedSession};
use crate::generation::Generator;
use crate::session::{
    DecisionSession, OptionId, OptionStatus, PhaseKind, ProviderKind,
    SessionCommand, SessionConfig, SessionError, SessionId, Tier,
};
use crate::text::normalize;

const DECISION_TEXT: &str = "Which PhD applicants should our lab admit this cycle?";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedKeyword {
    pub keyword: String,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeepPolicy {
    /// Keep the `keep_target` best-scoring options.
    #[default]
    TopK,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreferenceProfile {
    pub hidden_keywords: Vec<WeightedKeyword>,
    /// `[should, must]`: a criterion whose matched weight reaches `must` is a
    /// must-have, reaching `should` a should-have, otherwise a could-have.
    pub tier_thresholds: [f64; 2],
    #[serde(default)]
    pub keep_policy: KeepPolicy,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProfileError {
    #[error("weight {weight} of {keyword:?} is outside [0, 1]")]
    WeightOutOfRange { keyword: String, weight: String },
    #[error("keyword {0:?} is empty or repeated")]
    BadKeyword(String),
    #[error("tier thresholds must satisfy 0 <= should < must")]
    Thresholds,
}

impl PreferenceProfile {
    pub fn new(keywords: &[(&str, f64)], thresholds: [f64; 2]) -> Self {
        let mut profile = PreferenceProfile {
            hidden_keywords: keywords
                .iter()
                .map(|(k, w)| WeightedKeyword {
                    keyword: k.to_string(),
                    weight: *w,
                })
                .collect(),
            tier_thresholds: thresholds,
            keep_policy: KeepPolicy::TopK,
        };
        profile.sort();
        profile
    }

    /// Order keywords by weight, heaviest first (stable for ties).
    pub fn sort(&mut self) {
        self.hidden_keywords
            .sort_by(|a, b| b.weight.partial_cmp(&a.weight).unwrap_or(std::cmp::Ordering::Equal));
    }

    /// An empty keyword list is accepted as a degenerate profile.
    pub fn validate(&self) -> Result<(), ProfileError> {
        let mut seen = std::collections::HashSet::new();
        for k in &self.hidden_keywords {
            if !(0.0..=1.0).contains(&k.weight) {
                return Err(ProfileError::WeightOutOfRange {
                    keyword: k.keyword.clone(),
                    weight: k.weight.to_string(),
                });
            }
            let key = normalize(&k.keyword);
            if key.is_empty() || !seen.insert(key) {
                return Err(ProfileError::BadKeyword(k.keyword.clone()));
            }
        }
        let [should, must] = self.tier_thresholds;
        if !(should >= 0.0 && should < must) {
            return Err(ProfileError::Thresholds);
        }
        Ok(())
    }

    /// Sum of the weights of keywords occurring in `text`.
    pub fn score(&self, text: &str) -> f64 {
        let text = normalize(text);
        self.hidden_keywords
            .iter()
            .filter(|k| text.contains(&normalize(&k.keyword)))
            .map(|k| k.weight)
            .sum()
    }

    fn tier_for(&self, weight: f64) -> Tier {
        let [should, must] = self.tier_thresholds;
        if weight >= must {
            Tier::MustHave
        } else if weight >= should {
            Tier::ShouldHave
        } else {
            Tier::CouldHave
        }
    }
}

/// Score of one option card under `profile`.
pub fn score_option(profile: &PreferenceProfile, card: &crate::session::OptionCard) -> f64 {
    profile.score(&card.text)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleStyle {
    /// Only reacts to generated content.
    #[default]
    Passive,
    /// Also adds one criterion per round named after its heaviest keyword
    /// not yet covered by an active label.
    Assertive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub rounds_run: u32,
    /// Fraction of hidden keywords matched at finish.
    pub recovery: f64,
    /// Recovery at the end of each round.
    pub trajectory: Vec<f64>,
    pub matched_keywords: Vec<String>,
    pub final_criteria: Vec<String>,
    pub seed: u64,
    pub style: OracleStyle,
    pub config: SessionConfig,
}

#[derive(Debug, thiserror::Error)]
pub enum SimulationError {
    #[error("invalid profile: {0}")]
    Profile(#[from] ProfileError),
    #[error("rounds must be at least 1")]
    NoRounds,
    #[error("simulation requires the stub provider")]
    ExternalProvider,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl From<SessionError> for SimulationError {
    fn from(e: SessionError) -> Self {
        SimulationError::Engine(e.into())
    }
}

/// Keywords matched by an active label or a selected definition.
pub fn matched_keywords(profile: &PreferenceProfile, session: &DecisionSession) -> Vec<String> {
    let texts: Vec<&str> = session
        .active_criteria()
        .flat_map(|c| std::iter::once(c.label.as_str()).chain(c.selected_definitions().map(|d| d.text.as_str())))
        .collect();
    profile
        .hidden_keywords
        .iter()
        .filter(|k| texts.iter().any(|t| matches(k, t)))
        .map(|k| k.keyword.clone())
        .collect()
}

pub fn recovery(profile: &PreferenceProfile, session: &DecisionSession) -> f64 {
    if profile.hidden_keywords.is_empty() {
        return 0.0;
    }
    matched_keywords(profile, session).len() as f64 / profile.hidden_keywords.len() as f64
}

/// Drive one session for exactly `rounds` rounds. Deterministic in its inputs.
pub fn run_simulation(
    profile: &PreferenceProfile,
    config: &SessionConfig,
    rounds: u32,
    seed: u64,
    style: OracleStyle,
) -> Result<SimulationReport, SimulationError> {
    profile.validate()?;
    if rounds == 0 {
        return Err(SimulationError::NoRounds);
    }
    if config.provider != ProviderKind::Stub {
        return Err(SimulationError::ExternalProvider);
    }
    let config = SessionConfig {
        seed,
        ..config.clone()
    };
    let generator = Generator::stub(seed);
    let mut rec = RecordedSession::create(SessionId(format!("sim-{seed}")), config.clone())?;
    let mut trajectory = Vec::with_capacity(rounds as usize);

    loop {
        engine::fulfill(&mut rec, &generator)?;
        let session = rec.session();
        let round = session.phase.round;
        let commands = match session.phase.kind {
            PhaseKind::Describing => vec![SessionCommand::FramingSubmitted {
                decision_text: DECISION_TEXT.into(),
                ideal_qualities_text: ideal_qualities(profile),
            }],
            PhaseKind::Narrowing => narrow(profile, session),
            PhaseKind::Prioritizing => prioritize(profile, session, style),
            PhaseKind::Redefining => {
                let mut commands = select(profile, session);
                let mut preview = session.clone();
                for c in &commands {
                    preview.apply(c)?;
                }
                trajectory.push(recovery(profile, &preview));
                commands.push(SessionCommand::confirm_redefinition(round >= rounds));
                commands
            }
            PhaseKind::Finished => break,
            awaiting => unreachable!("fulfill leaves no {awaiting} phase"),
        };
        for command in commands {
            rec.execute(command)?;
        }
    }

    let session = rec.session();
    Ok(SimulationReport {
        rounds_run: session.phase.round,
        recovery: recovery(profile, session),
        trajectory,
        matched_keywords: matched_keywords(profile, session),
        final_criteria: session.active_criteria().map(|c| c.label.clone()).collect(),
        seed,
        style,
        config,
    })
}

/// The person states their qualities vaguely: the heaviest keyword only.
fn ideal_qualities(profile: &PreferenceProfile) -> String {
    match profile.hidden_keywords.first() {
        Some(k) => format!("Applicants with real {} and room to grow.", k.keyword),
        None => "Applicants who will thrive here.".into(),
    }
}

fn narrow(profile: &PreferenceProfile, session: &DecisionSession) -> Vec<SessionCommand> {
    let mut scored: Vec<(f64, &OptionId)> = session
        .current_options()
        .iter()
        .map(|c| (score_option(profile, c), &c.id))
        .collect();
    // Highest score first; ties go to the lower card id.
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then_with(|| a.1.cmp(b.1)));
    let keep = session.config.keep_target as usize;
    let mut commands: Vec<SessionCommand> = scored
        .iter()
        .enumerate()
        .map(|(i, (_, id))| SessionCommand::OptionToggled {
            option_id: (*id).clone(),
            status: if i < keep {
                OptionStatus::Kept
            } else {
                OptionStatus::Removed
            },
        })
        .collect();
    commands.push(SessionCommand::NarrowingConfirmed);
    commands
}

fn prioritize(profile: &PreferenceProfile, session: &DecisionSession, style: OracleStyle) -> Vec<SessionCommand> {
    let mut commands = Vec::new();
    let mut preview = session.clone();
    if style == OracleStyle::Assertive {
        let uncovered = profile
            .hidden_keywords
            .iter()
            .find(|k| !session.active_criteria().any(|c| matches(k, &c.label)));
        if let Some(k) = uncovered {
            let add = SessionCommand::CriterionAdded {
                label: k.keyword.clone(),
            };
            if preview.apply(&add).is_ok() {
                commands.push(add);
            }
        }
    }
    for c in preview.active_criteria() {
        let weight = profile.score(&c.label)
            + c.selected_definitions().map(|d| profile.score(&d.text)).sum::<f64>();
        commands.push(SessionCommand::TierSet {
            criterion_id: c.id.clone(),
            tier: profile.tier_for(weight),
        });
    }
    commands.push(SessionCommand::PrioritizationConfirmed);
    commands
}

fn select(profile: &PreferenceProfile, session: &DecisionSession) -> Vec<SessionCommand> {
    session
        .active_criteria()
        .map(|c| SessionCommand::DefinitionsSelected {
            criterion_id: c.id.clone(),
            selected_ids: c
                .definitions
                .iter()
                .filter(|d| d.selected || profile.hidden_keywords.iter().any(|k| matches(k, &d.text)))
                .map(|d| d.id.clone())
                .collect(),
            custom_texts: Vec::new(),
        })
        .collect()
}

fn matches(keyword: &WeightedKeyword, text: &str) -> bool {
    normalize(text).contains(&normalize(&keyword.keyword))
}
