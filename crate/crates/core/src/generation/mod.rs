//! Options, criteria, and definitions produced through a [`Provider`].
//!
//! The [`Generator`] owns the count contracts session-core depends on: it
//! deduplicates, re-requests shortfalls (two re-requests per task), and
//! either returns exactly what was asked for or an error. Nothing here
//! touches a session.

mod context;
mod parse;
mod plan;
pub mod prompt;
mod provider;
mod stub;

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use context::{CriterionSummary, GenerationContext, Limits, OptionSummary, RoundVerdicts};
pub use parse::{parse_numbered_list, ListItem, ParseError, MAX_ITEM_CHARS};
pub use plan::{plan_strategies, PlanSlot, StrategyPlan};
pub use provider::{
    ExternalProvider, FlavorQuota, Provider, ProviderError, ProviderRequest, ProviderResponse,
    ResponseFormat, TaskKind, DEFAULT_TIMEOUT,
};
pub use stub::{Concept, StubProvider, PHRASE_BANK};

use crate::session::{
    Criterion, CriterionId, CriterionOrigin, Definition, DefinitionId, Flavor, OptionCard, OptionId,
    OptionOrigin, OptionStatus, Tier,
};
use crate::text::normalize;

pub const DEFAULT_RETRY_BUDGET: u32 = 2;
const MAX_LABEL_CHARS: usize = 80;
const MIN_PER_FLAVOR: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "kebab-case")]
pub enum GenerationError {
    #[error("{task:?} provider failed after {attempts} attempts: {message}")]
    ProviderFailure {
        task: TaskKind,
        attempts: u32,
        message: String,
    },
    #[error("{task:?} response unusable after {attempts} attempts: {reason}")]
    MalformedResponse {
        task: TaskKind,
        attempts: u32,
        reason: String,
    },
    #[error("criterion {criterion_id} is not active")]
    UnknownCriterion { criterion_id: CriterionId },
}

impl GenerationError {
    pub fn code(&self) -> &'static str {
        match self {
            GenerationError::ProviderFailure { .. } => "provider-failure",
            GenerationError::MalformedResponse { .. } => "malformed-response",
            GenerationError::UnknownCriterion { .. } => "unknown-criterion",
        }
    }
}

struct CriteriaState {
    avoid: Vec<String>,
    seen: HashSet<String>,
    labels: Vec<String>,
}

struct DefinitionState {
    seen: HashSet<String>,
    common: Vec<String>,
    provocative: Vec<String>,
}

enum Failure {
    Provider(String),
    Malformed(String),
}

#[derive(Clone)]
pub struct Generator {
    provider: Arc<dyn Provider>,
    seed: u64,
    retry_budget: u32,
}

impl std::fmt::Debug for Generator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Generator")
            .field("provider", &self.provider.name())
            .field("seed", &self.seed)
            .field("retry_budget", &self.retry_budget)
            .finish()
    }
}

impl Generator {
    pub fn new(provider: Arc<dyn Provider>, seed: u64) -> Self {
        Self {
            provider,
            seed,
            retry_budget: DEFAULT_RETRY_BUDGET,
        }
    }

    pub fn stub(seed: u64) -> Self {
        Self::new(Arc::new(StubProvider::new(seed)), seed)
    }

    pub fn with_retry_budget(mut self, retries: u32) -> Self {
        self.retry_budget = retries;
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn provider_name(&self) -> &str {
        self.provider.name()
    }

    pub fn plan_strategies(&self, context: &GenerationContext) -> StrategyPlan {
        plan_strategies(context, self.seed)
    }

    /// Call the provider until `absorb` reports the task satisfied, at most
    /// `1 + retry_budget` times. `absorb` sees only successfully parsed items.
    fn run<S>(
        &self,
        task: TaskKind,
        state: &mut S,
        build: impl Fn(&S, u32) -> ProviderRequest,
        absorb: impl Fn(&mut S, Vec<ListItem>) -> Result<(), String>,
    ) -> Result<(), GenerationError> {
        let attempts = self.retry_budget + 1;
        let mut last = Failure::Malformed("no attempt made".into());
        for attempt in 0..attempts {
            let request = build(state, attempt);
            let response = match self.provider.complete(&request) {
                Ok(r) => r,
                Err(e) => {
                    last = Failure::Provider(e.to_string());
                    continue;
                }
            };
            match response.parse() {
                Ok(items) => match absorb(state, items) {
                    Ok(()) => return Ok(()),
                    Err(shortfall) => last = Failure::Malformed(shortfall),
                },
                Err(e) => last = Failure::Malformed(e.to_string()),
            }
        }
        Err(match last {
            Failure::Provider(message) => GenerationError::ProviderFailure {
                task,
                attempts,
                message,
            },
            Failure::Malformed(reason) => GenerationError::MalformedResponse {
                task,
                attempts,
                reason,
            },
        })
    }

    /// Exactly one card per plan slot, texts distinct under normalization.
    pub fn generate_options(
        &self,
        context: &GenerationContext,
        plan: &StrategyPlan,
    ) -> Result<Vec<OptionCard>, GenerationError> {
        let wanted = plan.len();
        let mut state: (Vec<String>, HashSet<String>) = (Vec::with_capacity(wanted), HashSet::new());
        self.run(
            TaskKind::Options,
            &mut state,
            |(texts, _), attempt| {
                prompt::options_request(context, &plan.slots[texts.len()..], texts, attempt)
            },
            |(texts, seen), items| {
                for item in items {
                    if texts.len() == wanted {
                        break;
                    }
                    if seen.insert(normalize(&item.text)) {
                        texts.push(item.text);
                    }
                }
                if texts.len() == wanted {
                    Ok(())
                } else {
                    Err(format!("{} of {wanted} distinct options", texts.len()))
                }
            },
        )?;
        Ok(state
            .0
            .into_iter()
            .zip(&plan.slots)
            .enumerate()
            .map(|(i, (text, slot))| OptionCard {
                id: OptionId(format!("r{}-o{:02}", context.round, i + 1)),
                text,
                origin: OptionOrigin::Generated,
                round: context.round,
                status: OptionStatus::Undecided,
                strategy: slot.strategy,
            })
            .collect())
    }

    /// Up to `max_inferred_criteria` new criteria, none repeating an active or
    /// removed label, in provider order. At least one is required.
    pub fn infer_criteria(&self, context: &GenerationContext) -> Result<Vec<Criterion>, GenerationError> {
        let max = context.limits.max_inferred_criteria as usize;
        let avoid: Vec<String> = context
            .active_criteria
            .iter()
            .map(|c| c.label.clone())
            .chain(context.removed_criteria.iter().cloned())
            .collect();
        let seen: HashSet<String> = avoid.iter().map(|l| normalize(l)).collect();
        let mut state = CriteriaState {
            avoid,
            seen,
            labels: Vec::new(),
        };
        self.run(
            TaskKind::Criteria,
            &mut state,
            |s, attempt| prompt::criteria_request(context, max as u32, &s.avoid, attempt),
            |s, items| {
                let fresh: Vec<String> = items
                    .into_iter()
                    .map(|i| i.text)
                    .filter(|label| label.chars().count() <= MAX_LABEL_CHARS)
                    .filter(|label| s.seen.insert(normalize(label)))
                    .collect();
                if fresh.is_empty() {
                    return Err("no new criteria proposed".into());
                }
                s.labels.extend(fresh);
                s.labels.truncate(max);
                Ok(())
            },
        )?;
        Ok(state
            .labels
            .into_iter()
            .enumerate()
            .map(|(i, label)| Criterion {
                id: CriterionId(format!("c{}-{:02}", context.round, i + 1)),
                label,
                origin: CriterionOrigin::Inferred,
                tier: Tier::Unassigned,
                active: true,
                definitions: Vec::new(),
                introduced_round: context.round,
            })
            .collect())
    }

    /// Exactly `definitions_per_criterion` definitions with at least two
    /// common and two provocative ones, none repeating a meaning the person
    /// already selected.
    pub fn generate_definitions(
        &self,
        context: &GenerationContext,
        criterion_id: &CriterionId,
    ) -> Result<Vec<Definition>, GenerationError> {
        let criterion = context
            .criterion(criterion_id)
            .ok_or_else(|| GenerationError::UnknownCriterion {
                criterion_id: criterion_id.clone(),
            })?;
        let total = context.limits.definitions_per_criterion;
        let seen: HashSet<String> = criterion
            .selected_definitions
            .iter()
            .map(|t| normalize(t))
            .collect();
        let rejected = context
            .prior_definition_rejections
            .get(criterion_id)
            .cloned()
            .unwrap_or_default();
        let mut state = DefinitionState {
            seen,
            common: Vec::new(),
            provocative: Vec::new(),
        };

        self.run(
            TaskKind::Definitions,
            &mut state,
            |DefinitionState { common, provocative, .. }, attempt| {
                let have = (common.len() + provocative.len()) as u32;
                let quota = FlavorQuota {
                    common: MIN_PER_FLAVOR.saturating_sub(common.len() as u32),
                    provocative: MIN_PER_FLAVOR.saturating_sub(provocative.len() as u32),
                };
                let shortfall = total.saturating_sub(have).max(quota.common + quota.provocative);
                let avoid: Vec<String> = criterion
                    .selected_definitions
                    .iter()
                    .chain(&rejected)
                    .chain(common)
                    .chain(provocative)
                    .cloned()
                    .collect();
                prompt::definitions_request(context, criterion, shortfall, quota, &avoid, attempt)
            },
            |DefinitionState {
                 seen,
                 common,
                 provocative,
             },
             items| {
                for item in items {
                    if !seen.insert(normalize(&item.text)) {
                        continue;
                    }
                    match item.tag.as_deref() {
                        Some("provocative") => provocative.push(item.text),
                        _ => common.push(item.text),
                    }
                }
                let enough = common.len() as u32 >= MIN_PER_FLAVOR
                    && provocative.len() as u32 >= MIN_PER_FLAVOR
                    && (common.len() + provocative.len()) as u32 >= total;
                if enough {
                    Ok(())
                } else {
                    Err(format!(
                        "{} common and {} provocative definitions, need {total} with at least {MIN_PER_FLAVOR} of each",
                        common.len(),
                        provocative.len()
                    ))
                }
            },
        )?;

        let picked = pick_with_quota(&state.common, &state.provocative, total as usize);
        Ok(picked
            .into_iter()
            .enumerate()
            .map(|(i, (text, flavor))| Definition {
                id: DefinitionId(format!("{criterion_id}.d{}-{:02}", context.round, i + 1)),
                text,
                flavor,
                selected: false,
            })
            .collect())
    }
}

/// Take `total` items, commons first then provocatives, reserving room for
/// at least `MIN_PER_FLAVOR` of each. Callers guarantee enough of both.
fn pick_with_quota(common: &[String], provocative: &[String], total: usize) -> Vec<(String, Flavor)> {
    let min = MIN_PER_FLAVOR as usize;
    let provocative_count = provocative.len().min(total - min).max(min);
    let common_count = total - provocative_count;
    common
        .iter()
        .take(common_count)
        .map(|t| (t.clone(), Flavor::Common))
        .chain(
            provocative
                .iter()
                .take(provocative_count)
                .map(|t| (t.clone(), Flavor::Provocative)),
        )
        .collect()
}
