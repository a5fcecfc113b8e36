use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::context::{CriterionSummary, GenerationContext};
use crate::session::Strategy;

/// One card's brief: how it should provoke and which criteria it is aimed at.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanSlot {
    pub strategy: Strategy,
    pub targets: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyPlan {
    pub round: u32,
    pub slots: Vec<PlanSlot>,
}

impl StrategyPlan {
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn count(&self, strategy: Strategy) -> usize {
        self.slots.iter().filter(|s| s.strategy == strategy).count()
    }

    /// Checks the plan's shape for a round of `expected_len` cards.
    pub fn is_valid_for(&self, round: u32, expected_len: usize) -> bool {
        if self.round != round || self.slots.len() != expected_len {
            return false;
        }
        if round == 1 {
            self.slots.iter().all(|s| s.strategy == Strategy::AssumptionTest)
        } else {
            [Strategy::Align, Strategy::Challenge, Strategy::EdgeCase]
                .iter()
                .all(|s| self.count(*s) >= 1)
                && self.count(Strategy::AssumptionTest) == 0
                && self.count(Strategy::None) == 0
        }
    }
}

/// Assign a strategy and targets to every card of the coming round.
///
/// Round 1 tests the framing's assumptions on every card. Later rounds cycle
/// align / challenge / edge_case (so each appears at least once when there
/// are three or more slots), shuffled by the seed. Align and challenge cards
/// walk the active criteria one at a time; edge cases walk criterion pairs,
/// most tier-distant pairs first.
pub fn plan_strategies(context: &GenerationContext, seed: u64) -> StrategyPlan {
    let n = context.limits.options_per_round as usize;
    if context.round <= 1 {
        return StrategyPlan {
            round: context.round,
            slots: vec![
                PlanSlot {
                    strategy: Strategy::AssumptionTest,
                    targets: Vec::new(),
                };
                n
            ],
        };
    }

    const CYCLE: [Strategy; 3] = [Strategy::Align, Strategy::Challenge, Strategy::EdgeCase];
    let mut strategies: Vec<Strategy> = (0..n).map(|i| CYCLE[i % CYCLE.len()]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ u64::from(context.round).rotate_left(32));
    strategies.shuffle(&mut rng);

    let mut criteria: Vec<&CriterionSummary> = context.active_criteria.iter().collect();
    criteria.sort_by_key(|c| c.tier.rank());
    let pairs = competing_pairs(&criteria);

    let mut single_cursor = 0;
    let mut pair_cursor = 0;
    let slots = strategies
        .into_iter()
        .map(|strategy| {
            let targets = match strategy {
                Strategy::EdgeCase if !pairs.is_empty() => {
                    let (a, b) = pairs[pair_cursor % pairs.len()];
                    pair_cursor += 1;
                    vec![a.label.clone(), b.label.clone()]
                }
                _ if !criteria.is_empty() => {
                    let c = criteria[single_cursor % criteria.len()];
                    single_cursor += 1;
                    vec![c.label.clone()]
                }
                _ => Vec::new(),
            };
            PlanSlot { strategy, targets }
        })
        .collect();
    StrategyPlan {
        round: context.round,
        slots,
    }
}

/// Unordered criterion pairs, widest tier gap first (must × could before
/// must × should before same-tier), ties in criterion order.
fn competing_pairs<'a>(criteria: &[&'a CriterionSummary]) -> Vec<(&'a CriterionSummary, &'a CriterionSummary)> {
    let mut pairs = Vec::new();
    for (i, a) in criteria.iter().enumerate() {
        for b in &criteria[i + 1..] {
            pairs.push((*a, *b));
        }
    }
    pairs.sort_by_key(|(a, b)| std::cmp::Reverse(a.tier.rank().abs_diff(b.tier.rank())));
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generation::context::Limits;
    use crate::session::{DecisionFraming, Strategy, Tier};
    use proptest::prelude::*;

    fn context(round: u32, criteria: &[(&str, Tier)], n: u32) -> GenerationContext {
        GenerationContext {
            framing: DecisionFraming::default(),
            round,
            verdicts: Vec::new(),
            active_criteria: criteria
                .iter()
                .enumerate()
                .map(|(i, (label, tier))| CriterionSummary {
                    id: format!("c{i}").into(),
                    label: label.to_string(),
                    tier: *tier,
                    selected_definitions: Vec::new(),
                })
                .collect(),
            removed_criteria: Vec::new(),
            prior_definition_rejections: Default::default(),
            limits: Limits {
                options_per_round: n,
                max_inferred_criteria: 6,
                definitions_per_criterion: 8,
            },
        }
    }

    #[test]
    fn first_round_tests_assumptions() {
        let plan = plan_strategies(&context(1, &[], 8), 42);
        assert_eq!(plan.len(), 8);
        assert!(plan.slots.iter().all(|s| s.strategy == Strategy::AssumptionTest));
        assert!(plan.is_valid_for(1, 8));
    }

    #[test]
    fn later_rounds_mix_all_three() {
        let ctx = context(
            2,
            &[
                ("research acumen", Tier::MustHave),
                ("curiosity", Tier::ShouldHave),
                ("technical background", Tier::CouldHave),
                ("communication skills", Tier::CouldHave),
            ],
            8,
        );
        let plan = plan_strategies(&ctx, 42);
        assert!(plan.count(Strategy::Align) >= 1);
        assert!(plan.count(Strategy::Challenge) >= 1);
        assert!(plan.count(Strategy::EdgeCase) >= 1);
        assert!(plan.is_valid_for(2, 8));
    }

    #[test]
    fn edge_case_targets_the_pair() {
        let ctx = context(2, &[("A", Tier::MustHave), ("B", Tier::CouldHave)], 8);
        let plan = plan_strategies(&ctx, 3);
        let edges: Vec<&PlanSlot> = plan
            .slots
            .iter()
            .filter(|s| s.strategy == Strategy::EdgeCase)
            .collect();
        assert!(!edges.is_empty());
        for slot in edges {
            assert_eq!(slot.targets, ["A", "B"]);
        }
    }

    #[test]
    fn edge_cases_prefer_distant_tiers() {
        let ctx = context(
            2,
            &[
                ("m", Tier::MustHave),
                ("s", Tier::ShouldHave),
                ("c", Tier::CouldHave),
            ],
            3,
        );
        let plan = plan_strategies(&ctx, 0);
        let edge = plan
            .slots
            .iter()
            .find(|s| s.strategy == Strategy::EdgeCase)
            .unwrap();
        assert_eq!(edge.targets, ["m", "c"]);
    }

    #[test]
    fn singles_are_distinct_until_exhausted() {
        let labels = ["a", "b", "c", "d", "e", "f"];
        let criteria: Vec<(&str, Tier)> = labels.iter().map(|l| (*l, Tier::ShouldHave)).collect();
        let plan = plan_strategies(&context(3, &criteria, 8), 9);
        let singles: Vec<&str> = plan
            .slots
            .iter()
            .filter(|s| s.strategy != Strategy::EdgeCase)
            .map(|s| s.targets[0].as_str())
            .collect();
        let distinct: std::collections::HashSet<_> = singles.iter().collect();
        assert_eq!(distinct.len(), singles.len().min(labels.len()));
    }

    proptest! {
        #[test]
        fn plans_are_deterministic_and_valid(
            round in 2u32..6,
            n in 3u32..12,
            seed in any::<u64>(),
            k in 1usize..7,
        ) {
            let criteria: Vec<(String, Tier)> = (0..k)
                .map(|i| (format!("crit {i}"), [Tier::MustHave, Tier::ShouldHave, Tier::CouldHave][i % 3]))
                .collect();
            let refs: Vec<(&str, Tier)> = criteria.iter().map(|(l, t)| (l.as_str(), *t)).collect();
            let ctx = context(round, &refs, n);
            let plan = plan_strategies(&ctx, seed);
            prop_assert!(plan.is_valid_for(round, n as usize));
            prop_assert_eq!(plan, plan_strategies(&ctx, seed));
        }
    }
}
