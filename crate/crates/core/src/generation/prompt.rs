//! Prompt templates (shipped as text files under `prompts/`) and the
//! requests built from them.

use super::context::{CriterionSummary, GenerationContext, OptionSummary};
use super::plan::PlanSlot;
use super::provider::{FlavorQuota, ProviderRequest, ResponseFormat, TaskKind};
use crate::session::Strategy;

pub const OPTIONS_TEMPLATE: &str = include_str!("../../prompts/options.txt");
pub const CRITERIA_TEMPLATE: &str = include_str!("../../prompts/criteria.txt");
pub const DEFINITIONS_TEMPLATE: &str = include_str!("../../prompts/definitions.txt");

/// Replace every `{{key}}` in `template`. Unknown placeholders are left as-is.
pub fn render(template: &str, values: &[(&str, String)]) -> String {
    let mut out = template.to_string();
    for (key, value) in values {
        out = out.replace(&format!("{{{{{key}}}}}"), value);
    }
    out
}

fn bullet_list<'a>(items: impl IntoIterator<Item = &'a str>) -> String {
    let lines: Vec<String> = items.into_iter().map(|t| format!("- {t}")).collect();
    if lines.is_empty() {
        "(none)".to_string()
    } else {
        lines.join("\n")
    }
}

fn slot_brief(slot: &PlanSlot) -> String {
    match (slot.strategy, slot.targets.as_slice()) {
        (Strategy::AssumptionTest, _) => {
            "test an assumption hidden in how the person described the decision".to_string()
        }
        (Strategy::Align, [target, ..]) => format!("clearly satisfy the criterion \"{target}\""),
        (Strategy::Challenge, [target, ..]) => {
            format!("be attractive while running against the criterion \"{target}\"")
        }
        (Strategy::EdgeCase, [a, b, ..]) => format!(
            "sit at the unexplored intersection of \"{a}\" and \"{b}\", strong on one and weak on the other"
        ),
        (Strategy::EdgeCase, [a]) => format!("push the criterion \"{a}\" to an extreme"),
        (Strategy::Align, []) => "satisfy the person's stated criteria".to_string(),
        (Strategy::Challenge, []) => "run against the person's stated criteria".to_string(),
        (Strategy::EdgeCase, []) | (Strategy::None, _) => {
            "stress-test the person's criteria with an unusual case".to_string()
        }
    }
}

fn history_block(context: &GenerationContext) -> String {
    let mut lines = Vec::new();
    for verdict in &context.verdicts {
        let texts = |xs: &[OptionSummary]| xs.iter().map(|o| o.text.clone()).collect::<Vec<_>>();
        if !verdict.kept.is_empty() {
            lines.push(format!("Round {} kept: {}", verdict.round, texts(&verdict.kept).join(" | ")));
        }
        if !verdict.removed.is_empty() {
            lines.push(format!(
                "Round {} removed: {}",
                verdict.round,
                texts(&verdict.removed).join(" | ")
            ));
        }
    }
    for c in &context.active_criteria {
        let mut line = format!("Criterion \"{}\" ({})", c.label, c.tier.as_str());
        if !c.selected_definitions.is_empty() {
            line.push_str(&format!(", meaning: {}", c.selected_definitions.join("; ")));
        }
        lines.push(line);
    }
    if !context.removed_criteria.is_empty() {
        lines.push(format!("Rejected criteria: {}", context.removed_criteria.join("; ")));
    }
    if lines.is_empty() {
        String::new()
    } else {
        format!("What the person has told us so far:\n{}\n", lines.join("\n"))
    }
}

pub fn options_request(
    context: &GenerationContext,
    slots: &[PlanSlot],
    avoid: &[String],
    attempt: u32,
) -> ProviderRequest {
    let slot_lines: Vec<String> = slots
        .iter()
        .enumerate()
        .map(|(i, s)| format!("{}. {}", i + 1, slot_brief(s)))
        .collect();
    let instruction = render(
        OPTIONS_TEMPLATE,
        &[
            ("decision", context.framing.decision_text.clone()),
            ("ideal_qualities", context.framing.ideal_qualities_text.clone()),
            ("round", context.round.to_string()),
            ("history", history_block(context)),
            ("count", slots.len().to_string()),
            ("slots", slot_lines.join("\n")),
            ("avoid", bullet_list(avoid.iter().map(String::as_str))),
        ],
    );
    ProviderRequest {
        task: TaskKind::Options,
        instruction,
        expected_count: slots.len() as u32,
        format: ResponseFormat::NumberedList,
        attempt,
        cues: vec![
            context.framing.decision_text.clone(),
            context.framing.ideal_qualities_text.clone(),
        ],
        slots: slots.to_vec(),
        avoid: avoid.to_vec(),
        quota: None,
    }
}

pub fn criteria_request(
    context: &GenerationContext,
    count: u32,
    avoid: &[String],
    attempt: u32,
) -> ProviderRequest {
    let verdict = context.current_verdicts();
    let kept: Vec<&str> = verdict
        .map(|v| v.kept.iter().map(|o| o.text.as_str()).collect())
        .unwrap_or_default();
    let removed: Vec<&str> = verdict
        .map(|v| v.removed.iter().map(|o| o.text.as_str()).collect())
        .unwrap_or_default();
    let instruction = render(
        CRITERIA_TEMPLATE,
        &[
            ("decision", context.framing.decision_text.clone()),
            ("ideal_qualities", context.framing.ideal_qualities_text.clone()),
            ("round", context.round.to_string()),
            ("kept", bullet_list(kept.iter().copied())),
            ("removed", bullet_list(removed.iter().copied())),
            ("avoid", avoid.join("; ")),
            ("count", count.to_string()),
        ],
    );
    ProviderRequest {
        task: TaskKind::Criteria,
        instruction,
        expected_count: count,
        format: ResponseFormat::NumberedList,
        attempt,
        cues: kept.iter().map(|t| t.to_string()).collect(),
        slots: Vec::new(),
        avoid: avoid.to_vec(),
        quota: None,
    }
}

pub fn definitions_request(
    context: &GenerationContext,
    criterion: &CriterionSummary,
    count: u32,
    quota: FlavorQuota,
    avoid: &[String],
    attempt: u32,
) -> ProviderRequest {
    let quota_line = format!(
        "Include at least {} common and at least {} provocative definitions.",
        quota.common, quota.provocative
    );
    let instruction = render(
        DEFINITIONS_TEMPLATE,
        &[
            ("decision", context.framing.decision_text.clone()),
            ("criterion", criterion.label.clone()),
            ("tier", criterion.tier.as_str().to_string()),
            ("count", count.to_string()),
            ("quota", quota_line),
            ("avoid", avoid.join("; ")),
        ],
    );
    ProviderRequest {
        task: TaskKind::Definitions,
        instruction,
        expected_count: count,
        format: ResponseFormat::TaggedNumberedList,
        attempt,
        cues: vec![criterion.label.clone()],
        slots: Vec::new(),
        avoid: avoid.to_vec(),
        quota: Some(quota),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_fills_placeholders() {
        assert_eq!(
            render("a {{x}} b {{y}} {{x}}", &[("x", "1".into()), ("y", "2".into())]),
            "a 1 b 2 1"
        );
        assert_eq!(render("{{missing}}", &[]), "{{missing}}");
    }

    #[test]
    fn templates_only_use_known_placeholders() {
        let known = [
            "decision",
            "ideal_qualities",
            "round",
            "history",
            "count",
            "slots",
            "avoid",
            "kept",
            "removed",
            "criterion",
            "tier",
            "quota",
        ];
        for template in [OPTIONS_TEMPLATE, CRITERIA_TEMPLATE, DEFINITIONS_TEMPLATE] {
            let mut rest = template;
            while let Some(start) = rest.find("{{") {
                let end = rest[start..].find("}}").unwrap() + start;
                assert!(known.contains(&&rest[start + 2..end]), "{}", &rest[start..end]);
                rest = &rest[end + 2..];
            }
        }
    }
}
