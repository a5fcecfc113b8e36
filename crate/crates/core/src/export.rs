//! Criteria documents: the active criteria of a session grouped by tier.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::session::{CriterionId, CriterionOrigin, DecisionFraming, DecisionSession, PhaseKind, Tier};
use crate::store::to_canonical_json;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    Json,
    Markdown,
}

impl std::str::FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ExportFormat::Json),
            "markdown" | "md" => Ok(ExportFormat::Markdown),
            other => Err(format!("unknown export format {other:?} (expected json or markdown)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportedCriterion {
    pub id: CriterionId,
    pub label: String,
    pub tier: Tier,
    pub origin: CriterionOrigin,
    pub introduced_round: u32,
    pub selected_definitions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriteriaExport {
    pub framing: DecisionFraming,
    pub finished: bool,
    /// The round the session is in, which is the finishing round once finished.
    pub round: u32,
    pub phase: PhaseKind,
    pub criteria: Vec<ExportedCriterion>,
}

impl CriteriaExport {
    /// Active criteria only, ordered by tier then session order.
    pub fn from_session(session: &DecisionSession) -> Self {
        let mut criteria: Vec<ExportedCriterion> = session
            .active_criteria()
            .map(|c| ExportedCriterion {
                id: c.id.clone(),
                label: c.label.clone(),
                tier: c.tier,
                origin: c.origin,
                introduced_round: c.introduced_round,
                selected_definitions: c.selected_definitions().map(|d| d.text.clone()).collect(),
            })
            .collect();
        criteria.sort_by_key(|c| c.tier.rank());
        CriteriaExport {
            framing: session.framing.clone(),
            finished: session.is_finished(),
            round: session.phase.round,
            phase: session.phase.kind,
            criteria,
        }
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(self)
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::from("# Decision criteria\n\n");
        let decision = if self.framing.decision_text.is_empty() {
            "_Not yet described_"
        } else {
            &self.framing.decision_text
        };
        let _ = writeln!(out, "**Decision:** {decision}\n");
        if !self.framing.ideal_qualities_text.is_empty() {
            let _ = writeln!(out, "**Ideal qualities:** {}\n", self.framing.ideal_qualities_text);
        }
        let status = if self.finished {
            format!("Finished after round {}", self.round)
        } else {
            format!("Draft (round {}, {})", self.round, self.phase)
        };
        let _ = writeln!(out, "**Status:** {status}");

        let sections = [
            (Tier::MustHave, "Must-haves"),
            (Tier::ShouldHave, "Should-haves"),
            (Tier::CouldHave, "Could-haves"),
            (Tier::Unassigned, "Unassigned"),
        ];
        for (tier, title) in sections {
            let in_tier: Vec<&ExportedCriterion> = self.criteria.iter().filter(|c| c.tier == tier).collect();
            if tier == Tier::Unassigned && in_tier.is_empty() {
                continue;
            }
            let _ = writeln!(out, "\n## {title}\n");
            if in_tier.is_empty() {
                out.push_str("_None_\n");
            }
            for c in in_tier {
                let _ = writeln!(out, "- {}", c.label);
                for d in &c.selected_definitions {
                    let _ = writeln!(out, "  - {d}");
                }
            }
        }
        out
    }

    pub fn render(&self, format: ExportFormat) -> String {
        match format {
            ExportFormat::Json => self.to_json(),
            ExportFormat::Markdown => self.to_markdown(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::session::{
        Criterion, Definition, DefinitionId, Flavor, OptionCard, OptionId, OptionOrigin, OptionStatus,
        SessionConfig, Strategy,
    };

    /// The figure's admissions example, finished after one round with
    /// research acumen as a must-have.
    fn finished_fixture() -> DecisionSession {
        let mut s = DecisionSession::create("fig".into(), SessionConfig::default()).unwrap();
        s.submit_framing("Which PhD applicants to admit?", "curious, strong researchers")
            .unwrap();
        s.install_options(
            (1..=8)
                .map(|i| OptionCard {
                    id: OptionId(format!("r1-o{i:02}")),
                    text: format!("You admit applicant {i}"),
                    origin: OptionOrigin::Generated,
                    round: 1,
                    status: OptionStatus::Undecided,
                    strategy: Strategy::AssumptionTest,
                })
                .collect(),
        )
        .unwrap();
        for i in 1..=3 {
            s.toggle_option(&OptionId(format!("r1-o{i:02}")), OptionStatus::Kept).unwrap();
        }
        s.confirm_narrowing().unwrap();
        let labels = ["research acumen", "curiosity", "communication skills"];
        s.install_criteria(
            labels
                .iter()
                .enumerate()
                .map(|(i, l)| Criterion {
                    id: CriterionId(format!("c1-{:02}", i + 1)),
                    label: l.to_string(),
                    origin: CriterionOrigin::Inferred,
                    tier: Tier::Unassigned,
                    active: true,
                    definitions: Vec::new(),
                    introduced_round: 1,
                })
                .collect(),
        )
        .unwrap();
        for (i, tier) in [Tier::MustHave, Tier::ShouldHave, Tier::ShouldHave].iter().enumerate() {
            s.set_tier(&CriterionId(format!("c1-{:02}", i + 1)), *tier).unwrap();
        }
        s.confirm_prioritization().unwrap();
        let texts = [
            "published work",
            "research communication",
            "experimental design",
            "statistics expertise",
            "storytelling",
            "project management",
            "literature reviewing",
            "programming",
        ];
        for i in 1..=3 {
            let cid = CriterionId(format!("c1-{i:02}"));
            let defs = texts
                .iter()
                .enumerate()
                .map(|(j, t)| Definition {
                    id: DefinitionId(format!("{cid}.d1-{:02}", j + 1)),
                    text: if i == 1 { t.to_string() } else { format!("{t} ({i})") },
                    flavor: if j < 4 { Flavor::Common } else { Flavor::Provocative },
                    selected: false,
                })
                .collect();
            s.install_definitions(&cid, defs).unwrap();
        }
        let cid = CriterionId("c1-01".into());
        s.select_definitions(
            &cid,
            vec![DefinitionId("c1-01.d1-01".into()), DefinitionId("c1-01.d1-03".into())],
            vec![],
        )
        .unwrap();
        s.confirm_redefinition(true).unwrap();
        s
    }

    #[test]
    fn markdown_groups_by_tier() {
        let md = CriteriaExport::from_session(&finished_fixture()).to_markdown();
        let must = md.find("## Must-haves").unwrap();
        let should = md.find("## Should-haves").unwrap();
        let research = md.find("- research acumen\n  - published work\n  - experimental design\n").unwrap();
        assert!(must < research && research < should);
        assert!(md.contains("## Could-haves\n\n_None_\n"));
        assert!(!md.contains("Unassigned"));
        assert!(md.contains("**Status:** Finished after round 1"));
    }

    #[test]
    fn empty_session_is_a_draft_with_empty_sections() {
        let s = DecisionSession::create("e".into(), SessionConfig::default()).unwrap();
        let export = CriteriaExport::from_session(&s);
        assert!(!export.finished);
        assert!(export.criteria.is_empty());
        let md = export.to_markdown();
        assert_eq!(md.matches("_None_").count(), 3);
        assert!(md.contains("**Status:** Draft (round 1, describing)"));
    }

    #[test]
    fn json_round_trips() {
        let export = CriteriaExport::from_session(&finished_fixture());
        let parsed: CriteriaExport = serde_json::from_str(&export.to_json()).unwrap();
        assert_eq!(parsed, export);
        assert_eq!(parsed.criteria[0].selected_definitions, ["published work", "experimental design"]);
    }

    #[test]
    fn format_parses() {
        assert_eq!("json".parse::<ExportFormat>().unwrap(), ExportFormat::Json);
        assert_eq!("markdown".parse::<ExportFormat>().unwrap(), ExportFormat::Markdown);
        assert!("pdf".parse::<ExportFormat>().is_err());
    }
}
