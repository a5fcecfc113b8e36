//! Deterministic provider for tests, demos, and simulation.
//!
//! Responses are filled from a bundled phrase bank of admissions-style
//! concepts. Each concept has a keyword that appears in every option phrase
//! and criterion label built from it, so whatever concepts a person keeps in
//! their options resurface in the inferred criteria labels.

use sha2::{Digest, Sha256};

use super::provider::{
    FlavorQuota, Provider, ProviderError, ProviderRequest, ProviderResponse, TaskKind,
};
use crate::session::Strategy;
use crate::text::normalize;

pub struct Concept {
    pub keyword: &'static str,
    /// Extra words in a framing that evoke this concept.
    pub cues: &'static [&'static str],
    pub strong: &'static [&'static str],
    pub weak: &'static [&'static str],
    pub labels: &'static [&'static str],
    pub common: &'static [&'static str],
    pub provocative: &'static [&'static str],
}

pub static PHRASE_BANK: &[Concept] = &[
    Concept {
        keyword: "research",
        cues: &["researcher", "scholar", "publication"],
        strong: &["a strong research record", "two first-author research papers"],
        weak: &["limited prior research experience", "no research output yet"],
        labels: &["research acumen", "alignment with faculty research", "strong research credentials"],
        common: &["published work", "research communication", "experimental design", "statistics expertise"],
        provocative: &["storytelling", "project management", "literature reviewing", "programming"],
    },
    Concept {
        keyword: "curiosity",
        cues: &["curious", "inquisitive"],
        strong: &["visible intellectual curiosity", "a curiosity that spans several fields"],
        weak: &["little curiosity beyond the syllabus", "curiosity that fades after coursework"],
        labels: &["curiosity", "intellectual curiosity"],
        common: &["asks probing questions", "reads beyond assigned material", "pursues side projects", "seeks out feedback"],
        provocative: &["comfort with being wrong", "tolerance for dead ends", "questions the advisor's framing", "interest in people, not just problems"],
    },
    Concept {
        keyword: "learn",
        cues: &["growth", "potential", "coachable"],
        strong: &["evidence they learn new methods quickly", "a steep learning trajectory"],
        weak: &["a slow start when they learn new tools", "uneven learning across courses"],
        labels: &["potential to learn", "learning agility"],
        common: &["improves after feedback", "picks up new methods", "grade trajectory", "self-taught skills"],
        provocative: &["willingness to unlearn", "learning from failure in public", "asking for help early", "learning outside their field"],
    },
    Concept {
        keyword: "technical",
        cues: &["engineering", "coding", "skills"],
        strong: &["a deep technical background", "strong technical skills in machine learning"],
        weak: &["a thin technical background", "shaky technical fundamentals"],
        labels: &["technical background", "technical depth"],
        common: &["coursework in methods", "software engineering", "math preparation", "tool fluency"],
        provocative: &["knowing when not to build", "technical taste", "debugging stamina", "explaining tradeoffs"],
    },
    Concept {
        keyword: "communication",
        cues: &["writing", "presenting", "articulate"],
        strong: &["excellent communication in interviews", "polished written communication"],
        weak: &["uneven communication in writing", "halting communication under questioning"],
        labels: &["communication skills", "clarity of communication"],
        common: &["clear writing", "presentation skills", "listening", "concise emails"],
        provocative: &["disagreeing gracefully", "writing for outsiders", "silence in meetings", "persuading skeptics"],
    },
    Concept {
        keyword: "industry",
        cues: &["company", "startup", "practical", "applied"],
        strong: &["excellent networking skills and industry connections", "years of industry experience"],
        weak: &["no industry exposure", "industry experience unrelated to the program"],
        labels: &["industry potential", "industry relevance"],
        common: &["internships", "professional network", "product experience", "applied impact"],
        provocative: &["leaving academia early", "commercial instincts", "sponsor appeal", "impatience with theory"],
    },
    Concept {
        keyword: "interdisciplinary",
        cues: &["complementary", "cross-field", "breadth"],
        strong: &["an interdisciplinary background in design and psychology", "interdisciplinary training across two departments"],
        weak: &["little interdisciplinary exposure", "an interdisciplinary record without depth"],
        labels: &["interdisciplinary appeal", "interdisciplinary reach"],
        common: &["double major", "cross-department projects", "methods from other fields", "broad reading"],
        provocative: &["belonging nowhere", "translating between camps", "unclear home department", "novelty over rigor"],
    },
    Concept {
        keyword: "mentorship",
        cues: &["mentor", "advisor", "supervision"],
        strong: &["glowing references about their mentorship of juniors", "a history of peer mentorship"],
        weak: &["no experience with mentorship", "a preference to avoid mentorship roles"],
        labels: &["mentorship fit", "openness to mentorship"],
        common: &["advisor match", "takes direction well", "mentors others", "regular check-ins"],
        provocative: &["needs little mentorship", "mentorship across labs", "pushing back on advisors", "mentoring the advisor"],
    },
    Concept {
        keyword: "teamwork",
        cues: &["team", "collaborative", "collaboration"],
        strong: &["a record of teamwork on large projects", "praise for teamwork in hackathons"],
        weak: &["struggles with teamwork in group settings", "little teamwork on record"],
        labels: &["teamwork", "collaborative teamwork"],
        common: &["shares credit", "reliable teammate", "coordinates tasks", "resolves conflict"],
        provocative: &["works best alone", "challenges group consensus", "carries weaker teammates", "teamwork as politics"],
    },
    Concept {
        keyword: "leadership",
        cues: &["lead", "leader", "initiative"],
        strong: &["leadership of a student organization", "leadership of a funded outreach program"],
        weak: &["no leadership roles", "leadership that ended in conflict"],
        labels: &["leadership potential", "leadership experience"],
        common: &["led a team", "sets direction", "takes initiative", "organizes events"],
        provocative: &["leading without a title", "knowing when to follow", "unpopular decisions", "leadership as service"],
    },
    Concept {
        keyword: "funding",
        cues: &["fellowship", "grant", "scholarship", "money"],
        strong: &["external funding already secured", "a fellowship that brings its own funding"],
        weak: &["no outside funding", "funding that expires after one year"],
        labels: &["funding independence", "funding outlook"],
        common: &["fellowship holder", "grant writing", "self-funded", "department cost"],
        provocative: &["money buys freedom", "funding as a signal of privilege", "sponsor strings attached", "cheap but risky"],
    },
    Concept {
        keyword: "diversity",
        cues: &["diverse", "perspective", "background", "underrepresented"],
        strong: &["a background that adds diversity to the cohort", "lived experience that brings diversity of thought"],
        weak: &["little added diversity of perspective", "a profile that mirrors the cohort's lack of diversity"],
        labels: &["diversity of perspective", "cohort diversity"],
        common: &["different life path", "first-generation student", "new viewpoints", "community ties"],
        provocative: &["discomfort they create", "questions nobody asks", "outsider status", "disagreement as value"],
    },
    Concept {
        keyword: "resilience",
        cues: &["grit", "perseverance", "hardship"],
        strong: &["resilience through a difficult personal path", "resilience after a failed first project"],
        weak: &["untested resilience under setbacks", "resilience questioned by a referee"],
        labels: &["resilience", "resilience under pressure"],
        common: &["recovers from setbacks", "steady under deadlines", "keeps commitments", "handles criticism"],
        provocative: &["quitting the wrong thing early", "asking for extensions", "resilience as stubbornness", "rest as strategy"],
    },
    Concept {
        keyword: "teaching",
        cues: &["teach", "tutor", "instructor"],
        strong: &["teaching awards as an undergraduate assistant", "years of teaching in a bootcamp"],
        weak: &["no teaching experience", "poor teaching evaluations"],
        labels: &["teaching ability", "teaching potential"],
        common: &["classroom experience", "clear explanations", "course design", "student evaluations"],
        provocative: &["teaching as research", "patience with beginners", "unscripted lectures", "learning by teaching"],
    },
    Concept {
        keyword: "creativity",
        cues: &["creative", "original", "novel", "groundbreaking"],
        strong: &["striking creativity in a design portfolio", "a groundbreaking, creativity-driven research interest"],
        weak: &["a conventional portfolio with little creativity", "creativity limited to class assignments"],
        labels: &["creativity", "creativity in problem framing"],
        common: &["original ideas", "unusual methods", "artistic work", "reframes problems"],
        provocative: &["ideas nobody funds", "creativity over fit", "breaking lab conventions", "productive weirdness"],
    },
    Concept {
        keyword: "independence",
        cues: &["independent", "self-directed", "autonomy"],
        strong: &["a self-directed independence on past projects", "independence shown in a solo thesis"],
        weak: &["limited independence, relying heavily on supervisors", "independence never tested"],
        labels: &["independence of thought", "working independence"],
        common: &["self-directed projects", "sets own goals", "works unsupervised", "own research agenda"],
        provocative: &["ignores advice", "independence from the lab's agenda", "lonely productivity", "forking the project"],
    },
];

const GENERIC_COMMON: &[&str] = &[
    "consistent {label}",
    "demonstrated {label}",
    "{label} that references vouch for",
    "measurable {label}",
    "{label} over several years",
    "{label} in coursework",
    "{label} in prior roles",
    "recent {label}",
];

const GENERIC_PROVOCATIVE: &[&str] = &[
    "{label} when no one is watching",
    "{label} at the expense of speed",
    "{label} as the program defines it",
    "{label} that looks like a weakness",
    "{label} that makes the cohort uncomfortable",
    "{label} without credentials",
    "{label} that might fade",
    "{label} traded for raw potential",
];

/// Pure function of (request, seed).
#[derive(Debug, Clone, Copy)]
pub struct StubProvider {
    seed: u64,
}

impl StubProvider {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn respond(&self, request: &ProviderRequest) -> ProviderResponse {
        let lines = match request.task {
            TaskKind::Options => self.options(request),
            TaskKind::Criteria => self.criteria(request),
            TaskKind::Definitions => self.definitions(request),
        };
        let raw: String = lines
            .iter()
            .enumerate()
            .map(|(i, line)| format!("{}. {}\n", i + 1, line))
            .collect();
        ProviderResponse::new(raw)
    }

    fn hash(&self, request: &ProviderRequest, salt: &str, index: usize) -> u64 {
        let mut hasher = Sha256::new();
        hasher.update(self.seed.to_le_bytes());
        hasher.update(request.task.as_str().as_bytes());
        hasher.update(request.attempt.to_le_bytes());
        hasher.update(request.instruction.as_bytes());
        hasher.update(salt.as_bytes());
        hasher.update((index as u64).to_le_bytes());
        let digest = hasher.finalize();
        let mut bytes = [0u8; 8];
        bytes.copy_from_slice(&digest[..8]);
        u64::from_le_bytes(bytes)
    }

    fn pick<'a>(&self, request: &ProviderRequest, salt: &str, index: usize, from: &'a [&'a str]) -> &'a str {
        from[(self.hash(request, salt, index) % from.len() as u64) as usize]
    }

    fn concept_at(&self, request: &ProviderRequest, salt: &str, index: usize) -> &'static Concept {
        &PHRASE_BANK[(self.hash(request, salt, index) % PHRASE_BANK.len() as u64) as usize]
    }

    fn options(&self, request: &ProviderRequest) -> Vec<String> {
        let framing = normalize(&request.cues.join(" "));
        let evoked: Vec<&Concept> = PHRASE_BANK
            .iter()
            .filter(|c| framing.contains(c.keyword) || c.cues.iter().any(|cue| framing.contains(cue)))
            .collect();
        (0..request.expected_count as usize)
            .map(|i| {
                let slot = request.slots.get(i);
                let strategy = slot.map_or(Strategy::AssumptionTest, |s| s.strategy);
                let targets: &[String] = slot.map_or(&[], |s| s.targets.as_slice());
                let a = match evoked.as_slice() {
                    [] => self.concept_at(request, "a", i),
                    evoked => evoked[(self.hash(request, "evoked", i) % evoked.len() as u64) as usize],
                };
                let mut b = self.concept_at(request, "b", i);
                if std::ptr::eq(a, b) {
                    b = &PHRASE_BANK[(PHRASE_BANK.iter().position(|c| std::ptr::eq(c, a)).unwrap() + 1) % PHRASE_BANK.len()];
                }
                let a_strong = self.pick(request, "as", i, a.strong);
                let a_weak = self.pick(request, "aw", i, a.weak);
                let b_strong = self.pick(request, "bs", i, b.strong);
                let b_weak = self.pick(request, "bw", i, b.weak);
                let variant = self.hash(request, "variant", i) % 4;
                match (strategy, targets) {
                    (Strategy::Align, [t, ..]) => match variant % 2 {
                        0 => format!("You admit a candidate whose {t} is unmistakable and who also brings {b_strong}."),
                        _ => format!("You admit a candidate who exemplifies {t} despite {b_weak}."),
                    },
                    (Strategy::Challenge, [t, ..]) => match variant % 2 {
                        0 => format!("You admit a candidate with {b_strong} even though their {t} is doubtful."),
                        _ => format!("You turn down a candidate with outstanding {t} in favor of one with {b_strong}."),
                    },
                    (Strategy::EdgeCase, [t1, t2, ..]) => match variant % 2 {
                        0 => format!("You admit a candidate who is exceptional on {t1} but weak on {t2}, and who shows {b_strong}."),
                        _ => format!("You pick between a candidate who maxes out {t2} while sacrificing {t1}, and one who offers {b_strong} instead."),
                    },
                    (Strategy::EdgeCase, [t]) => {
                        format!("You admit a candidate with an extreme degree of {t} and {b_weak}.")
                    }
                    _ => match variant {
                        0 => format!("You admit a candidate with {a_strong} but {b_weak}."),
                        1 => format!("You prioritize a candidate with {b_strong} over one with {a_strong}."),
                        2 => format!("You pass on a candidate with {a_strong} because of {b_weak}."),
                        _ => format!("You admit a candidate with {a_weak} but {b_strong}."),
                    },
                }
            })
            .collect()
    }

    fn criteria(&self, request: &ProviderRequest) -> Vec<String> {
        let avoid: Vec<String> = request.avoid.iter().map(|a| normalize(a)).collect();
        let kept = normalize(&request.cues.join(" "));
        let mut salient: Vec<(usize, usize, &Concept)> = PHRASE_BANK
            .iter()
            .filter_map(|c| {
                let count = kept.matches(c.keyword).count();
                (count > 0).then(|| (count, kept.find(c.keyword).unwrap_or(usize::MAX), c))
            })
            .collect();
        salient.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));

        let mut out: Vec<String> = Vec::new();
        let want = request.expected_count as usize;
        let push_from = |concept: &Concept, out: &mut Vec<String>| {
            if let Some(label) = concept
                .labels
                .iter()
                .find(|l| !avoid.contains(&normalize(l)) && !out.iter().any(|o| normalize(o) == normalize(l)))
            {
                out.push(label.to_string());
            }
        };
        for (_, _, concept) in &salient {
            if out.len() == want {
                break;
            }
            push_from(concept, &mut out);
        }
        let start = (self.hash(request, "filler", 0) % PHRASE_BANK.len() as u64) as usize;
        for offset in 0..PHRASE_BANK.len() {
            if out.len() >= want {
                break;
            }
            push_from(&PHRASE_BANK[(start + offset) % PHRASE_BANK.len()], &mut out);
        }
        out
    }

    fn definitions(&self, request: &ProviderRequest) -> Vec<String> {
        let label = request.cues.first().cloned().unwrap_or_default();
        let key = normalize(&label);
        let concept = PHRASE_BANK
            .iter()
            .find(|c| c.labels.iter().any(|l| normalize(l) == key))
            .or_else(|| PHRASE_BANK.iter().find(|c| key.contains(c.keyword)));
        let avoid: Vec<String> = request.avoid.iter().map(|a| normalize(a)).collect();
        let fill = |templates: &[&str]| -> Vec<String> {
            templates.iter().map(|t| t.replace("{label}", &label)).collect()
        };
        let mut common: Vec<String> = concept
            .map(|c| c.common.iter().map(|s| s.to_string()).collect())
            .unwrap_or_default();
        let mut provocative: Vec<String> = concept
            .map(|c| c.provocative.iter().map(|s| s.to_string()).collect())
            .unwrap_or_default();
        self.shuffle(request, "common", &mut common);
        self.shuffle(request, "provocative", &mut provocative);
        common.extend(fill(GENERIC_COMMON));
        provocative.extend(fill(GENERIC_PROVOCATIVE));
        common.retain(|t| !avoid.contains(&normalize(t)));
        provocative.retain(|t| !avoid.contains(&normalize(t)));

        let total = request.expected_count as usize;
        let quota = request.quota.unwrap_or(FlavorQuota {
            common: 0,
            provocative: 0,
        });
        let provocative_count = (quota.provocative as usize)
            .max(total.saturating_sub(total / 2))
            .min(total.saturating_sub(quota.common as usize));
        let common_count = total - provocative_count;
        common
            .into_iter()
            .take(common_count)
            .map(|t| format!("[common] {t}"))
            .chain(
                provocative
                    .into_iter()
                    .take(provocative_count)
                    .map(|t| format!("[provocative] {t}")),
            )
            .collect()
    }

    fn shuffle(&self, request: &ProviderRequest, salt: &str, items: &mut [String]) {
        // Fisher-Yates keyed by the request hash.
        for i in (1..items.len()).rev() {
            let j = (self.hash(request, salt, i) % (i as u64 + 1)) as usize;
            items.swap(i, j);
        }
    }
}

impl Provider for StubProvider {
    fn name(&self) -> &str {
        "stub"
    }

    fn complete(&self, request: &ProviderRequest) -> Result<ProviderResponse, ProviderError> {
        Ok(self.respond(request))
    }
}
