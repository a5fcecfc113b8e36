//! Engine for iteratively prototyping decision criteria.
//!
//! A person describes a decision, narrows generated option provocations,
//! prioritizes the criteria inferred from what they kept, picks what each
//! criterion actually means, and loops until the criteria set settles.
//!
//! * [`session`] holds the domain types and the pure state machine.
//! * [`generation`] produces options, criteria, and definitions through a
//!   language-model provider or the deterministic [`generation::StubProvider`].
//! * [`history`] is the append-only event log: replay, branching, summaries.
//! * [`engine`] glues generation onto a recorded session.
//! * [`store`] and [`export`] handle session files and criteria documents.
//! * [`simulation`] drives the loop with scripted users holding hidden preferences.

pub mod engine;
pub mod export;
pub mod generation;
pub mod history;
pub mod session;
pub mod simulation;
pub mod store;
mod text;

#[cfg(any(test, feature = "testkit"))]
pub mod testkit;

pub use engine::{EngineError, RecordedSession};
pub use generation::{GenerationContext, GenerationError, Generator};
pub use history::{HistoryError, SessionEvent, SessionLog};
pub use session::{
    Criterion, CriterionId, DecisionFraming, DecisionSession, Definition, DefinitionId, OptionCard,
    OptionId, Phase, PhaseKind, SessionCommand, SessionConfig, SessionError, SessionId, Tier,
};
pub use text::normalize;
