use std::path::PathBuf;

use super::*;
use crate::engine::RecordedSession;
use crate::generation::Generator;
use crate::session::{PhaseKind, SessionConfig, Tier};
use crate::store::SessionFile;
use crate::testkit::{self, CommandFuzzer};

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Load a recorded fixture, checking it still matches a fresh scripted run.
/// `UPDATE_FIXTURES=1` rewrites it instead.
fn fixture(name: &str, rounds: u32) -> RecordedSession {
    let fresh = testkit::scripted_run(&Generator::stub(7), rounds, true);
    let path = fixture_path(name);
    if std::env::var_os("UPDATE_FIXTURES").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, SessionFile::from_recorded(&fresh).to_canonical_string()).unwrap();
    }
    let recorded = crate::store::load_file(&path).unwrap();
    assert_eq!(recorded.log(), fresh.log(), "{name} drifted; rerun with UPDATE_FIXTURES=1");
    recorded
}

fn created(seq: u64) -> SessionEvent {
    SessionEvent::new(
        seq,
        SessionCommand::SessionCreated {
            session_id: "s".into(),
            config: SessionConfig::default(),
        },
    )
}

#[test]
fn append_enforces_dense_seqs() {
    let mut log = SessionLog::new();
    log.append(created(1)).unwrap();
    assert_eq!(log.len(), 1);
    assert_eq!(log.append(created(1)), Err(HistoryError::SeqGap { len: 1, got: 1 }));
    let mut three = testkit::scripted_run(&Generator::stub(1), 1, true).log().prefix(3);
    assert_eq!(three.append(created(5)), Err(HistoryError::SeqGap { len: 3, got: 5 }));
    assert_eq!(three.len(), 3);
}

#[test]
fn replay_reproduces_live_state() {
    for rounds in 1..=3 {
        let rec = testkit::scripted_run(&Generator::stub(rounds as u64), rounds, true);
        assert_eq!(&replay(rec.log()).unwrap(), rec.session());
    }
}

#[test]
fn replay_round_trips_fuzzed_sessions() {
    let mut fuzzer = CommandFuzzer::new(9);
    let mut rec = RecordedSession::create("f".into(), SessionConfig::default()).unwrap();
    for _ in 0..1500 {
        if rec.session().is_finished() {
            assert_eq!(&replay(rec.log()).unwrap(), rec.session());
            rec = RecordedSession::create("f".into(), SessionConfig::default()).unwrap();
        }
        let command = fuzzer.next_command(rec.session());
        let _ = rec.execute(command);
    }
    assert_eq!(&replay(rec.log()).unwrap(), rec.session());
}

#[test]
fn options_before_framing_is_corrupt() {
    let rec = testkit::scripted_run(&Generator::stub(1), 1, true);
    let events = rec.log().events();
    let install = events
        .iter()
        .find(|e| e.kind() == "options_installed")
        .unwrap()
        .command
        .clone();
    let mut log = SessionLog::new();
    log.append(events[0].clone()).unwrap();
    log.append(SessionEvent::new(2, install)).unwrap();
    match replay(&log) {
        Err(HistoryError::CorruptLog { seq: 2, reason }) => assert!(reason.starts_with("wrong-phase")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn log_must_start_with_creation() {
    assert!(matches!(replay(&SessionLog::new()), Err(HistoryError::CorruptLog { seq: 1, .. })));
    let mut log = SessionLog::new();
    log.append(SessionEvent::new(1, SessionCommand::NarrowingConfirmed)).unwrap();
    assert!(matches!(replay(&log), Err(HistoryError::CorruptLog { seq: 1, .. })));
}

#[test]
fn branch_before_redefinition_confirmed() {
    let parent = testkit::scripted_run(&Generator::stub(2), 2, true);
    let before = parent.clone();
    let at = parent
        .log()
        .events()
        .iter()
        .find(|e| e.kind() == "redefinition_confirmed")
        .unwrap()
        .seq
        - 1;
    let child = parent.branch(at, "child".into()).unwrap();
    assert_eq!(child.session().phase.kind, PhaseKind::Redefining);
    assert_eq!(child.session().id.as_str(), "child");
    assert_eq!(child.session().lineage.parent_session_id, Some(parent.session().id.clone()));
    assert_eq!(child.session().lineage.branch_point_seq, Some(at));
    assert_eq!(child.log().len(), at + 1);
    assert_eq!(child.log().last().unwrap().kind(), "session_branched");
    assert_eq!(parent, before);
    assert_eq!(&replay(child.log()).unwrap(), child.session());
}

#[test]
fn branch_at_end_is_exact_fork() {
    let parent = testkit::scripted_run(&Generator::stub(2), 1, false);
    let child = parent.branch(parent.log().len(), "fork".into()).unwrap();
    let mut expected = parent.session().clone();
    expected.id = "fork".into();
    expected.lineage.parent_session_id = Some(parent.session().id.clone());
    expected.lineage.branch_point_seq = Some(parent.log().len());
    expected.event_seq += 1;
    assert_eq!(child.session(), &expected);
}

#[test]
fn bad_branch_points() {
    let rec = testkit::scripted_run(&Generator::stub(2), 1, true);
    let len = rec.log().len();
    for at in [0, len + 1] {
        assert_eq!(
            rec.branch(at, "x".into()).unwrap_err(),
            HistoryError::BadBranchPoint { at_seq: at, len }
        );
    }
}

#[test]
fn branches_evolve_independently() {
    let parent = testkit::scripted_run(&Generator::stub(3), 1, false);
    let parent_replay = replay(parent.log()).unwrap();
    let mut child = parent.branch(parent.log().len(), "c".into()).unwrap();
    let mut fuzzer = CommandFuzzer::new(1);
    let mut applied = 0;
    while applied < 10 {
        let command = fuzzer.next_command(child.session());
        if child.execute(command).is_ok() {
            applied += 1;
        }
    }
    assert_eq!(replay(parent.log()).unwrap(), parent_replay);
    assert_eq!(&parent_replay, parent.session());
}

#[test]
fn summary_of_one_round_fixture() {
    let rec = fixture("one_round.json", 1);
    let summary = summarize(rec.log()).unwrap();
    assert_eq!(summary.phase, PhaseKind::Finished);
    assert_eq!(summary.rounds.len(), 1);
    let r1 = &summary.rounds[0];
    assert_eq!(
        (r1.round, r1.options_generated, r1.options_kept, r1.options_removed),
        (1, 8, 3, 5)
    );
    assert_eq!(r1.criteria_inferred, 6);
    assert_eq!(r1.criteria_removed, 2);
    assert!(r1.criteria_carried.is_empty());
    assert_eq!(r1.definitions_installed, 4 * 8);
    assert_eq!(r1.definitions_selected, 4 * 2);
    assert_eq!(summary.activity.len() as u64, rec.log().len());
    assert_eq!(summary, summarize(rec.log()).unwrap());
}

#[test]
fn two_round_fixture_carries_criteria() {
    let rec = fixture("two_round.json", 2);
    let session = rec.session();
    assert_eq!(session.phase.round, 2);
    let carried: Vec<_> = session.active_criteria().filter(|c| c.introduced_round == 1).collect();
    assert_eq!(carried.len(), 4);

    let summary = summarize(rec.log()).unwrap();
    let r2 = &summary.rounds[1];
    assert_eq!(r2.round, 2);
    assert_eq!(r2.criteria_carried.len(), 4);
    assert!(r2.criteria_carried.iter().all(|c| c.introduced_round == 1));
    assert_eq!(r2.criteria_retiered, 1);
    let retiered = summary
        .timeline
        .iter()
        .find(|t| t.tier_changes.len() == 2)
        .expect("one carried criterion moved a tier");
    assert_eq!(retiered.tier_changes[0].from, Tier::Unassigned);
    assert_eq!(retiered.tier_changes[1].round, 2);
    assert_eq!(retiered.tier_changes[0].to, retiered.tier_changes[1].from);
}

#[test]
fn retier_must_to_could_is_in_timeline() {
    let mut rec = testkit::scripted_run(&Generator::stub(4), 1, false);
    let mut log = rec.log().clone();
    // Rewind to prioritizing of round 1 and move a must-have to could-have.
    let confirm = log
        .events()
        .iter()
        .find(|e| e.kind() == "prioritization_confirmed")
        .unwrap()
        .seq;
    log = log.prefix(confirm - 1);
    rec = RecordedSession::from_log(log).unwrap();
    let must = rec
        .session()
        .active_criteria()
        .find(|c| c.tier == Tier::MustHave)
        .unwrap()
        .id
        .clone();
    rec.execute(SessionCommand::TierSet {
        criterion_id: must.clone(),
        tier: Tier::CouldHave,
    })
    .unwrap();
    let summary = summarize(rec.log()).unwrap();
    let t = summary.timeline.iter().find(|t| t.id == must).unwrap();
    let last = t.tier_changes.last().unwrap();
    assert_eq!((last.from, last.to), (Tier::MustHave, Tier::CouldHave));
    assert_eq!(summary.rounds[0].criteria_retiered, 1);
}

#[test]
fn summary_flags_actors() {
    let rec = fixture("one_round.json", 1);
    let summary = summarize(rec.log()).unwrap();
    let actor = |kind: &str| summary.activity.iter().find(|a| a.kind == kind).unwrap().actor;
    assert_eq!(actor("options_installed"), Actor::System);
    assert_eq!(actor("option_toggled"), Actor::User);
    assert_eq!(actor("session_created"), Actor::System);
}

#[test]
fn event_wire_form() {
    let event = SessionEvent::new(4, SessionCommand::NarrowingConfirmed);
    let value = serde_json::to_value(&event).unwrap();
    assert_eq!(value["kind"], "narrowing_confirmed");
    assert!(value.get("payload").is_none());
    let back: SessionEvent = serde_json::from_value(value).unwrap();
    assert_eq!(back, event);

    let toggled = serde_json::json!({
        "seq": 5,
        "timestamp": "2026-01-01T00:00:00Z",
        "kind": "option_toggled",
        "payload": {"option_id": "r1-o01", "status": "kept"}
    });
    let event: SessionEvent = serde_json::from_value(toggled.clone()).unwrap();
    assert_eq!(serde_json::to_value(&event).unwrap(), toggled);

    let mut extra = toggled;
    extra["surprise"] = 1.into();
    assert!(serde_json::from_value::<SessionEvent>(extra).is_err());
}

#[test]
fn timestamps_do_not_affect_equality() {
    let a = SessionEvent::new(2, SessionCommand::NarrowingConfirmed);
    let mut b = a.clone();
    b.timestamp += chrono::Duration::days(3);
    assert_eq!(a, b);
}

#[test]
fn corrupt_seq_order_on_load() {
    let rec = testkit::scripted_run(&Generator::stub(1), 1, true);
    let mut events = rec.log().events().to_vec();
    events.swap(2, 3);
    assert!(matches!(
        SessionLog::from_events(events),
        Err(HistoryError::CorruptLog { seq: 4, .. })
    ));
}
