mod common;

use common::TestServer;
use criteria_core::export::CriteriaExport;
use criteria_core::generation::Generator;
use criteria_core::testkit;
use reqwest::StatusCode;
use serde_json::json;

async fn narrowing(server: &TestServer) -> (String, serde_json::Value) {
    let id = server.create(json!({})).await;
    let (status, _) = server
        .post(
            &format!("/sessions/{id}/framing"),
            json!({"decision_text": testkit::DECISION_TEXT, "ideal_qualities_text": testkit::IDEAL_QUALITIES_TEXT}),
        )
        .await;
    assert_eq!(status, StatusCode::OK);
    let view = server.settle(&id).await;
    assert_eq!(view["phase"]["kind"], "narrowing");
    (id, view)
}

#[tokio::test(flavor = "multi_thread")]
async fn create_starts_describing() {
    let server = TestServer::start(0).await;
    let (status, body) = server.post("/sessions", json!({})).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(body["phase"]["kind"], "describing");
    assert_eq!(body["phase"]["round"], 1);
    assert_eq!(body["config"]["keep_target"], 3);
    assert!(server.dir.path().join(format!("{}.json", body["id"].as_str().unwrap())).exists());

    let (status, body) = server.send(reqwest::Method::POST, "/sessions", None).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
}

#[tokio::test(flavor = "multi_thread")]
async fn invalid_config_is_422() {
    let server = TestServer::start(0).await;
    let (status, body) = server.post("/sessions", json!({"config": {"keep_target": 9}})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "invalid-config");
    let (status, body) = server.post("/sessions", json!({"config": {"colour": "red"}})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "malformed-body");
}

#[tokio::test(flavor = "multi_thread")]
async fn wrong_keep_count_is_409_with_fields() {
    let server = TestServer::start(1).await;
    let (id, view) = narrowing(&server).await;
    for card in view["options"]["1"].as_array().unwrap().iter().take(2) {
        let (status, _) = server
            .post(
                &format!("/sessions/{id}/options/{}/status", card["id"].as_str().unwrap()),
                json!({"status": "kept"}),
            )
            .await;
        assert_eq!(status, StatusCode::OK);
    }
    let (_, before) = server.get(&format!("/sessions/{id}/events")).await;
    let (status, body) = server.post(&format!("/sessions/{id}/narrowing/confirm"), json!({})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "wrong-keep-count");
    assert_eq!(body["actual"], 2);
    assert_eq!(body["target"], 3);
    let (_, after) = server.get(&format!("/sessions/{id}/events")).await;
    assert_eq!(before, after);
}

#[tokio::test(flavor = "multi_thread")]
async fn error_statuses() {
    let server = TestServer::start(1).await;
    let (status, body) = server.get("/sessions/no-such-session").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["code"], "unknown-session");

    let (id, _) = narrowing(&server).await;
    let (status, body) = server
        .post(&format!("/sessions/{id}/options/r1-o99/status"), json!({"status": "kept"}))
        .await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["code"], "unknown-option");

    let (status, body) = server
        .post(&format!("/sessions/{id}/options/r1-o01/status"), json!({"status": "maybe"}))
        .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "malformed-body");

    let (status, body) = server.post(&format!("/sessions/{id}/options"), json!({"text": "  "})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "empty-text");

    let (status, body) = server.post(&format!("/sessions/{id}/prioritization/confirm"), json!({})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "wrong-phase");
    assert_eq!(body["phase"], "narrowing");

    let (status, body) = server.get_text(&format!("/sessions/{id}/export?format=pdf")).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{body}");
}

#[tokio::test(flavor = "multi_thread")]
async fn concurrent_toggles_serialize() {
    let server = std::sync::Arc::new(TestServer::start(2).await);
    let (id, view) = narrowing(&server).await;
    let (_, events) = server.get(&format!("/sessions/{id}/events")).await;
    let before = events["events"].as_array().unwrap().len();
    let cards: Vec<String> = view["options"]["1"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["id"].as_str().unwrap().to_string())
        .collect();
    let n = 64;
    let mut tasks = Vec::new();
    for i in 0..n {
        let server = server.clone();
        let path = format!("/sessions/{id}/options/{}/status", cards[i % cards.len()]);
        let status = if i % 2 == 0 { "kept" } else { "removed" };
        tasks.push(tokio::spawn(async move { server.post(&path, json!({ "status": status })).await.0 }));
    }
    for task in tasks {
        assert_eq!(task.await.unwrap(), StatusCode::OK);
    }
    let (_, events) = server.get(&format!("/sessions/{id}/events")).await;
    let events = events["events"].as_array().unwrap();
    assert_eq!(events.len(), before + n);
    for (i, e) in events.iter().enumerate() {
        assert_eq!(e["seq"], i as u64 + 1);
    }
    // The stored file agrees with memory.
    let stored = server.state.store().load(&id.as_str().into()).unwrap();
    assert_eq!(stored.log().len() as usize, events.len());
}

#[tokio::test(flavor = "multi_thread")]
async fn full_loop_matches_in_process_run() {
    let server = TestServer::start(7).await;
    let id = server.create(json!({})).await;
    let view = server.scripted_loop(&id, 2).await;
    assert_eq!(view["phase"]["round"], 2);

    let (status, exported) = server.get_text(&format!("/sessions/{id}/export?format=json")).await;
    assert_eq!(status, StatusCode::OK);
    let local = testkit::scripted_run(&Generator::stub(7), 2, true);
    assert_eq!(exported, CriteriaExport::from_session(local.session()).to_json());

    let (status, summary) = server.get(&format!("/sessions/{id}/summary")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(summary["rounds"][1]["criteria_carried"].as_array().unwrap().len(), 4);
}

#[tokio::test(flavor = "multi_thread")]
async fn branch_creates_independent_child() {
    let server = TestServer::start(3).await;
    let id = server.create(json!({})).await;
    server.scripted_loop(&id, 1).await;
    let (_, events) = server.get(&format!("/sessions/{id}/events")).await;
    let events = events["events"].as_array().unwrap().clone();
    let at = events.iter().find(|e| e["kind"] == "session_finished").unwrap()["seq"].as_u64().unwrap() - 1;

    let (status, child) = server.post(&format!("/sessions/{id}/branch"), json!({ "at_seq": at })).await;
    assert_eq!(status, StatusCode::CREATED, "{child}");
    assert_eq!(child["phase"]["kind"], "redefining");
    assert_eq!(child["lineage"]["parent_session_id"], id.as_str());
    let child_id = child["id"].as_str().unwrap().to_string();

    let (status, _) = server
        .post(&format!("/sessions/{child_id}/redefinition/confirm"), json!({"finish": false}))
        .await;
    assert_eq!(status, StatusCode::OK);
    let child = server.settle(&child_id).await;
    assert_eq!(child["phase"]["kind"], "narrowing");
    assert_eq!(child["phase"]["round"], 2);

    let (_, parent) = server.get(&format!("/sessions/{id}")).await;
    assert_eq!(parent["phase"]["kind"], "finished");
    let (_, after) = server.get(&format!("/sessions/{id}/events")).await;
    assert_eq!(after["events"].as_array().unwrap(), &events);

    let (status, body) = server.post(&format!("/sessions/{id}/branch"), json!({ "at_seq": 0 })).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "bad-branch-point");
}

#[tokio::test(flavor = "multi_thread")]
async fn sessions_reload_from_store() {
    let server = TestServer::start(4).await;
    let (id, view) = narrowing(&server).await;
    // A second server over the same directory sees the same state.
    let state = std::sync::Arc::new(criteria_service::AppState::new(
        criteria_core::store::SessionStore::open(server.dir.path()).unwrap(),
        criteria_core::session::ProviderKind::Stub,
        0,
        None,
    ));
    let slot = state.lock(&id.as_str().into()).await.unwrap();
    let fresh: serde_json::Value =
        serde_json::to_value(criteria_service::api::SessionView::of(&slot)).unwrap();
    assert_eq!(fresh, view);
}

#[tokio::test(flavor = "multi_thread")]
async fn external_without_provider_reports_502_on_retry() {
    let server = TestServer::start(0).await;
    let id = server.create(json!({"provider": "external"})).await;
    let (status, _) = server
        .post(
            &format!("/sessions/{id}/framing"),
            json!({"decision_text": "d", "ideal_qualities_text": "q"}),
        )
        .await;
    assert_eq!(status, StatusCode::OK);
    let deadline = std::time::Instant::now() + std::time::Duration::from_secs(10);
    loop {
        let (_, body) = server.get(&format!("/sessions/{id}")).await;
        if body["generation"]["status"] == "failed" {
            assert_eq!(body["generation"]["error"]["code"], "provider-failure");
            assert_eq!(body["phase"]["kind"], "awaiting_options");
            break;
        }
        assert!(std::time::Instant::now() < deadline);
        tokio::time::sleep(std::time::Duration::from_millis(5)).await;
    }
    let (status, body) = server.post(&format!("/sessions/{id}/generation/retry"), json!({})).await;
    assert_eq!(status, StatusCode::BAD_GATEWAY);
    assert_eq!(body["code"], "provider-failure");
}
