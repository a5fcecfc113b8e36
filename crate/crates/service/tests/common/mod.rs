//! A real server on an ephemeral port plus a small JSON client.
#![allow(dead_code)]

use std::sync::Arc;
use std::time::{Duration, Instant};

use criteria_core::session::{DecisionSession, ProviderKind, SessionCommand};
use criteria_core::store::SessionStore;
use criteria_core::testkit;
use criteria_service::AppState;
use reqwest::StatusCode;
use serde_json::{json, Value};

pub struct TestServer {
    pub base: String,
    pub client: reqwest::Client,
    pub dir: tempfile::TempDir,
    pub state: Arc<AppState>,
}

impl TestServer {
    pub async fn start(seed: u64) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let store = SessionStore::open(dir.path()).unwrap();
        let state = Arc::new(AppState::new(store, ProviderKind::Stub, seed, None));
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
        let base = format!("http://{}/api/v1", listener.local_addr().unwrap());
        let router = criteria_service::router(state.clone());
        tokio::spawn(async move { axum::serve(listener, router).await.unwrap() });
        TestServer {
            base,
            client: reqwest::Client::new(),
            dir,
            state,
        }
    }

    pub async fn send(&self, method: reqwest::Method, path: &str, body: Option<Value>) -> (StatusCode, Value) {
        let mut request = self.client.request(method, format!("{}{path}", self.base));
        if let Some(body) = body {
            request = request.json(&body);
        }
        let response = request.send().await.unwrap();
        let status = response.status();
        let text = response.text().await.unwrap();
        let value = serde_json::from_str(&text).unwrap_or(Value::String(text));
        (status, value)
    }

    pub async fn post(&self, path: &str, body: Value) -> (StatusCode, Value) {
        self.send(reqwest::Method::POST, path, Some(body)).await
    }

    pub async fn get(&self, path: &str) -> (StatusCode, Value) {
        self.send(reqwest::Method::GET, path, None).await
    }

    pub async fn get_text(&self, path: &str) -> (StatusCode, String) {
        let response = self.client.get(format!("{}{path}", self.base)).send().await.unwrap();
        (response.status(), response.text().await.unwrap())
    }

    pub async fn create(&self, config: Value) -> String {
        let (status, body) = self.post("/sessions", json!({ "config": config })).await;
        assert_eq!(status, StatusCode::CREATED, "{body}");
        body["id"].as_str().unwrap().to_string()
    }

    /// Poll until the session leaves its `awaiting_*` phases.
    pub async fn settle(&self, id: &str) -> Value {
        let deadline = Instant::now() + Duration::from_secs(30);
        loop {
            let (status, body) = self.get(&format!("/sessions/{id}")).await;
            assert_eq!(status, StatusCode::OK, "{body}");
            if body["generation"]["status"] == "failed" {
                panic!("generation failed: {body}");
            }
            if body["awaiting"] == false && body["generation"]["status"] == "idle" {
                return body;
            }
            assert!(Instant::now() < deadline, "session {id} never settled: {body}");
            tokio::time::sleep(Duration::from_millis(5)).await;
        }
    }

    /// Issue one session command through its HTTP route.
    pub async fn command(&self, id: &str, command: &SessionCommand) -> (StatusCode, Value) {
        let (path, body) = route_for(command);
        self.post(&format!("/sessions/{id}{path}"), body).await
    }

    /// Drive the scripted person over HTTP until finished after `rounds`.
    pub async fn scripted_loop(&self, id: &str, rounds: u32) -> Value {
        loop {
            let view = self.settle(id).await;
            if view["phase"]["kind"] == "finished" {
                return view;
            }
            let session: DecisionSession = serde_json::from_value(view).unwrap();
            for command in testkit::scripted_step(&session, rounds, true).unwrap() {
                let (status, body) = self.command(id, &command).await;
                assert_eq!(status, StatusCode::OK, "{command:?}: {body}");
            }
        }
    }
}

pub fn route_for(command: &SessionCommand) -> (String, Value) {
    match command {
        SessionCommand::FramingSubmitted {
            decision_text,
            ideal_qualities_text,
        } => (
            "/framing".into(),
            json!({"decision_text": decision_text, "ideal_qualities_text": ideal_qualities_text}),
        ),
        SessionCommand::OptionToggled { option_id, status } => {
            (format!("/options/{option_id}/status"), json!({ "status": status }))
        }
        SessionCommand::CustomOptionAdded { text } => ("/options".into(), json!({ "text": text })),
        SessionCommand::NarrowingConfirmed => ("/narrowing/confirm".into(), json!({})),
        SessionCommand::TierSet { criterion_id, tier } => {
            (format!("/criteria/{criterion_id}/tier"), json!({ "tier": tier }))
        }
        SessionCommand::CriterionAdded { label } => ("/criteria".into(), json!({ "label": label })),
        SessionCommand::CriterionRemoved { criterion_id } => (format!("/criteria/{criterion_id}/remove"), json!({})),
        SessionCommand::PrioritizationConfirmed => ("/prioritization/confirm".into(), json!({})),
        SessionCommand::DefinitionsSelected {
            criterion_id,
            selected_ids,
            custom_texts,
        } => (
            format!("/criteria/{criterion_id}/definitions"),
            json!({"selected_ids": selected_ids, "custom_texts": custom_texts}),
        ),
        SessionCommand::RedefinitionConfirmed => ("/redefinition/confirm".into(), json!({"finish": false})),
        SessionCommand::SessionFinished => ("/redefinition/confirm".into(), json!({"finish": true})),
        other => panic!("{} has no person-facing route", other.kind()),
    }
}
