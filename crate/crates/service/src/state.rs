//! Sessions held in memory, one exclusive guard each, persisted to the store
//! after every accepted command.

use std::collections::HashMap;
use std::sync::Arc;

use criteria_core::engine::{self, RecordedSession};
use criteria_core::generation::{ExternalProvider, GenerationError, Generator, Provider, ProviderError, TaskKind};
use criteria_core::session::{DecisionSession, ProviderKind, SessionCommand, SessionConfig, SessionId};
use criteria_core::store::{self, SessionStore, StoreError};
use serde::Serialize;
use tokio::sync::{Mutex, OwnedMutexGuard};

use crate::error::ApiError;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GenerationStatus {
    #[default]
    Idle,
    Running,
    Failed { error: GenerationError },
}

#[derive(Debug)]
pub struct Slot {
    pub recorded: RecordedSession,
    pub generation: GenerationStatus,
}

pub type SlotHandle = Arc<Mutex<Slot>>;

pub struct AppState {
    store: SessionStore,
    default_provider: ProviderKind,
    default_seed: u64,
    external: Option<Arc<ExternalProvider>>,
    sessions: std::sync::Mutex<HashMap<SessionId, SlotHandle>>,
}

impl AppState {
    pub fn new(
        store: SessionStore,
        default_provider: ProviderKind,
        default_seed: u64,
        external: Option<ExternalProvider>,
    ) -> Self {
        Self {
            store,
            default_provider,
            default_seed,
            external: external.map(Arc::new),
            sessions: Default::default(),
        }
    }

    pub fn default_config(&self) -> SessionConfig {
        SessionConfig {
            provider: self.default_provider,
            seed: self.default_seed,
            ..SessionConfig::default()
        }
    }

    pub fn store(&self) -> &SessionStore {
        &self.store
    }

    /// The generator a session's config asks for.
    pub fn generator(&self, config: &SessionConfig) -> Generator {
        match (config.provider, &self.external) {
            (ProviderKind::Stub, _) => Generator::stub(config.seed),
            (ProviderKind::External, Some(p)) => Generator::new(p.clone() as Arc<dyn Provider>, config.seed),
            (ProviderKind::External, None) => Generator::new(Arc::new(Unconfigured), config.seed),
        }
    }

    /// The session's slot, loading it from the store on first use.
    pub fn slot(&self, id: &SessionId) -> Result<SlotHandle, ApiError> {
        if let Some(slot) = self.sessions.lock().unwrap().get(id) {
            return Ok(slot.clone());
        }
        let recorded = self.store.load(id).map_err(|e| match e {
            StoreError::NotFound(_) => ApiError::UnknownSession(id.clone()),
            other => other.into(),
        })?;
        let mut sessions = self.sessions.lock().unwrap();
        // Another request may have loaded it meanwhile; keep the first.
        Ok(sessions
            .entry(id.clone())
            .or_insert_with(|| {
                Arc::new(Mutex::new(Slot {
                    recorded,
                    generation: GenerationStatus::Idle,
                }))
            })
            .clone())
    }

    /// Register a new session, persist it and return its slot.
    pub fn insert(&self, recorded: RecordedSession) -> Result<SlotHandle, ApiError> {
        let id = recorded.session().id.clone();
        if !store::is_safe_id(&id) {
            return Err(ApiError::BadRequest(format!("session id {id:?} is not usable")));
        }
        self.store.save(&recorded)?;
        let slot = Arc::new(Mutex::new(Slot {
            recorded,
            generation: GenerationStatus::Idle,
        }));
        self.sessions.lock().unwrap().insert(id, slot.clone());
        Ok(slot)
    }

    pub async fn lock(&self, id: &SessionId) -> Result<OwnedMutexGuard<Slot>, ApiError> {
        Ok(self.slot(id)?.lock_owned().await)
    }

    /// Apply one person command under the session guard, persist, and start
    /// generation if the session now waits for content.
    pub async fn execute(
        self: &Arc<Self>,
        id: &SessionId,
        command: SessionCommand,
    ) -> Result<OwnedMutexGuard<Slot>, ApiError> {
        let mut slot = self.lock(id).await?;
        slot.recorded.execute(command)?;
        self.store.save(&slot.recorded)?;
        self.start_generation(&mut slot);
        Ok(slot)
    }

    /// Spawn the background filler if the session is in an `awaiting_*`
    /// phase and none is running.
    pub fn start_generation(self: &Arc<Self>, slot: &mut Slot) {
        if !slot.recorded.session().phase.kind.is_awaiting() || slot.generation == GenerationStatus::Running {
            return;
        }
        slot.generation = GenerationStatus::Running;
        let state = self.clone();
        let id = slot.recorded.session().id.clone();
        tokio::spawn(async move { state.generate(id).await });
    }

    /// Fill `awaiting_*` phases one install at a time. The guard is released
    /// while the provider runs so reads are not blocked.
    async fn generate(self: Arc<Self>, id: SessionId) {
        let Ok(handle) = self.slot(&id) else { return };
        loop {
            let snapshot: DecisionSession = {
                let mut slot = handle.lock().await;
                if !slot.recorded.session().phase.kind.is_awaiting() {
                    slot.generation = GenerationStatus::Idle;
                    return;
                }
                slot.recorded.session().clone()
            };
            let generator = self.generator(&snapshot.config);
            let planned = snapshot.clone();
            let result = tokio::task::spawn_blocking(move || engine::next_install(&planned, &generator))
                .await
                .unwrap_or_else(|e| {
                    Err(GenerationError::ProviderFailure {
                        task: TaskKind::Options,
                        attempts: 0,
                        message: format!("generation task panicked: {e}"),
                    })
                });
            let mut slot = handle.lock().await;
            if slot.recorded.session() != &snapshot {
                // Someone else advanced the session; start over from its state.
                continue;
            }
            match result {
                Ok(Some(command)) => {
                    if let Err(e) = slot.recorded.execute(command) {
                        tracing::error!(session = %id, error = %e, "generated content rejected");
                        slot.generation = GenerationStatus::Failed {
                            error: GenerationError::MalformedResponse {
                                task: TaskKind::Options,
                                attempts: 1,
                                reason: e.to_string(),
                            },
                        };
                        return;
                    }
                    if let Err(e) = self.store.save(&slot.recorded) {
                        tracing::error!(session = %id, error = %e, "could not persist session");
                    }
                }
                Ok(None) => {
                    slot.generation = GenerationStatus::Idle;
                    return;
                }
                Err(error) => {
                    tracing::warn!(session = %id, error = %error, "generation failed");
                    slot.generation = GenerationStatus::Failed { error };
                    return;
                }
            }
        }
    }

    /// Run generation to completion in the foreground, holding the guard.
    /// Used by the retry endpoint so the caller sees the outcome.
    pub async fn generate_now(self: &Arc<Self>, id: &SessionId) -> Result<OwnedMutexGuard<Slot>, ApiError> {
        let mut slot = self.lock(id).await?;
        if slot.generation == GenerationStatus::Running {
            return Ok(slot);
        }
        let generator = self.generator(&slot.recorded.session().config);
        let mut recorded = slot.recorded.clone();
        let (recorded, result) = tokio::task::spawn_blocking(move || {
            let result = engine::fulfill(&mut recorded, &generator);
            (recorded, result)
        })
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))?;
        let changed = recorded.log().len() != slot.recorded.log().len();
        slot.recorded = recorded;
        if changed {
            self.store.save(&slot.recorded)?;
        }
        match result {
            Ok(_) => {
                slot.generation = GenerationStatus::Idle;
                Ok(slot)
            }
            Err(criteria_core::EngineError::Generation(error)) => {
                slot.generation = GenerationStatus::Failed { error: error.clone() };
                Err(ApiError::Generation(error))
            }
            Err(criteria_core::EngineError::Session(e)) => Err(e.into()),
        }
    }
}

/// Stands in when a session asks for the external provider but the server
/// was started without one.
struct Unconfigured;

impl Provider for Unconfigured {
    fn name(&self) -> &str {
        "unconfigured"
    }

    fn complete(
        &self,
        _: &criteria_core::generation::ProviderRequest,
    ) -> Result<criteria_core::generation::ProviderResponse, ProviderError> {
        Err(ProviderError::Config(
            "server was started without an external provider (set PROVIDER_URL and use --provider external)".into(),
        ))
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        ApiError::Store(e)
    }
}
