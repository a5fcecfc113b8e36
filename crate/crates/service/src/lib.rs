//! HTTP API and operator CLI over `criteria-core`.

pub mod api;
pub mod cli;
pub mod error;
pub mod state;

use std::sync::Arc;

pub use api::router;
pub use state::AppState;

/// Serve `state` on an already-bound listener until ctrl-c.
pub async fn serve(listener: tokio::net::TcpListener, state: Arc<AppState>) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
