//! Annotation service: datasets on disk, annotator sessions with hidden
//! ground-truth checkpoints, server-side refinement and an append-only
//! submission store, exposed over a small JSON HTTP API.

pub mod app;
pub mod clock;
pub mod config;
pub mod error;
#[cfg(feature = "fixtures")]
pub mod fixtures;
pub mod http;
pub mod manifest;
pub mod session;
pub mod store;

use std::future::Future;
use std::net::SocketAddr;
use std::sync::Arc;

use thiserror::Error;
use tokio::net::TcpListener;

pub use app::AppState;
pub use clock::{Clock, ManualClock, SystemClock};
pub use config::{ConfigError, ServiceConfig};
pub use error::ServiceError;
pub use http::router;
pub use manifest::DatasetManifest;
pub use store::{load_rgb_image, DatasetStore};

#[derive(Debug, Error)]
pub enum StartupError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot read datasets: {0}")]
    Store(std::io::Error),
    #[error("address {0} is already in use")]
    AddrInUse(String),
    #[error("cannot listen on {addr}: {source}")]
    Bind { addr: String, source: std::io::Error },
    #[error("server error: {0}")]
    Serve(std::io::Error),
}

/// Validates the config, loads the datasets and binds the listener.
pub async fn bind(config: &ServiceConfig, clock: Arc<dyn Clock>) -> Result<(TcpListener, AppState), StartupError> {
    let root = config.validate()?;
    let store = DatasetStore::load(root).map_err(StartupError::Store)?;
    let addr = format!("{}:{}", config.host, config.port);
    let listener = TcpListener::bind(&addr).await.map_err(|source| match source.kind() {
        std::io::ErrorKind::AddrInUse => StartupError::AddrInUse(addr.clone()),
        _ => StartupError::Bind { addr: addr.clone(), source },
    })?;
    let state = AppState::new(store, config.engine.clone(), config.rng_seed, clock);
    Ok((listener, state))
}

/// Serves until `shutdown` resolves.
pub async fn run(
    listener: TcpListener,
    state: AppState,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), StartupError> {
    let local: Option<SocketAddr> = listener.local_addr().ok();
    tracing::info!(addr = ?local, datasets = state.store().len(), "listening");
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await.map_err(StartupError::Serve)
}
