//! HTTP JSON API over the transform engine.
//!
//! Sessions live in memory and are addressed by an opaque id. Reads run
//! concurrently against immutable transforms; mutations of one session
//! (adding transforms, highlighting, importing) take that session's write
//! lock. Byte payloads are base64, single bytes are integers, and rows and
//! columns are 0-based. Every error body is `{"code", "message"}`.

mod error;
mod handlers;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, RwLock};

use axum::extract::DefaultBodyLimit;
use axum::routing::{get, post};
use axum::Router;
use bwtx_core::session::Session;
use bwtx_core::PresetTables;
use tokio::net::TcpListener;

pub use error::ApiError;

pub const DEFAULT_PORT: u16 = 8374;
pub const PORT_ENV: &str = "BWTX_PORT";
pub const MAX_TEXT_BYTES: usize = 64 << 20;
pub const MAX_WINDOW_SIDE: usize = 1024;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub tables: PresetTables,
    pub max_text_bytes: usize,
    pub max_window_side: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            tables: PresetTables::default(),
            max_text_bytes: MAX_TEXT_BYTES,
            max_window_side: MAX_WINDOW_SIDE,
        }
    }
}

pub(crate) struct SessionHandle {
    pub(crate) session: tokio::sync::RwLock<Session>,
}

pub struct AppState {
    pub(crate) config: ServiceConfig,
    pub(crate) sessions: RwLock<HashMap<String, Arc<SessionHandle>>>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Arc<Self> {
        Arc::new(Self {
            config,
            sessions: RwLock::new(HashMap::new()),
        })
    }

    pub(crate) fn handle(&self, id: &str) -> Result<Arc<SessionHandle>, ApiError> {
        self.sessions
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::session_not_found(id))
    }

    pub(crate) fn insert(&self, session: Session) -> String {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let handle = Arc::new(SessionHandle {
            session: tokio::sync::RwLock::new(session),
        });
        self.sessions.write().unwrap().insert(id.clone(), handle);
        id
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    // base64 and JSON overhead on top of the text limit
    let body_limit = state.config.max_text_bytes * 2 + (1 << 20);
    Router::new()
        .route("/sessions", post(handlers::create_session))
        .route("/sessions/import", post(handlers::import_new))
        .route("/sessions/{sid}", get(handlers::get_session))
        .route(
            "/sessions/{sid}/transforms",
            get(handlers::list_transforms).post(handlers::add_transform),
        )
        .route(
            "/sessions/{sid}/transforms/{tid}",
            get(handlers::get_transform).delete(handlers::remove_transform),
        )
        .route(
            "/sessions/{sid}/transforms/{tid}/window",
            get(handlers::get_window),
        )
        .route(
            "/sessions/{sid}/transforms/{tid}/search",
            get(handlers::search),
        )
        .route(
            "/sessions/{sid}/transforms/{tid}/highlights",
            post(handlers::highlight),
        )
        .route(
            "/sessions/{sid}/transforms/{tid}/propagate",
            post(handlers::propagate),
        )
        .route(
            "/sessions/{sid}/transforms/{tid}/analysis",
            get(handlers::analyze),
        )
        .route(
            "/sessions/{sid}/orderings/propose",
            post(handlers::propose_ordering),
        )
        .route("/sessions/{sid}/export", get(handlers::export_session))
        .route("/sessions/{sid}/import", post(handlers::import_into))
        .layer(DefaultBodyLimit::max(body_limit))
        .with_state(state)
}

/// Port from `BWTX_PORT`, else the default.
pub fn port_from_env() -> Result<u16, String> {
    match std::env::var(PORT_ENV) {
        Ok(v) => v
            .parse()
            .map_err(|_| format!("{PORT_ENV}={v:?} is not a valid port")),
        Err(_) => Ok(DEFAULT_PORT),
    }
}

pub async fn bind(addr: SocketAddr) -> std::io::Result<TcpListener> {
    TcpListener::bind(addr).await
}

pub async fn serve(listener: TcpListener, config: ServiceConfig) -> std::io::Result<()> {
    axum::serve(listener, router(AppState::new(config))).await
}
