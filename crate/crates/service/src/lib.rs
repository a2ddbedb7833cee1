//! HTTP service over an on-disk annotation store.

mod routes;
pub mod store;

use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::sync::Arc;

use axum::Router;
use thiserror::Error;
use tokio::net::TcpListener;

pub use routes::router;
pub use store::{Store, StoreError};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub host: IpAddr,
    pub port: u16,
    pub data_root: PathBuf,
    /// Half-width used by `/alignment` when `dt` is omitted.
    pub delta_t_default: f64,
    /// Upper bound on `k` for `/reid/query`.
    pub reid_top_k: usize,
}

impl ServiceConfig {
    pub fn new(data_root: impl Into<PathBuf>) -> Self {
        Self {
            host: IpAddr::V4(Ipv4Addr::LOCALHOST),
            port: 8080,
            data_root: data_root.into(),
            delta_t_default: marathon_core::alignment::DEFAULT_WINDOW_S,
            reid_top_k: marathon_core::alignment::DEFAULT_TOP_K,
        }
    }
}

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("port {0} is already in use")]
    PortInUse(u16),
    #[error("data root {0} does not exist or is not a directory")]
    MissingDataRoot(PathBuf),
    #[error("cannot open store: {0}")]
    Store(StoreError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<Store>,
    pub delta_t_default: f64,
    pub reid_top_k: usize,
}

impl AppState {
    pub fn open(config: &ServiceConfig) -> Result<Self, ServiceError> {
        if !config.delta_t_default.is_finite() || config.delta_t_default < 0.0 {
            return Err(ServiceError::Config(
                "DELTA_T_DEFAULT must be a non-negative number".into(),
            ));
        }
        if config.reid_top_k == 0 {
            return Err(ServiceError::Config("REID_TOP_K must be at least 1".into()));
        }
        let store = Store::open(&config.data_root).map_err(|e| match e {
            StoreError::MissingDataRoot(p) => ServiceError::MissingDataRoot(p),
            other => ServiceError::Store(other),
        })?;
        Ok(Self {
            store: Arc::new(store),
            delta_t_default: config.delta_t_default,
            reid_top_k: config.reid_top_k,
        })
    }
}

/// A store opened and a socket bound, not yet accepting requests.
pub struct Server {
    listener: TcpListener,
    app: Router,
}

impl Server {
    pub async fn bind(config: &ServiceConfig) -> Result<Self, ServiceError> {
        let state = AppState::open(config)?;
        let addr = SocketAddr::new(config.host, config.port);
        let listener = TcpListener::bind(addr).await.map_err(|e| match e.kind() {
            std::io::ErrorKind::AddrInUse => ServiceError::PortInUse(config.port),
            _ => ServiceError::Io(e),
        })?;
        Ok(Self {
            listener,
            app: router(state),
        })
    }

    pub fn local_addr(&self) -> std::io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    pub async fn run(self) -> std::io::Result<()> {
        axum::serve(self.listener, self.app).await
    }
}

pub async fn serve(config: ServiceConfig) -> Result<(), ServiceError> {
    Server::bind(&config).await?.run().await?;
    Ok(())
}
