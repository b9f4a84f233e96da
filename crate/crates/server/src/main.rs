use coilfield_server::{router, AppState};

/// Listen address from `COILFIELD_ADDR`, default `127.0.0.1:8080`.
#[tokio::main]
async fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let addr = std::env::var("COILFIELD_ADDR").unwrap_or_else(|_| "127.0.0.1:8080".into());
    let state = AppState::new(false);
    let listener = match tokio::net::TcpListener::bind(&addr).await {
        Ok(l) => l,
        Err(e) => {
            log::error!("cannot listen on {addr}: {e}");
            std::process::exit(2);
        }
    };
    state.set_ready(true);
    log::info!("serving /api/v1 on {addr}");
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
        log::info!("shutting down");
    };
    if let Err(e) = axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await
    {
        log::error!("server error: {e}");
        std::process::exit(2);
    }
}
