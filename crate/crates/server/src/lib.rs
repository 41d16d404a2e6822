//! HTTP JSON API over embedding stores loaded at startup.
//!
//! All endpoints live under `/api`. Client faults answer 400 with
//! `{"error": message}`; unknown routes answer 404. When a static directory
//! is configured, every other path is served from it.

pub mod api;

use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::de::DeserializeOwned;
use tokio::net::TcpListener;
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;

pub use api::{RequestError, Stores};

type Shared = State<Arc<Stores>>;

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn error_response(status: StatusCode, message: &str) -> Response {
    let body = embedlab_core::canonical::to_canonical_json(&serde_json::json!({ "error": message }));
    json_response(status, body)
}

fn respond(result: api::Response) -> Response {
    match result {
        Ok(body) => json_response(StatusCode::OK, body),
        Err(e) => error_response(StatusCode::BAD_REQUEST, &e.0),
    }
}

async fn run<T>(stores: Arc<Stores>, body: Bytes, handler: fn(&Stores, &T) -> api::Response) -> Response
where
    T: DeserializeOwned + Send + 'static,
{
    let work = tokio::task::spawn_blocking(move || {
        let request: T = serde_json::from_slice(&body)
            .map_err(|e| RequestError(format!("invalid request body: {e}")))?;
        handler(&stores, &request)
    });
    match work.await {
        Ok(result) => respond(result),
        Err(e) => error_response(StatusCode::INTERNAL_SERVER_ERROR, &e.to_string()),
    }
}

async fn list_stores(State(stores): Shared) -> Response {
    json_response(StatusCode::OK, api::stores(&stores))
}

async fn vocab(State(stores): Shared, query: Result<Query<api::VocabQuery>, QueryRejection>) -> Response {
    match query {
        Ok(Query(q)) => respond(api::vocab(&stores, &q)),
        Err(e) => error_response(StatusCode::BAD_REQUEST, &e.body_text()),
    }
}

async fn not_found() -> Response {
    error_response(StatusCode::NOT_FOUND, "no such route")
}

/// The API routes, with CORS open to any origin and, optionally, static
/// files served from `static_dir` for every non-API path.
pub fn router(stores: Arc<Stores>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/stores", get(list_stores))
        .route("/vocab", get(vocab))
        .route("/eval", post(|State(s): Shared, b: Bytes| run(s, b, api::eval)))
        .route("/similar", post(|State(s): Shared, b: Bytes| run(s, b, api::similar)))
        .route("/plot", post(|State(s): Shared, b: Bytes| run(s, b, api::plot)))
        .route("/arrows", post(|State(s): Shared, b: Bytes| run(s, b, api::arrows)))
        .route("/distance", post(|State(s): Shared, b: Bytes| run(s, b, api::distance)))
        .route("/transform", post(|State(s): Shared, b: Bytes| run(s, b, api::transform_items)))
        .route("/debias", post(|State(s): Shared, b: Bytes| run(s, b, api::debias)))
        .fallback(not_found)
        .with_state(stores);

    let app = Router::new().nest("/api", api);
    let app = match static_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app.fallback(not_found),
    };
    app.layer(CorsLayer::permissive())
}

/// Serves the API on an already bound listener until the process stops.
pub async fn serve(listener: TcpListener, stores: Stores, static_dir: Option<PathBuf>) -> std::io::Result<()> {
    axum::serve(listener, router(Arc::new(stores), static_dir)).await
}
