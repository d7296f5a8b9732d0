//! HTTP routes over an [`AnnotationSession`].

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use tokio::net::TcpListener;
use tower_http::services::ServeDir;
use titledup_core::evaluation::Verdict;
use titledup_core::pairing::PairKey;

use crate::error::ServiceError;
use crate::session::AnnotationSession;

const PLACEHOLDER_PAGE: &str = r#"<!doctype html>
<html><head><meta charset="utf-8"><title>titledup annotation</title></head>
<body>
<h1>titledup annotation service</h1>
<p>No UI assets configured. Start the server with <code>--ui &lt;dir&gt;</code> to serve the rater interface.</p>
<ul>
<li><code>GET /api/next?rater=NAME</code></li>
<li><code>POST /api/label</code></li>
<li><code>GET /api/progress</code></li>
</ul>
</body></html>
"#;

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match self {
            ServiceError::UnknownPair(_) => StatusCode::NOT_FOUND,
            ServiceError::InvalidVerdict(_) | ServiceError::MissingRater => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        if status.is_server_error() {
            tracing::error!(error = %self, "request failed");
        }
        (status, Json(json!({ "ok": false, "error": self.to_string() }))).into_response()
    }
}

#[derive(Debug, Deserialize)]
struct NextQuery {
    rater: Option<String>,
}

#[derive(Debug, Deserialize)]
struct LabelRequest {
    rater: String,
    left_id: String,
    right_id: String,
    verdict: String,
}

async fn next(
    State(session): State<Arc<AnnotationSession>>,
    Query(q): Query<NextQuery>,
) -> Result<Response, ServiceError> {
    let rater = q.rater.as_deref().map(str::trim).unwrap_or_default();
    if rater.is_empty() {
        return Err(ServiceError::MissingRater);
    }
    Ok(match session.next_pair(rater) {
        Some(payload) => Json(payload).into_response(),
        None => Json(json!({ "done": true })).into_response(),
    })
}

async fn label(
    State(session): State<Arc<AnnotationSession>>,
    Json(req): Json<LabelRequest>,
) -> Result<Response, ServiceError> {
    let verdict: Verdict = req
        .verdict
        .parse()
        .map_err(|_| ServiceError::InvalidVerdict(req.verdict.clone()))?;
    let key = PairKey::new(req.left_id.clone(), req.right_id.clone()).ok_or_else(|| {
        ServiceError::UnknownPair(PairKey {
            left_id: req.left_id.clone(),
            right_id: req.right_id.clone(),
        })
    })?;
    // The append blocks on fsync.
    let ack = tokio::task::spawn_blocking(move || session.submit_label(&req.rater, key, verdict))
        .await
        .expect("label writer panicked")?;
    Ok(Json(ack).into_response())
}

async fn progress(State(session): State<Arc<AnnotationSession>>) -> impl IntoResponse {
    Json(session.progress())
}

async fn placeholder() -> Html<&'static str> {
    Html(PLACEHOLDER_PAGE)
}

/// API routes, plus the UI directory at `/` when one is given.
pub fn router(session: Arc<AnnotationSession>, ui_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/next", get(next))
        .route("/api/label", post(label))
        .route("/api/progress", get(progress))
        .with_state(session);
    match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir).append_index_html_on_directories(true)),
        None => api.route("/", get(placeholder)),
    }
}

/// Binds `addr`, announces the bound address on stdout and serves until ctrl-c.
pub async fn serve(
    session: Arc<AnnotationSession>,
    addr: SocketAddr,
    ui_dir: Option<PathBuf>,
) -> std::io::Result<()> {
    let listener = TcpListener::bind(addr).await?;
    let local = listener.local_addr()?;
    println!("listening on http://{local}");
    use std::io::Write as _;
    std::io::stdout().flush()?;
    tracing::info!(%local, pairs = session.len(), "annotation service started");
    axum::serve(listener, router(session, ui_dir))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
