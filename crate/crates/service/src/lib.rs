//! HTTP/JSON API over a [`GraphStore`].
//!
//! Read endpoints (`GET /schema`, `GET /practices`, `POST /report`,
//! `POST /query`) are open to every caller. Mutations need an admin bearer
//! token and are refused while the service runs read-only.

mod auth;
mod error;

use std::collections::BTreeSet;
use std::future::Future;
use std::sync::Arc;

use axum::body::Body;
use axum::extract::{Path, State};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::Router;
use http::{header, HeaderMap, HeaderValue, Method, StatusCode};
use iaselect_core::graph::{vocab, Attrs, EdgeId, ElementRef, GraphSchema, GraphStore, NodeId, PropertyGraph};
use iaselect_core::query::{evaluate, parse, ResultSet};
use iaselect_core::recommender::{generate_report, ContextSelection, CriteriaWeights, PracticeReport};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tower_http::cors::{AllowOrigin, CorsLayer};

pub use auth::{Role, TokenFileError, TokenTable};
pub use error::ApiError;

/// Longest accepted query text, in bytes.
pub const MAX_QUERY_BYTES: usize = 4096;
/// Longest accepted request body, in bytes.
pub const MAX_BODY_BYTES: usize = 1 << 20;

#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    pub readonly: bool,
    pub tokens: TokenTable,
    /// Origins allowed to call the API from a browser.
    pub cors_origins: Vec<String>,
}

#[derive(Clone)]
struct AppState {
    store: Arc<GraphStore>,
    config: Arc<ServiceConfig>,
}

/// Compact JSON followed by a newline. Every response body and the CLI's
/// JSON output go through this.
pub fn json_body<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("response types serialize");
    s.push('\n');
    s
}

pub(crate) fn json_response<T: Serialize>(status: StatusCode, value: &T) -> Response {
    (
        status,
        [(header::CONTENT_TYPE, HeaderValue::from_static("application/json"))],
        json_body(value),
    )
        .into_response()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRequest {
    pub context: ContextSelection,
    pub criteria: CriteriaWeights,
}

/// The report endpoint's logic without the HTTP layer.
pub fn report(graph: &PropertyGraph, request: &ReportRequest) -> Result<PracticeReport, ApiError> {
    Ok(generate_report(&request.context, &request.criteria, graph)?)
}

#[derive(Debug, Deserialize)]
struct QueryRequest {
    text: String,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct Vocabulary {
    locations: Vec<String>,
    domains: Vec<String>,
    functions: Vec<String>,
    maintenance: Vec<String>,
    performance_efficiency: Vec<String>,
    /// Names accepted as criteria keys in a report request.
    criteria: Vec<String>,
}

#[derive(Debug, Serialize)]
struct SchemaDocument<'a> {
    schema: &'a GraphSchema,
    vocabulary: Vocabulary,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PracticeSummary {
    pub name: String,
    pub location: String,
    pub coupling: String,
    pub api_client: String,
    pub channel: String,
}

#[derive(Debug, Deserialize)]
struct NewNode {
    labels: Vec<String>,
    #[serde(default)]
    attrs: Attrs,
}

#[derive(Debug, Deserialize)]
struct NewEdge {
    src: NodeId,
    dst: NodeId,
    label: String,
    #[serde(default)]
    attrs: Attrs,
}

#[derive(Debug, Deserialize)]
struct AttrPatch {
    attrs: Attrs,
}

#[derive(Debug, Serialize)]
struct Removed {
    #[serde(flatten)]
    element: ElementRef,
    removed: usize,
}

fn names_with_label(graph: &PropertyGraph, label: &str) -> Vec<String> {
    let names: BTreeSet<String> = graph
        .nodes_with_label(label)
        .filter_map(|n| n.text_attr(vocab::NAME).map(String::from))
        .collect();
    names.into_iter().collect()
}

async fn read_json<T: DeserializeOwned>(body: Body) -> Result<T, ApiError> {
    let bytes = axum::body::to_bytes(body, MAX_BODY_BYTES).await.map_err(|_| {
        ApiError::new(
            StatusCode::PAYLOAD_TOO_LARGE,
            "PayloadTooLarge",
            format!("request body exceeds {MAX_BODY_BYTES} bytes"),
        )
    })?;
    serde_json::from_slice(&bytes).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "InvalidJson", e.to_string()))
}

async fn get_schema(State(state): State<AppState>) -> Response {
    state.store.read(|graph, schema| {
        let mut criteria: BTreeSet<String> = BTreeSet::new();
        for label in vocab::CRITERIA_LABELS {
            criteria.extend(names_with_label(graph, label));
        }
        criteria.remove(vocab::HOST_AGENTS);
        let doc = SchemaDocument {
            schema,
            vocabulary: Vocabulary {
                locations: vocab::LOCATION_LABELS.iter().map(|s| s.to_string()).collect(),
                domains: names_with_label(graph, vocab::DOMAIN),
                functions: names_with_label(graph, vocab::FUNCTION),
                maintenance: names_with_label(graph, vocab::MAINTENANCE),
                performance_efficiency: names_with_label(graph, vocab::PERFORMANCE_EFFICIENCY),
                criteria: criteria.into_iter().collect(),
            },
        };
        json_response(StatusCode::OK, &doc)
    })
}

/// Every practice, sorted by name.
pub fn practices(graph: &PropertyGraph) -> Vec<PracticeSummary> {
    let text = |n: &iaselect_core::graph::Node, key| n.text_attr(key).unwrap_or_default().to_string();
    let mut out: Vec<(PracticeSummary, NodeId)> = graph
        .nodes_with_label(vocab::PRACTICE)
        .map(|n| {
            let location = vocab::LOCATION_LABELS
                .iter()
                .find(|l| n.has_label(l))
                .map_or_else(String::new, |l| l.to_string());
            (
                PracticeSummary {
                    name: text(n, vocab::NAME),
                    location,
                    coupling: text(n, vocab::COUPLING),
                    api_client: text(n, vocab::API_CLIENT),
                    channel: text(n, vocab::CHANNEL),
                },
                n.id,
            )
        })
        .collect();
    out.sort_by(|(a, ia), (b, ib)| a.name.cmp(&b.name).then(ia.cmp(ib)));
    out.into_iter().map(|(p, _)| p).collect()
}

async fn get_practices(State(state): State<AppState>) -> Response {
    let list = state.store.read(|graph, _| practices(graph));
    json_response(StatusCode::OK, &list)
}

async fn post_report(State(state): State<AppState>, body: Body) -> Result<Response, ApiError> {
    let request: ReportRequest = read_json(body).await?;
    let report = state.store.read(|graph, _| report(graph, &request))?;
    Ok(json_response(StatusCode::OK, &report))
}

/// The query endpoint's logic without the HTTP layer.
pub fn run_query(graph: &PropertyGraph, text: &str) -> Result<ResultSet, ApiError> {
    if text.len() > MAX_QUERY_BYTES {
        return Err(ApiError::new(
            StatusCode::PAYLOAD_TOO_LARGE,
            "QueryTooLarge",
            format!("query text exceeds {MAX_QUERY_BYTES} bytes"),
        ));
    }
    let query = parse(text)?;
    Ok(evaluate(&query, graph))
}

async fn post_query(State(state): State<AppState>, body: Body) -> Result<Response, ApiError> {
    let request: QueryRequest = read_json(body).await?;
    let rows = state.store.read(|graph, _| run_query(graph, &request.text))?;
    Ok(json_response(StatusCode::OK, &rows))
}

fn authorize_mutation(state: &AppState, headers: &HeaderMap) -> Result<(), ApiError> {
    state.config.tokens.require_admin(headers)?;
    if state.config.readonly {
        return Err(ApiError::new(
            StatusCode::SERVICE_UNAVAILABLE,
            "ReadOnly",
            "the service is running read-only",
        ));
    }
    Ok(())
}

/// Runs a store mutation off the async workers; it may fsync.
async fn blocking<T: Send + 'static>(
    store: &Arc<GraphStore>,
    f: impl FnOnce(&GraphStore) -> Result<T, iaselect_core::graph::StoreError> + Send + 'static,
) -> Result<T, ApiError> {
    let store = Arc::clone(store);
    tokio::task::spawn_blocking(move || f(&store))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", e.to_string()))?
        .map_err(ApiError::from)
}

async fn post_node(State(state): State<AppState>, headers: HeaderMap, body: Body) -> Result<Response, ApiError> {
    authorize_mutation(&state, &headers)?;
    let req: NewNode = read_json(body).await?;
    let id = blocking(&state.store, move |s| s.add_node(req.labels, req.attrs)).await?;
    Ok(json_response(StatusCode::CREATED, &ElementRef::Node(id)))
}

async fn post_edge(State(state): State<AppState>, headers: HeaderMap, body: Body) -> Result<Response, ApiError> {
    authorize_mutation(&state, &headers)?;
    let req: NewEdge = read_json(body).await?;
    let id = blocking(&state.store, move |s| {
        s.add_edge(req.src, req.dst, req.label, req.attrs)
    })
    .await?;
    Ok(json_response(StatusCode::CREATED, &ElementRef::Edge(id)))
}

fn element_ref(kind: &str, id: &str) -> Result<ElementRef, ApiError> {
    let raw: u64 = id
        .parse()
        .map_err(|_| ApiError::bad_request(format!("`{id}` is not an element id")))?;
    match kind {
        "nodes" => Ok(ElementRef::Node(NodeId(raw))),
        "edges" => Ok(ElementRef::Edge(EdgeId(raw))),
        _ => Err(ApiError::not_found(format!("no resource `{kind}`"))),
    }
}

async fn patch_element(
    State(state): State<AppState>,
    Path((kind, id)): Path<(String, String)>,
    headers: HeaderMap,
    body: Body,
) -> Result<Response, ApiError> {
    let element = element_ref(&kind, &id)?;
    authorize_mutation(&state, &headers)?;
    let req: AttrPatch = read_json(body).await?;
    blocking(&state.store, move |s| s.update_attrs(element, req.attrs)).await?;
    Ok(json_response(StatusCode::OK, &element))
}

async fn delete_element(
    State(state): State<AppState>,
    Path((kind, id)): Path<(String, String)>,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let element = element_ref(&kind, &id)?;
    authorize_mutation(&state, &headers)?;
    let removed = blocking(&state.store, move |s| s.remove(element)).await?;
    Ok(json_response(StatusCode::OK, &Removed { element, removed }))
}

async fn not_found() -> ApiError {
    ApiError::not_found("no such endpoint")
}

async fn method_not_allowed() -> ApiError {
    ApiError::new(
        StatusCode::METHOD_NOT_ALLOWED,
        "MethodNotAllowed",
        "method not allowed for this endpoint",
    )
}

fn cors(origins: &[String]) -> CorsLayer {
    let origins: Vec<HeaderValue> = origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()).collect();
    CorsLayer::new()
        .allow_origin(AllowOrigin::list(origins))
        .allow_methods([Method::GET, Method::POST, Method::PATCH, Method::DELETE])
        .allow_headers([header::AUTHORIZATION, header::CONTENT_TYPE])
}

pub fn router(store: Arc<GraphStore>, config: ServiceConfig) -> Router {
    let layer = cors(&config.cors_origins);
    let state = AppState {
        store,
        config: Arc::new(config),
    };
    Router::new()
        .route("/api/v1/schema", get(get_schema))
        .route("/api/v1/practices", get(get_practices))
        .route("/api/v1/report", post(post_report))
        .route("/api/v1/query", post(post_query))
        .route("/api/v1/nodes", post(post_node))
        .route("/api/v1/edges", post(post_edge))
        .route("/api/v1/{kind}/{id}", patch(patch_element).delete(delete_element))
        .fallback(not_found)
        .method_not_allowed_fallback(method_not_allowed)
        .with_state(state)
        .layer(layer)
}

/// Serves `app` on `listener` until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    app: Router,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, app).with_graceful_shutdown(shutdown).await
}
