//! JSON-over-HTTP analysis service.
//!
//! | method | path      | body                                   | reply               |
//! |--------|-----------|----------------------------------------|---------------------|
//! | GET    | /health   |                                        | `ok`                |
//! | POST   | /analyze  | constellation file                     | reliability report  |
//! | POST   | /cones    | planar constellation file              | angular patches     |
//! | POST   | /mc       | [`McRequest`]                          | MC estimate         |
//! | POST   | /screen   | [`ScreenRequest`]                      | screen result       |
//!
//! Replies use the same JSON writer as the CLI. Invalid input yields 400 with
//! an [`ErrorBody`] naming the offending field; a non-planar body on `/cones`
//! yields 422.

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::descriptors::{report, screen, Candidate, PowerReference};
use crate::detector::{estimate, McConfig};
use crate::error::Error;
use crate::geometry::{angular_patch_2d, Constellation};
use crate::io::{from_json_str, to_json_string, ConstellationFile};
use crate::noise::NoiseModel;

pub const DEFAULT_SAMPLE_CAP: usize = 1_000_000;
pub const DEFAULT_BIND: &str = "127.0.0.1:8080";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ServerConfig {
    /// Largest `n_samples` accepted by `/mc`.
    pub sample_cap: usize,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self { sample_cap: DEFAULT_SAMPLE_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McRequest {
    pub constellation: ConstellationFile,
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priors: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateFile {
    pub id: String,
    pub constellation: ConstellationFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScreenRequest {
    pub candidates: Vec<CandidateFile>,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    /// A common power, one power per candidate, or absent for each
    /// candidate's own power.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p0: Option<PowerReference>,
}

fn default_lambda() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub reason: String,
    /// Path of the offending request field, e.g. `constellation.points[3]`.
    pub path: String,
    pub message: String,
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, reason: &str, path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { status, body: ErrorBody { reason: reason.into(), path: path.into(), message: message.into() } }
    }

    /// Maps a library error to a 400, prefixing its field path with `prefix`.
    fn invalid(prefix: &str, e: Error) -> Self {
        let (reason, field) = classify(&e);
        let path = match (prefix.is_empty(), field.is_empty()) {
            (true, _) => field,
            (false, true) => prefix.to_string(),
            (false, false) if field.starts_with('[') => format!("{prefix}{field}"),
            (false, false) => format!("{prefix}.{field}"),
        };
        Self::new(StatusCode::BAD_REQUEST, reason, path, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, [(header::CONTENT_TYPE, "application/json")], to_json_string(&self.body)).into_response()
    }
}

fn classify(e: &Error) -> (&'static str, String) {
    match e {
        Error::Parse { path, .. } => ("invalid request", if path == "." { String::new() } else { path.clone() }),
        Error::DuplicatePoint { j, .. } => ("duplicate point", format!("points[{j}]")),
        Error::NonFiniteCoordinate { index } => ("non-finite coordinate", format!("points[{index}]")),
        Error::DimensionMismatch { .. } => ("dimension mismatch", "points".into()),
        Error::NotEnoughPoints { .. } | Error::EmptyConstellation => ("not enough points", "points".into()),
        Error::InvalidPriors(_) => ("invalid priors", "priors".into()),
        Error::InvalidLabels { .. } => ("invalid labels", "labels".into()),
        Error::InvalidSampleCount { .. } => ("invalid sample count", "n_samples".into()),
        Error::NonpositiveInput { name, .. } => ("nonpositive input", (*name).into()),
        Error::NonpositivePower(_) => ("nonpositive power", "p0".into()),
        Error::LambdaOutOfRange(_) => ("lambda out of range", "lambda".into()),
        Error::EmptyCandidateList => ("empty candidate list", "candidates".into()),
        Error::IndexOutOfRange { .. } => ("index out of range", String::new()),
        Error::NotUnitVector(_) => ("not a unit vector", String::new()),
        Error::EmptyGrid | Error::InvalidGrid => ("invalid grid", "gamma".into()),
        Error::UnknownName(_) => ("unknown name", "name".into()),
        Error::Io(_) => ("io", String::new()),
    }
}

fn json_reply<T: Serialize>(value: &T) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], to_json_string(value)).into_response()
}

fn parse_body<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    let text = std::str::from_utf8(body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "invalid request", "", e.to_string()))?;
    from_json_str(text).map_err(|e| ApiError::invalid("", e))
}

fn constellation(file: &ConstellationFile, prefix: &str) -> Result<Constellation, ApiError> {
    file.to_constellation().map_err(|e| ApiError::invalid(prefix, e))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", "", e.to_string()))?
}

async fn health() -> &'static str {
    "ok"
}

async fn analyze(body: Bytes) -> Result<Response, ApiError> {
    let file: ConstellationFile = parse_body(&body)?;
    let c = constellation(&file, "")?;
    let r = blocking(move || report(&c).map_err(|e| ApiError::invalid("", e))).await?;
    Ok(json_reply(&r))
}

async fn cones(body: Bytes) -> Result<Response, ApiError> {
    let file: ConstellationFile = parse_body(&body)?;
    let c = constellation(&file, "")?;
    if c.dim() != 2 {
        return Err(ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "dimension",
            "dim",
            format!("angular patches need planar constellations, got dimension {}", c.dim()),
        ));
    }
    let patches = (0..c.len())
        .map(|i| angular_patch_2d(&c, i))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| ApiError::invalid("", e))?;
    Ok(json_reply(&patches))
}

async fn mc(State(cfg): State<ServerConfig>, body: Bytes) -> Result<Response, ApiError> {
    let req: McRequest = parse_body(&body)?;
    let defaults = McConfig::default();
    let n_samples = req.n_samples.unwrap_or(defaults.n_samples);
    if n_samples > cfg.sample_cap {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "sample cap",
            "n_samples",
            format!("n_samples {n_samples} exceeds the server cap {}", cfg.sample_cap),
        ));
    }
    let mut c = constellation(&req.constellation, "constellation")?;
    if let Some(p) = req.priors {
        c = c.with_priors(p).map_err(|e| ApiError::invalid("", e))?;
    }
    let mc_cfg = McConfig {
        n_samples,
        batch_size: req.batch_size.unwrap_or(defaults.batch_size),
        seed: req.seed.unwrap_or(defaults.seed),
        priors: None,
    };
    mc_cfg.validate().map_err(|e| ApiError::invalid("", e))?;
    let model = NoiseModel::new(req.gamma, c.dim()).map_err(|e| ApiError::invalid("", e))?;
    let est = blocking(move || estimate(&c, &model, &mc_cfg).map_err(|e| ApiError::invalid("", e))).await?;
    Ok(json_reply(&est))
}

async fn screen_handler(body: Bytes) -> Result<Response, ApiError> {
    let req: ScreenRequest = parse_body(&body)?;
    let candidates = req
        .candidates
        .iter()
        .enumerate()
        .map(|(k, cf)| {
            Ok(Candidate::new(
                cf.id.clone(),
                constellation(&cf.constellation, &format!("candidates[{k}].constellation"))?,
            ))
        })
        .collect::<Result<Vec<_>, ApiError>>()?;
    let p0 = req.p0.unwrap_or(PowerReference::Own);
    let lambda = req.lambda;
    let r = blocking(move || screen(&candidates, lambda, &p0).map_err(|e| ApiError::invalid("", e))).await?;
    Ok(json_reply(&r))
}

pub fn router(cfg: ServerConfig) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/analyze", post(analyze))
        .route("/cones", post(cones))
        .route("/mc", post(mc))
        .route("/screen", post(screen_handler))
        .with_state(cfg)
}

/// Serves [`router`] on `bind` until the process exits.
pub async fn serve(bind: &str, cfg: ServerConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(bind).await?;
    axum::serve(listener, router(cfg)).await
}
