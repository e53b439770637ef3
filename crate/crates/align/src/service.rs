//! HTTP/JSON service backing the interactive alignment playground.
//!
//! Ground truth is always the identity pose. Sessions live in memory for
//! the lifetime of the process; committed trials are kept in memory and,
//! when a log path is configured, appended to a JSON-lines file.

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::path::Path;
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{RawQuery, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use comptex::compositor::compose;
use comptex::saliency::{metrics, saliency_map, SaliencyMap, SaliencyMetrics, SaliencyParams};
use comptex::{BlendMode, Image, Pose2D, Scene, VisMode};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::trial::{pose_errors, PoseDto, TrialLog, TrialRecord};

pub const INTEGRAL_HEADER: &str = "x-salience-integral";
pub const MAX_HEADER: &str = "x-salience-max";

/// Jitter ranges for a session's starting pose.
pub const JITTER_TRANSLATION: f64 = 24.0;
pub const JITTER_ROTATION: f64 = 0.5;
pub const JITTER_LOG_SCALE: f64 = 0.2;

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }

    fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, message)
    }

    fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Debug, Clone, Serialize)]
pub struct FrameSize {
    pub width: usize,
    pub height: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SceneInfo {
    pub id: String,
    pub name: String,
    pub modes: Vec<String>,
    pub frame: FrameSize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionRequest {
    pub scene: String,
    pub mode: String,
    #[serde(default)]
    pub blend: Option<String>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub jitter: bool,
    /// Jitter seed; drawn at random when absent.
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SessionResponse {
    pub session_id: String,
    pub scene: String,
    pub mode: String,
    pub blend: String,
    pub alpha: f64,
    pub frame: FrameSize,
    pub initial_pose: PoseDto,
    pub truth: PoseDto,
    pub seed: Option<u64>,
    pub start_time: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommitRequest {
    pub session: String,
    pub pose: PoseDto,
}

#[derive(Debug, Clone)]
struct Session {
    scene: Arc<Scene>,
    mode: VisMode,
    blend: BlendMode,
    alpha: f64,
    truth: Pose2D,
    started: Instant,
    committed: Option<TrialRecord>,
}

#[derive(Debug, Default)]
struct Ledger {
    trials: Vec<TrialRecord>,
    log: Option<TrialLog>,
}

#[derive(Debug)]
pub struct AppState {
    scenes: BTreeMap<String, Arc<Scene>>,
    sessions: Mutex<HashMap<String, Session>>,
    ledger: Mutex<Ledger>,
    params: SaliencyParams,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|e| e.into_inner())
}

impl AppState {
    pub fn new(scenes: Vec<Scene>, log: Option<TrialLog>) -> Self {
        Self {
            scenes: scenes.into_iter().map(|s| (s.id.clone(), Arc::new(s))).collect(),
            sessions: Mutex::default(),
            ledger: Mutex::new(Ledger {
                trials: Vec::new(),
                log,
            }),
            params: SaliencyParams::default(),
        }
    }

    pub fn scene_ids(&self) -> Vec<String> {
        self.scenes.keys().cloned().collect()
    }
}

/// Built-in fixtures plus every `*.scene` manifest in `dir`. A manifest
/// whose id matches a built-in replaces it; duplicate ids within `dir`
/// are an error.
pub fn load_scenes(dir: Option<&Path>) -> comptex::Result<Vec<Scene>> {
    let mut scenes: BTreeMap<String, Scene> = BTreeMap::new();
    for name in comptex::scene::FIXTURES {
        let s = Scene::fixture(name)?;
        scenes.insert(s.id.clone(), s);
    }
    if let Some(dir) = dir {
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(|e| comptex::Error::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "scene"))
            .collect();
        paths.sort();
        let mut seen = Vec::new();
        for p in paths {
            let s = Scene::load(&p)?;
            if seen.contains(&s.id) {
                return Err(comptex::Error::InvalidArgument(format!(
                    "duplicate scene id `{}` in {}",
                    s.id,
                    dir.display()
                )));
            }
            seen.push(s.id.clone());
            scenes.insert(s.id.clone(), s);
        }
    }
    Ok(scenes.into_values().collect())
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/scenes", get(list_scenes))
        .route("/api/session", post(create_session))
        .route("/api/frame", get(frame))
        .route("/api/saliency", get(saliency))
        .route("/api/commit", post(commit))
        .route("/api/trials", get(trials))
        .with_state(state)
}

pub async fn serve(addr: SocketAddr, state: Arc<AppState>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

async fn list_scenes(State(state): State<Arc<AppState>>) -> Json<Vec<SceneInfo>> {
    Json(
        state
            .scenes
            .values()
            .map(|s| SceneInfo {
                id: s.id.clone(),
                name: s.name.clone(),
                modes: s.modes().iter().map(|m| m.name().to_string()).collect(),
                frame: FrameSize {
                    width: s.frame.0,
                    height: s.frame.1,
                },
            })
            .collect(),
    )
}

fn parse_json<T: serde::de::DeserializeOwned>(body: &[u8]) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("invalid request body: {e}")))
}

fn epoch_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Seeded starting pose: uniform translation, rotation and log-scale offsets.
pub fn jittered_pose(seed: u64) -> Pose2D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tx = rng.gen_range(-JITTER_TRANSLATION..=JITTER_TRANSLATION);
    let ty = rng.gen_range(-JITTER_TRANSLATION..=JITTER_TRANSLATION);
    let theta = rng.gen_range(-JITTER_ROTATION..=JITTER_ROTATION);
    let log_scale: f64 = rng.gen_range(-JITTER_LOG_SCALE..=JITTER_LOG_SCALE);
    Pose2D::new(tx, ty, theta, log_scale.exp()).expect("jitter ranges are valid poses")
}

async fn create_session(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<Json<SessionResponse>> {
    let req: SessionRequest = parse_json(&body)?;
    let scene = state
        .scenes
        .get(&req.scene)
        .cloned()
        .ok_or_else(|| ApiError::not_found(format!("unknown scene `{}`", req.scene)))?;
    let mode: VisMode = req.mode.parse().map_err(|e| ApiError::bad_request(format!("{e}")))?;
    if scene.asset(mode).is_none() {
        return Err(ApiError::bad_request(format!(
            "scene `{}` has no `{mode}` asset",
            scene.id
        )));
    }
    let blend: BlendMode = match &req.blend {
        Some(b) => b.parse().map_err(|e| ApiError::bad_request(format!("{e}")))?,
        None => BlendMode::AdditiveOST,
    };
    let alpha = req.alpha.unwrap_or(blend.default_alpha());
    if !(0.0..=1.0).contains(&alpha) {
        return Err(ApiError::bad_request(format!("alpha {alpha} outside [0, 1]")));
    }
    let truth = Pose2D::IDENTITY;
    let (seed, initial) = if req.jitter {
        let seed = req.seed.unwrap_or_else(rand::random);
        (Some(seed), jittered_pose(seed))
    } else {
        (None, truth)
    };

    let start_time = epoch_ms();
    let session = Session {
        scene: scene.clone(),
        mode,
        blend,
        alpha,
        truth,
        started: Instant::now(),
        committed: None,
    };
    let session_id = {
        let mut sessions = lock(&state.sessions);
        let id = loop {
            let id = format!("{:016x}", rand::random::<u64>());
            if !sessions.contains_key(&id) {
                break id;
            }
        };
        sessions.insert(id.clone(), session);
        id
    };
    Ok(Json(SessionResponse {
        session_id,
        scene: scene.id.clone(),
        mode: mode.name().into(),
        blend: blend.name().into(),
        alpha,
        frame: FrameSize {
            width: scene.frame.0,
            height: scene.frame.1,
        },
        initial_pose: initial.into(),
        truth: truth.into(),
        seed,
        start_time,
    }))
}

/// Session id and pose from a `session=..&tx=..&ty=..&theta=..&scale=..`
/// query string. Absent pose components default to identity.
pub fn parse_pose_query(query: &str) -> Result<(String, Pose2D), String> {
    let mut session = None;
    let mut pose = PoseDto::default();
    let mut seen: Vec<&str> = Vec::new();
    for pair in query.split('&').filter(|p| !p.is_empty()) {
        let (key, value) = pair.split_once('=').unwrap_or((pair, ""));
        if seen.contains(&key) {
            return Err(format!("duplicate query parameter `{key}`"));
        }
        seen.push(key);
        let number = || -> Result<f64, String> {
            let v: f64 = value
                .parse()
                .map_err(|_| format!("`{key}` is not a number: `{value}`"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("`{key}` must be finite"))
            }
        };
        match key {
            "session" => session = Some(value.to_string()),
            "tx" => pose.tx = number()?,
            "ty" => pose.ty = number()?,
            "theta" => pose.theta = number()?,
            "scale" => pose.scale = number()?,
            _ => return Err(format!("unknown query parameter `{key}`")),
        }
    }
    let session = session.filter(|s| !s.is_empty()).ok_or("missing `session`")?;
    let pose = Pose2D::try_from(pose).map_err(|e| e.to_string())?;
    Ok((session, pose))
}

fn lookup(state: &AppState, id: &str) -> ApiResult<Session> {
    lock(&state.sessions)
        .get(id)
        .cloned()
        .ok_or_else(|| ApiError::not_found(format!("unknown session `{id}`")))
}

struct Rendered {
    frame: Image,
    map: SaliencyMap,
    metrics: SaliencyMetrics,
}

async fn render(state: &Arc<AppState>, query: Option<String>) -> ApiResult<Rendered> {
    let (id, pose) = parse_pose_query(query.as_deref().unwrap_or("")).map_err(ApiError::bad_request)?;
    let session = lookup(state, &id)?;
    let params = state.params;
    tokio::task::spawn_blocking(move || {
        let frame = compose(&session.scene, session.mode, &pose, session.blend, session.alpha)
            .map_err(|e| ApiError::internal(e.to_string()))?;
        let map = saliency_map(&frame, &params);
        let metrics = metrics(&map);
        Ok(Rendered { frame, map, metrics })
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))?
}

fn png_response(bytes: Vec<u8>, m: &SaliencyMetrics) -> Response {
    let mut resp = (StatusCode::OK, bytes).into_response();
    let headers = resp.headers_mut();
    headers.insert(header::CONTENT_TYPE, HeaderValue::from_static("image/png"));
    // shortest round-trip representation
    for (name, v) in [(INTEGRAL_HEADER, m.integral), (MAX_HEADER, m.max)] {
        headers.insert(name, HeaderValue::from_str(&v.to_string()).expect("ascii number"));
    }
    resp
}

async fn frame(State(state): State<Arc<AppState>>, RawQuery(query): RawQuery) -> ApiResult<Response> {
    let r = render(&state, query).await?;
    Ok(png_response(r.frame.to_png_bytes(), &r.metrics))
}

async fn saliency(State(state): State<Arc<AppState>>, RawQuery(query): RawQuery) -> ApiResult<Response> {
    let r = render(&state, query).await?;
    Ok(png_response(r.map.heatmap_png_bytes(), &r.metrics))
}

async fn commit(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<Json<TrialRecord>> {
    let req: CommitRequest = parse_json(&body)?;
    let pose = Pose2D::try_from(req.pose).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let mut sessions = lock(&state.sessions);
    let session = sessions
        .get_mut(&req.session)
        .ok_or_else(|| ApiError::not_found(format!("unknown session `{}`", req.session)))?;
    if session.committed.is_some() {
        return Err(ApiError::new(StatusCode::CONFLICT, "session already committed"));
    }
    let errors = pose_errors(&pose, &session.truth);
    let record = TrialRecord {
        session_id: req.session.clone(),
        scene: session.scene.id.clone(),
        mode: session.mode.name().into(),
        blend: session.blend.name().into(),
        pose: pose.into(),
        elapsed_ms: session.started.elapsed().as_millis() as u64,
        translation_err: errors.translation_err,
        rotation_err: errors.rotation_err,
        scale_err: errors.scale_err,
    };
    let mut ledger = lock(&state.ledger);
    if let Some(log) = ledger.log.as_mut() {
        log.append(&record)
            .map_err(|e| ApiError::internal(format!("trial log {}: {e}", log.path().display())))?;
    }
    ledger.trials.push(record.clone());
    session.committed = Some(record.clone());
    Ok(Json(record))
}

async fn trials(State(state): State<Arc<AppState>>) -> Json<Vec<TrialRecord>> {
    Json(lock(&state.ledger).trials.clone())
}
