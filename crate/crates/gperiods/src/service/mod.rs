//! HTTP API over the engine.
//!
//! | route | result |
//! |---|---|
//! | `GET /api/periods?n&omega&c&mode` | points with color classes (binned for large sets) |
//! | `GET /api/render?n&omega&c&mode&width&height&...` | PNG, same pixels as `gperiods render` |
//! | `GET /api/fillout?d&samples&seed&strategy` | sampled image of the Laurent map |
//! | `GET /api/jobs/{token}` | poll a computation that outlived the request |
//! | `GET /api/stats` | cache and computation counters |
//!
//! Orbit tables are cached per `(n, omega)` without colors, so re-coloring
//! never recomputes values. Identical concurrent requests share one
//! computation. Computations run on a bounded pool; when the queue is full new
//! work is refused with 503.

mod cache;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use gperiods_core::fillout::SampleStrategy;
use gperiods_core::numtheory::euler_totient;
use gperiods_core::raster::extent_of;
use gperiods_core::{
    dihedral_order, rasterize, sample_image, ColoringMode, Error, LaurentMap, OrbitTable,
    PeriodParams, PeriodSet,
};
use serde::Serialize;
use serde_json::json;
use tokio::sync::{watch, Semaphore};

pub use cache::{CacheEntry, ComputeKey, OrbitCache};

use crate::export::ParamsJson;
use crate::parallel;
use crate::png_io::encode_png;
use crate::spec_args::RenderArgs;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub max_n: u64,
    pub cache_bytes: usize,
    /// Concurrent computations.
    pub workers: usize,
    /// Computations admitted (running or waiting) before refusing with 503.
    pub queue_limit: usize,
    /// How long a request waits before answering 202 with a poll token.
    pub long_job: Duration,
    /// Point count above which `/api/periods` bins its payload.
    pub bin_threshold: usize,
    /// Bins per axis.
    pub bin_grid: u32,
    pub max_samples: u64,
    pub max_pixels: u64,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
        Self {
            max_n: gperiods_core::DEFAULT_MAX_N,
            cache_bytes: 1 << 30,
            workers,
            queue_limit: 4 * workers,
            long_job: Duration::from_secs(30),
            bin_threshold: 200_000,
            bin_grid: 1024,
            max_samples: 1 << 22,
            max_pixels: 1 << 26,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    fn bad(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            code,
            message: message.into(),
        }
    }

    fn over_capacity() -> Self {
        Self {
            status: StatusCode::SERVICE_UNAVAILABLE,
            code: "over_capacity",
            message: "too many computations queued; retry later".into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            code: "internal",
            message: message.into(),
        }
    }
}

impl From<Error> for ApiError {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::NotCoprime { .. } => "not_coprime",
            Error::NotDivisor { .. } => "not_divisor",
            Error::TooLarge { .. } => "too_large",
            Error::InvalidDimension { .. } => "invalid_dimension",
            Error::PaletteTooSmall { .. } => "palette_too_small",
            Error::InvalidLayerOrder { .. } => "invalid_layer_order",
            _ => "invalid_parameter",
        };
        Self::bad(code, err.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (
            self.status,
            Json(json!({ "error": self.code, "message": self.message })),
        )
            .into_response()
    }
}

#[derive(Debug, Default)]
struct Counters {
    hits: AtomicU64,
    computations: AtomicU64,
    coalesced: AtomicU64,
    rejected: AtomicU64,
}

type JobOutcome = Option<Result<Arc<OrbitTable>, String>>;

struct Shared {
    cache: OrbitCache,
    inflight: HashMap<ComputeKey, watch::Receiver<JobOutcome>>,
}

#[derive(Debug, Clone)]
enum Deferred {
    Periods(HashMap<String, String>),
    Render(HashMap<String, String>),
}

struct Inner {
    config: ServiceConfig,
    shared: Mutex<Shared>,
    workers: Arc<Semaphore>,
    pending: AtomicUsize,
    counters: Counters,
    jobs: Mutex<HashMap<String, Deferred>>,
    next_token: AtomicU64,
}

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

enum Lookup {
    Ready(Arc<OrbitTable>),
    Pending,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        Self(Arc::new(Inner {
            shared: Mutex::new(Shared {
                cache: OrbitCache::new(config.cache_bytes),
                inflight: HashMap::new(),
            }),
            workers: Arc::new(Semaphore::new(config.workers.max(1))),
            pending: AtomicUsize::new(0),
            counters: Counters::default(),
            jobs: Mutex::new(HashMap::new()),
            next_token: AtomicU64::new(1),
            config,
        }))
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.0.config
    }

    /// Cached table, or the shared result of one (possibly new) computation.
    async fn orbits(&self, params: PeriodParams) -> Result<Lookup, ApiError> {
        let inner = &self.0;
        let key = ComputeKey {
            n: params.n(),
            omega: params.omega(),
        };
        let rx = {
            let mut shared = inner.shared.lock().unwrap();
            if let Some(table) = shared.cache.get(&key) {
                inner.counters.hits.fetch_add(1, Ordering::Relaxed);
                return Ok(Lookup::Ready(table));
            }
            if let Some(rx) = shared.inflight.get(&key) {
                inner.counters.coalesced.fetch_add(1, Ordering::Relaxed);
                rx.clone()
            } else {
                if inner.pending.load(Ordering::SeqCst) >= inner.config.queue_limit {
                    inner.counters.rejected.fetch_add(1, Ordering::Relaxed);
                    return Err(ApiError::over_capacity());
                }
                inner.pending.fetch_add(1, Ordering::SeqCst);
                inner.counters.computations.fetch_add(1, Ordering::Relaxed);
                let (tx, rx) = watch::channel(None);
                shared.inflight.insert(key, rx.clone());
                self.spawn_job(key, params, tx);
                rx
            }
        };
        let mut rx = rx;
        let wait = async move {
            match rx.wait_for(Option::is_some).await {
                Ok(outcome) => outcome.clone().expect("waited for Some"),
                Err(_) => Err("computation abandoned".to_owned()),
            }
        };
        match tokio::time::timeout(inner.config.long_job, wait).await {
            Ok(Ok(table)) => Ok(Lookup::Ready(table)),
            Ok(Err(msg)) => Err(ApiError::internal(msg)),
            Err(_) => Ok(Lookup::Pending),
        }
    }

    fn spawn_job(&self, key: ComputeKey, params: PeriodParams, tx: watch::Sender<JobOutcome>) {
        let state = self.clone();
        tokio::spawn(async move {
            let inner = &state.0;
            let permit = inner.workers.clone().acquire_owned().await;
            let result = tokio::task::spawn_blocking(move || parallel::compute_table(&params))
                .await
                .map(Arc::new)
                .map_err(|e| format!("computation failed: {e}"));
            drop(permit);
            {
                let mut shared = inner.shared.lock().unwrap();
                if let Ok(table) = &result {
                    shared.cache.insert(key, table.clone());
                }
                shared.inflight.remove(&key);
            }
            inner.pending.fetch_sub(1, Ordering::SeqCst);
            let _ = tx.send(Some(result));
        });
    }

    fn defer(&self, request: Deferred) -> Response {
        let token = format!("job-{}", self.0.next_token.fetch_add(1, Ordering::Relaxed));
        self.0.jobs.lock().unwrap().insert(token.clone(), request);
        accepted(&token)
    }

    pub fn stats(&self) -> serde_json::Value {
        let inner = &self.0;
        let shared = inner.shared.lock().unwrap();
        json!({
            "hits": inner.counters.hits.load(Ordering::Relaxed),
            "misses": inner.counters.computations.load(Ordering::Relaxed),
            "computations": inner.counters.computations.load(Ordering::Relaxed),
            "coalesced": inner.counters.coalesced.load(Ordering::Relaxed),
            "rejected": inner.counters.rejected.load(Ordering::Relaxed),
            "pending": inner.pending.load(Ordering::SeqCst),
            "cache_entries": shared.cache.len(),
            "cache_bytes": shared.cache.bytes(),
            "cache_budget": inner.config.cache_bytes,
            "evictions": shared.cache.evictions(),
        })
    }
}

fn accepted(token: &str) -> Response {
    (
        StatusCode::ACCEPTED,
        Json(json!({
            "status": "pending",
            "token": token,
            "poll": format!("/api/jobs/{token}"),
        })),
    )
        .into_response()
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/periods", get(periods_handler))
        .route("/api/render", get(render_handler))
        .route("/api/fillout", get(fillout_handler))
        .route("/api/jobs/:token", get(job_handler))
        .route("/api/stats", get(stats_handler))
        .with_state(state)
}

/// Runs the service until interrupted.
pub fn serve_blocking(addr: &str, config: ServiceConfig) -> anyhow::Result<()> {
    let workers = config.workers;
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build_global()
        .ok();
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?;
    runtime.block_on(async move {
        let addr: SocketAddr = addr.parse()?;
        let listener = tokio::net::TcpListener::bind(addr).await?;
        tracing::info!("listening on http://{}", listener.local_addr()?);
        axum::serve(listener, router(AppState::new(config)))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}

type QueryMap = HashMap<String, String>;

fn param<T: std::str::FromStr>(q: &QueryMap, name: &'static str) -> Result<Option<T>, ApiError> {
    match q.get(name) {
        None => Ok(None),
        Some(raw) => raw
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| ApiError::bad("invalid_parameter", format!("cannot parse {name}={raw}"))),
    }
}

fn required<T: std::str::FromStr>(q: &QueryMap, name: &'static str) -> Result<T, ApiError> {
    param(q, name)?.ok_or_else(|| ApiError::bad("invalid_parameter", format!("missing {name}")))
}

fn mode_param(q: &QueryMap) -> Result<ColoringMode, ApiError> {
    match q.get("mode").map(|s| s.trim()) {
        None | Some("standard") => Ok(ColoringMode::Standard),
        Some("period_squared" | "period-squared") => Ok(ColoringMode::PeriodSquared),
        Some(other) => Err(ApiError::bad("invalid_parameter", format!("unknown mode {other}"))),
    }
}

/// Validated `(params, c, mode)` of a periods or render query.
fn period_query(state: &AppState, q: &QueryMap) -> Result<(PeriodParams, u64, ColoringMode), ApiError> {
    let n: u64 = required(q, "n")?;
    let omega: i64 = required(q, "omega")?;
    let c: u64 = param(q, "c")?.unwrap_or(1);
    let mode = mode_param(q)?;
    let params = PeriodParams::with_cap(n, omega, state.config().max_n)?;
    gperiods_core::color_classes(n, omega, c, mode)?;
    Ok((params, c, mode))
}

#[derive(Debug, Serialize)]
struct PointJson {
    re: f64,
    im: f64,
    size: u64,
    color_class: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bin {
    pub ix: u32,
    pub iy: u32,
    /// Bin center.
    pub re: f64,
    pub im: f64,
    pub count: u64,
    /// Most frequent class in the bin; ties go to the smaller id.
    pub color_class: u32,
}

/// Bins the set on a `grid x grid` lattice over `[-extent, extent]^2`;
/// bins are listed in row-major order of `(iy, ix)`.
pub fn bin_points(set: &PeriodSet, grid: u32) -> (f64, Vec<Bin>) {
    let extent = extent_of(set.values());
    let cell = 2.0 * extent / grid as f64;
    let index = |x: f64| (((x + extent) / cell).floor() as i64).clamp(0, grid as i64 - 1) as u32;
    let mut tagged: Vec<(u32, u32, u32)> = set
        .orbits
        .iter()
        .map(|o| (index(o.value.im), index(o.value.re), o.color_class))
        .collect();
    tagged.sort_unstable();
    let mut bins = Vec::new();
    let mut i = 0;
    while i < tagged.len() {
        let (iy, ix, _) = tagged[i];
        let mut j = i;
        let (mut best_class, mut best_count, mut total) = (0u32, 0u64, 0u64);
        while j < tagged.len() && (tagged[j].0, tagged[j].1) == (iy, ix) {
            let class = tagged[j].2;
            let mut k = j;
            while k < tagged.len() && tagged[k] == (iy, ix, class) {
                k += 1;
            }
            let run = (k - j) as u64;
            if run > best_count {
                (best_class, best_count) = (class, run);
            }
            total += run;
            j = k;
        }
        bins.push(Bin {
            ix,
            iy,
            re: -extent + (ix as f64 + 0.5) * cell,
            im: -extent + (iy as f64 + 0.5) * cell,
            count: total,
            color_class: best_class,
        });
        i = j;
    }
    (extent, bins)
}

fn periods_payload(state: &AppState, set: &PeriodSet) -> serde_json::Value {
    let mut body = json!({
        "params": ParamsJson::from(&set.params),
        "d": set.params.d(),
        "dihedral_order": dihedral_order(&set.params),
        "c": set.c,
        "mode": set.mode,
        "class_count": set.class_count,
        "orbit_count": set.orbits.len(),
    });
    if set.orbits.len() > state.config().bin_threshold {
        let grid = state.config().bin_grid;
        let (extent, bins) = bin_points(set, grid);
        body["binned"] = json!(true);
        body["bin_grid"] = json!(grid);
        body["extent"] = json!(extent);
        body["bins"] = json!(bins);
    } else {
        body["binned"] = json!(false);
        body["points"] = json!(set
            .orbits
            .iter()
            .map(|o| PointJson {
                re: o.value.re,
                im: o.value.im,
                size: o.size,
                color_class: o.color_class,
            })
            .collect::<Vec<_>>());
    }
    body
}

async fn periods_response(state: &AppState, q: QueryMap) -> Result<Response, ApiError> {
    let (params, c, mode) = period_query(state, &q)?;
    let table = match state.orbits(params).await? {
        Lookup::Ready(t) => t,
        Lookup::Pending => return Ok(state.defer(Deferred::Periods(q))),
    };
    let state2 = state.clone();
    let body = tokio::task::spawn_blocking(move || {
        table.colorize(c, mode).map(|set| periods_payload(&state2, &set))
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))??;
    Ok(Json(body).into_response())
}

fn render_args(q: &QueryMap) -> Result<RenderArgs, ApiError> {
    let defaults = RenderArgs::default();
    Ok(RenderArgs {
        width: param(q, "width")?.unwrap_or(defaults.width),
        height: param(q, "height")?.unwrap_or(defaults.height),
        margin: param(q, "margin")?.unwrap_or(defaults.margin),
        radius: param(q, "radius")?.unwrap_or(defaults.radius),
        background: q.get("background").cloned().unwrap_or(defaults.background),
        palette: q.get("palette").cloned(),
        layer_order: q.get("layer_order").cloned(),
    })
}

async fn render_response(state: &AppState, q: QueryMap) -> Result<Response, ApiError> {
    let args = render_args(&q)?;
    let spec = args.to_spec().map_err(|e| {
        let code = if e.flag == "--width/--height" {
            "invalid_dimension"
        } else {
            "invalid_parameter"
        };
        ApiError::bad(code, e.to_string())
    })?;
    if spec.width as u64 * spec.height as u64 > state.config().max_pixels {
        return Err(ApiError::bad("invalid_dimension", "canvas too large"));
    }
    let (params, c, mode) = period_query(state, &q)?;
    let table = match state.orbits(params).await? {
        Lookup::Ready(t) => t,
        Lookup::Pending => return Ok(state.defer(Deferred::Render(q))),
    };
    let png = tokio::task::spawn_blocking(move || -> Result<Vec<u8>, Error> {
        let set = table.colorize(c, mode)?;
        Ok(encode_png(&rasterize(&set, &spec)?))
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))??;
    Ok(([(header::CONTENT_TYPE, "image/png")], png).into_response())
}

async fn periods_handler(State(state): State<AppState>, Query(q): Query<QueryMap>) -> Response {
    periods_response(&state, q).await.unwrap_or_else(IntoResponse::into_response)
}

async fn render_handler(State(state): State<AppState>, Query(q): Query<QueryMap>) -> Response {
    render_response(&state, q).await.unwrap_or_else(IntoResponse::into_response)
}

async fn job_handler(State(state): State<AppState>, Path(token): Path<String>) -> Response {
    let Some(request) = state.0.jobs.lock().unwrap().get(&token).cloned() else {
        return ApiError {
            status: StatusCode::NOT_FOUND,
            code: "unknown_token",
            message: format!("no job {token}"),
        }
        .into_response();
    };
    let response = match request {
        Deferred::Periods(q) => periods_response(&state, q).await,
        Deferred::Render(q) => render_response(&state, q).await,
    }
    .unwrap_or_else(IntoResponse::into_response);
    if response.status() == StatusCode::ACCEPTED {
        // the retry minted a fresh token; keep handing out the original one
        return accepted(&token);
    }
    state.0.jobs.lock().unwrap().remove(&token);
    response
}

async fn stats_handler(State(state): State<AppState>) -> Response {
    Json(state.stats()).into_response()
}

async fn fillout_response(state: &AppState, q: QueryMap) -> Result<Response, ApiError> {
    let d: u64 = param(&q, "d")?
        .filter(|&d| d > 0)
        .ok_or_else(|| ApiError::bad("invalid_d", "d must be a positive integer"))?;
    if d > 1 << 20 {
        return Err(ApiError::bad("invalid_d", "d too large"));
    }
    let samples: u64 = param(&q, "samples")?.unwrap_or(10_000);
    if samples == 0 || samples > state.config().max_samples {
        return Err(ApiError::bad(
            "invalid_parameter",
            format!("samples must be in 1..={}", state.config().max_samples),
        ));
    }
    let seed: Option<u64> = param(&q, "seed")?;
    let strategy = match (q.get("strategy").map(String::as_str), seed) {
        (Some("grid"), _) | (None, None) => SampleStrategy::Grid,
        (Some("random"), seed) | (None, seed @ Some(_)) => SampleStrategy::Random {
            seed: seed.unwrap_or(gperiods_core::fillout::DEFAULT_SEED),
        },
        (Some(other), _) => {
            return Err(ApiError::bad("invalid_parameter", format!("unknown strategy {other}")))
        }
    };
    let body = tokio::task::spawn_blocking(move || -> Result<serde_json::Value, Error> {
        let map = LaurentMap::new(d)?;
        let points = sample_image(&map, samples, strategy)?;
        Ok(json!({
            "d": d,
            "arity": euler_totient(d),
            "strategy": strategy,
            "sample_count": points.len(),
            "points": points.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        }))
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))??;
    Ok(Json(body).into_response())
}

async fn fillout_handler(State(state): State<AppState>, Query(q): Query<QueryMap>) -> Response {
    fillout_response(&state, q).await.unwrap_or_else(IntoResponse::into_response)
}
