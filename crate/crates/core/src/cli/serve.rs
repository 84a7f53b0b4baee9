//! Preview service: `GET /limits`, `GET /presets` and `GET /render`.
//!
//! Handlers are stateless apart from the read-only scene table, so the same
//! query always yields the same PNG bytes.

use std::collections::HashMap;
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::{header, HeaderMap, HeaderName, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use crate::cli::ServeArgs;
use crate::error::{Error, Result};
use crate::io::png::{encode_rgb8, quantize8};
use crate::io::primitives::demo_room;
use crate::io::scene::{load_scene, Strictness};
use crate::projections::map::bake_map;
use crate::projections::params::{Limits, PerspectiveParams, PRESETS};
use crate::projections::ProjectionSpec;
use crate::raster::{render_scene, RenderOptions, Scene};
use crate::sphere::AovMode;

pub const MAX_SIZE: usize = 1024;
pub const DEFAULT_SIZE: usize = 256;
pub const DEFAULT_SCENE: &str = "room";

#[derive(Clone)]
pub struct AppState {
    scenes: Arc<HashMap<String, Scene>>,
}

/// Just the built-in room.
impl Default for AppState {
    fn default() -> Self {
        Self { scenes: Arc::new(HashMap::from([(DEFAULT_SCENE.to_owned(), demo_room())])) }
    }
}

impl AppState {
    /// The built-in room plus every `*.json` scene in `dir`, keyed by stem.
    pub fn new(dir: Option<&std::path::Path>) -> Result<Self> {
        let mut scenes = HashMap::from([(DEFAULT_SCENE.to_owned(), demo_room())]);
        if let Some(dir) = dir {
            if !dir.is_dir() {
                return Err(Error::MissingAsset(dir.to_owned()));
            }
            for entry in std::fs::read_dir(dir)? {
                let path = entry?.path();
                if path.extension().is_some_and(|e| e == "json") {
                    let name = path.file_stem().expect("has stem").to_string_lossy().into_owned();
                    let doc = load_scene(&path, Strictness::Clamp)?;
                    scenes.insert(name, doc.scene);
                }
            }
        }
        Ok(Self { scenes: Arc::new(scenes) })
    }

    pub fn scene_names(&self) -> Vec<String> {
        let mut v: Vec<String> = self.scenes.keys().cloned().collect();
        v.sort();
        v
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/limits", get(limits))
        .route("/presets", get(presets))
        .route("/render", get(render))
        .with_state(state)
}

pub fn run(args: &ServeArgs) -> Result<()> {
    let state = AppState::new(args.scene_dir.as_deref())?;
    let addr = format!("{}:{}", args.bind, args.port);
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(&addr).await?;
        log::info!("serving on http://{addr} with scenes {:?}", state.scene_names());
        println!("listening on http://{addr}");
        axum::serve(listener, router(state)).await
    })?;
    Ok(())
}

async fn limits() -> Json<Limits> {
    Json(Limits::current())
}

#[derive(Serialize)]
struct Preset {
    name: &'static str,
    k: f64,
}

async fn presets() -> Json<Vec<Preset>> {
    Json(PRESETS.iter().map(|&(name, k)| Preset { name, k }).collect())
}

/// Angles in degrees. Missing parameters take a 170° stereographic view of
/// the built-in room.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderQuery {
    omega: Option<f64>,
    k: Option<f64>,
    l: Option<f64>,
    s: Option<f64>,
    yaw: Option<f64>,
    pitch: Option<f64>,
    roll: Option<f64>,
    scene: Option<String>,
    size: Option<usize>,
    mode: Option<String>,
}

fn bad_request(msg: impl Into<String>) -> Response {
    (StatusCode::BAD_REQUEST, msg.into()).into_response()
}

async fn render(State(state): State<AppState>, query: Result<Query<RenderQuery>, axum::extract::rejection::QueryRejection>) -> Response {
    let Query(q) = match query {
        Ok(q) => q,
        Err(e) => return bad_request(e.body_text()),
    };
    let mode = match q.mode.as_deref().map(str::parse::<AovMode>).transpose() {
        Ok(m) => m.unwrap_or(AovMode::Diagonal),
        Err(e) => return bad_request(e.to_string()),
    };
    let angles = [q.yaw, q.pitch, q.roll].map(|a| a.unwrap_or(0.0));
    if angles.iter().any(|a| !a.is_finite()) {
        return bad_request("camera angles must be finite");
    }
    let requested = q.size.unwrap_or(DEFAULT_SIZE);
    if requested < 2 {
        return bad_request("size must be at least 2");
    }
    let size = requested.min(MAX_SIZE);
    let (omega, k, l, s) = (q.omega.unwrap_or(170.0), q.k.unwrap_or(0.5), q.l.unwrap_or(1.0), q.s.unwrap_or(1.0));
    let (params, adjustments) = match PerspectiveParams::clamp_reporting(omega.to_radians(), k, l, s) {
        Ok(r) => r,
        Err(e) => return bad_request(e.to_string()),
    };

    let name = q.scene.clone().unwrap_or_else(|| DEFAULT_SCENE.to_owned());
    let Some(scene) = state.scenes.get(&name).cloned() else {
        return (StatusCode::NOT_FOUND, format!("unknown scene `{name}`")).into_response();
    };

    let mut headers = HeaderMap::new();
    headers.insert(header::CONTENT_TYPE, HeaderValue::from_static("image/png"));
    for a in &adjustments {
        // omega travels in degrees on the wire
        let (from, to) = if a.name == "omega" { (a.from.to_degrees(), a.to.to_degrees()) } else { (a.from, a.to) };
        let name = HeaderName::try_from(format!("x-clamped-{}", a.name)).expect("valid header name");
        headers.insert(name, HeaderValue::from_str(&format!("{from} -> {to}")).expect("ascii"));
    }
    if size != requested {
        headers.insert(
            HeaderName::from_static("x-clamped-size"),
            HeaderValue::from_str(&format!("{requested} -> {size}")).expect("ascii"),
        );
    }

    let job = tokio::task::spawn_blocking(move || preview_png(scene, &params, mode, angles, size));
    match job.await {
        Ok(Ok(png)) => (StatusCode::OK, headers, png).into_response(),
        Ok(Err(e)) => bad_request(e.to_string()),
        Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response(),
    }
}

/// Shaded, wire-overlaid preview of `scene` through a universal perspective,
/// with the camera turned by `[yaw, pitch, roll]` degrees.
pub fn preview_png(mut scene: Scene, params: &PerspectiveParams, mode: AovMode, angles: [f64; 3], size: usize) -> Result<Vec<u8>> {
    let map = bake_map(&ProjectionSpec::universal(params, mode), size, size)?;
    scene.camera.yaw += angles[0].to_radians();
    scene.camera.pitch += angles[1].to_radians();
    scene.camera.roll += angles[2].to_radians();
    let out = render_scene(&scene, &map, &RenderOptions { wireframe: true, ..RenderOptions::default() })?;
    let shaded = out.shaded(&map);
    encode_rgb8(&shaded.map(|&v| [quantize8(v); 3]))
}
