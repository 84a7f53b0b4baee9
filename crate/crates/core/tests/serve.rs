//! The preview service, driven in-process through `tower::ServiceExt`.

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::response::Response;
use tower::ServiceExt;
use visphere::cli::serve::{router, AppState};
use visphere::projections::params::Limits;

async fn get(state: &AppState, uri: &str) -> Response {
    router(state.clone()).oneshot(Request::get(uri).body(Body::empty()).unwrap()).await.unwrap()
}

async fn body(r: Response) -> Vec<u8> {
    to_bytes(r.into_body(), usize::MAX).await.unwrap().to_vec()
}

fn header(r: &Response, name: &str) -> Option<String> {
    r.headers().get(name).map(|v| v.to_str().unwrap().to_owned())
}

#[tokio::test]
async fn limits_match_the_parameter_ranges() {
    let r = get(&AppState::default(), "/limits").await;
    assert_eq!(r.status(), StatusCode::OK);
    let limits: Limits = serde_json::from_slice(&body(r).await).unwrap();
    assert_eq!(limits, Limits::current());
    assert_eq!((limits.k, limits.l, limits.s), ([-1.0, 1.0], [0.0, 1.0], [0.8, 1.0]));
    assert!((limits.omega_deg_max_k_nonpositive - 360.0).abs() < 1e-9);
    assert!(limits.omega_deg_max_k_one < 180.0 && limits.omega_deg_max_k_one > 179.9);
}

#[tokio::test]
async fn presets_list_the_five_projections() {
    let r = get(&AppState::default(), "/presets").await;
    let v: serde_json::Value = serde_json::from_slice(&body(r).await).unwrap();
    let pairs: Vec<(String, f64)> =
        v.as_array().unwrap().iter().map(|p| (p["name"].as_str().unwrap().to_owned(), p["k"].as_f64().unwrap())).collect();
    let expected = [("gnomonic", 1.0), ("stereographic", 0.5), ("equidistant", 0.0), ("equisolid", -0.5), ("orthographic", -1.0)];
    assert_eq!(pairs, expected.map(|(n, k)| (n.to_owned(), k)).to_vec());
}

#[tokio::test]
async fn render_is_a_deterministic_png() {
    let state = AppState::new(None).unwrap();
    let uri = "/render?omega=170&k=0.5&l=1&s=1&yaw=10&pitch=-5&roll=0&scene=room&size=64";
    let a = get(&state, uri).await;
    assert_eq!(a.status(), StatusCode::OK);
    assert_eq!(header(&a, "content-type").as_deref(), Some("image/png"));
    let (a, b) = (body(a).await, body(get(&state, uri).await).await);
    assert_eq!(a, b);
    let img = image::load_from_memory(&a).unwrap().to_rgb8();
    assert_eq!(img.dimensions(), (64, 64));
    assert!(img.pixels().any(|p| p.0[0] > 100), "preview shows the room");
}

#[tokio::test]
async fn concurrent_requests_agree() {
    let state = AppState::new(None).unwrap();
    let uri = "/render?omega=200&k=0&size=48";
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let s = state.clone();
            tokio::spawn(async move { body(get(&s, uri).await).await })
        })
        .collect();
    let mut bodies = Vec::new();
    for h in handles {
        bodies.push(h.await.unwrap());
    }
    assert!(bodies.windows(2).all(|w| w[0] == w[1]));
}

#[tokio::test]
async fn clamped_values_are_echoed() {
    let state = AppState::default();
    let r = get(&state, "/render?omega=170&k=2&l=1.5&s=0.5&size=4096").await;
    assert_eq!(r.status(), StatusCode::OK);
    assert_eq!(header(&r, "x-clamped-k").as_deref(), Some("2 -> 1"));
    assert_eq!(header(&r, "x-clamped-l").as_deref(), Some("1.5 -> 1"));
    assert_eq!(header(&r, "x-clamped-s").as_deref(), Some("0.5 -> 0.8"));
    assert_eq!(header(&r, "x-clamped-size").as_deref(), Some("4096 -> 1024"));
    assert!(header(&r, "x-clamped-omega").is_none());

    let r = get(&state, "/render?omega=400&k=0&size=16").await;
    assert_eq!(header(&r, "x-clamped-omega").as_deref(), Some("400 -> 360"));
}

#[tokio::test]
async fn malformed_queries_are_400() {
    let state = AppState::default();
    for uri in [
        "/render?omega=abc",
        "/render?k=NaN",
        "/render?size=1",
        "/render?size=-3",
        "/render?yaw=inf",
        "/render?mode=sideways",
        "/render?colour=red",
    ] {
        let r = get(&state, uri).await;
        assert_eq!(r.status(), StatusCode::BAD_REQUEST, "{uri}");
    }
}

#[tokio::test]
async fn unknown_scene_is_404() {
    let r = get(&AppState::default(), "/render?scene=garden&size=8").await;
    assert_eq!(r.status(), StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn scene_directory_is_served_by_stem() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("box.json"), r#"{"objects": [{"primitive": "cube", "translate": [0, 0, -3]}]}"#).unwrap();
    let state = AppState::new(Some(dir.path())).unwrap();
    assert_eq!(state.scene_names(), ["box", "room"]);
    let r = get(&state, "/render?scene=box&size=32&omega=120&k=1").await;
    assert_eq!(r.status(), StatusCode::OK);
    let img = image::load_from_memory(&body(r).await).unwrap().to_rgb8();
    assert!(img.get_pixel(16, 16).0[0] > 0, "the cube sits straight ahead");
    assert_eq!(img.get_pixel(0, 0).0, [0, 0, 0]);
}
