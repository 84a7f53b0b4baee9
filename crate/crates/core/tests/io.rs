//! File round trips and scene-document diagnostics.

use proptest::prelude::*;
use visphere::error::Error;
use visphere::io::{
    load_map, load_scene, parse_obj, parse_scene, read_pfm, save_map, save_pass, write_pfm, Pass, PfmImage,
    ProjectionSource, Strictness,
};
use visphere::raster::{render_scene, RenderOptions};
use visphere::{bake_map, AovMode, ProjectionSpec};

fn all_specs() -> Vec<ProjectionSpec> {
    vec![
        ProjectionSpec::Universal { omega_deg: 270.0, k: 0.32, l: 0.62, s: 0.86, mode: AovMode::Diagonal, lens: None },
        ProjectionSpec::Rectilinear { aov_deg: 90.0, mode: AovMode::Horizontal, lens: None },
        ProjectionSpec::Panorama { omega_h_deg: 360.0, height: 2.0 },
        ProjectionSpec::Dome { compression_deg: 10.0, tilt_deg: 20.0, offset: 0.1 },
        ProjectionSpec::Equirect,
        ProjectionSpec::Cubemap,
        ProjectionSpec::ScreenArray { screens: 3, omega_h_deg: 60.0, aspect: 1.5 },
        ProjectionSpec::Vr { ipd: 0.06, omega_v_deg: 100.0, radial: vec![0.2] },
        ProjectionSpec::MirrorDome {
            projector: [0.0, -0.3, 3.0],
            dome_origin: [0.0, 0.0, 1.0],
            dome_radius: 3.0,
            projector_aov_deg: 40.0,
        },
        ProjectionSpec::ProjectionMapping {
            observer: [0.0, 0.0, 0.0],
            projector: [0.2, 0.5, -1.0],
            room_half_extents: [3.0, 2.0, 3.0],
            projector_aov_deg: 70.0,
            yaw_deg: 0.0,
        },
    ]
}

#[test]
fn every_map_round_trips_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    for spec in all_specs() {
        let map = bake_map(&spec, 48, 32).unwrap();
        let path = dir.path().join(format!("{}.pfm", spec.name()));
        save_map(&map, &path).unwrap();
        let back = load_map(&path).unwrap();
        assert_eq!(back.vectors(), map.vectors(), "{}", spec.name());
        assert_eq!(back.delta(), map.delta(), "{}", spec.name());
        assert_eq!(back.mask(), map.mask(), "{}", spec.name());
        assert_eq!(back.layout(), map.layout(), "{}", spec.name());
    }
}

#[test]
fn map_files_are_little_endian_pfm() {
    let dir = tempfile::tempdir().unwrap();
    let map = bake_map(&ProjectionSpec::Equirect, 8, 4).unwrap();
    let path = dir.path().join("e.pfm");
    save_map(&map, &path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert!(bytes.starts_with(b"PF\n8 4\n-1"));
    let delta = std::fs::read(dir.path().join("e.delta.pfm")).unwrap();
    assert!(delta.starts_with(b"Pf\n8 4\n-1"));
}

#[test]
fn render_passes_round_trip_as_pfm() {
    let dir = tempfile::tempdir().unwrap();
    let map = bake_map(&ProjectionSpec::Rectilinear { aov_deg: 120.0, mode: AovMode::Horizontal, lens: None }, 64, 48).unwrap();
    let out = render_scene(&visphere::io::primitives::demo_room(), &map, &RenderOptions::default()).unwrap();
    let mask_path = dir.path().join("room.mask.pfm");
    save_pass(&out, &map, Pass::Mask, &mask_path).unwrap();
    let mask = read_pfm(&mask_path).unwrap();
    let expected: Vec<f32> = out.buffers.mask.as_slice().iter().map(|&m| m as f32).collect();
    assert_eq!(mask.data, expected);
    let normal_path = dir.path().join("room.normal.pfm");
    save_pass(&out, &map, Pass::Normal, &normal_path).unwrap();
    assert_eq!(read_pfm(&normal_path).unwrap().channels, 3);
    assert!(save_pass(&out, &map, Pass::Mask, dir.path().join("room.mask.exr")).is_err());
}

#[test]
fn scene_with_relative_obj_and_map() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("tri.obj"), "v 0 0 -2\nv 1 0 -2\nv 0 1 -2\nvt 0 0\nvt 1 0\nvt 0 1\nf 1/1 2/2 3/3\n").unwrap();
    let scene = dir.path().join("s.json");
    std::fs::write(
        &scene,
        r#"{
            "projection": {"map": "maps/m.pfm"},
            "camera": {"yaw": 0.1},
            "objects": [{"obj": "tri.obj", "rotate_deg": [10, 0, 0], "scale": 0.5}],
            "particles": [{"position": [0, 0, -4], "radius": 0.5}],
            "parallax": [[0.0, 0.0], [1.5, 0.05]],
            "flags": {"intersecting": true}
        }"#,
    )
    .unwrap();
    let doc = load_scene(&scene, Strictness::Clamp).unwrap();
    assert_eq!(doc.scene.objects.len(), 1);
    assert_eq!(doc.scene.objects[0].mesh.faces.len(), 1);
    assert!(doc.scene.intersecting);
    match doc.projection {
        Some(ProjectionSource::Map(p)) => assert_eq!(p, dir.path().join("maps/m.pfm")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn scene_errors_are_structured() {
    let cases = [
        (r#"{"objects": [{"primitive": "teapot"}]}"#, "primitive"),
        (r#"{"projection": {"type": "fisheye9"}}"#, "fisheye9"),
        (r#"{"camera": {"yaw": 0.1, "zoom": 2}}"#, "zoom"),
        ("{\n\"objects\": [\n", "<scene>:3"),
        (r#"{"particles": [{"position": [0, 0, -1], "radius": 2}]}"#, "radius"),
    ];
    for (text, needle) in cases {
        let err = parse_scene(text, None, Strictness::Clamp).unwrap_err();
        assert!(err.to_string().contains(needle), "{text}: {err}");
    }
    let strict = parse_scene(
        r#"{"projection": {"type": "universal", "omega_deg": 400, "k": 0, "l": 1, "s": 1}}"#,
        None,
        Strictness::Strict,
    );
    assert!(matches!(strict, Err(Error::OutOfRange { name: "omega", .. })));
    let clamped = parse_scene(
        r#"{"projection": {"type": "universal", "omega_deg": 400, "k": 0, "l": 1, "s": 1}}"#,
        None,
        Strictness::Clamp,
    )
    .unwrap();
    assert_eq!(clamped.adjustments.len(), 1);
}

#[test]
fn missing_scene_is_missing_asset() {
    let err = load_scene("/nonexistent/scene.json", Strictness::Clamp).unwrap_err();
    assert!(matches!(err, Error::MissingAsset(_)));
}

#[test]
fn obj_errors_carry_lines() {
    let err = parse_obj("v 0 0 0\nv 1 0 0\nf 1 2 9\n", "bad.obj").unwrap_err();
    assert!(err.to_string().contains("bad.obj:3"), "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pfm_bytes_round_trip(w in 1usize..9, h in 1usize..9, gray in any::<bool>(), seed in any::<u64>()) {
        let channels = if gray { 1 } else { 3 };
        let data: Vec<f32> = (0..w * h * channels)
            .map(|n| ((seed.wrapping_mul(n as u64 + 1) % 10_007) as f32 - 5000.0) * 1e-3)
            .collect();
        let img = PfmImage::new(w, h, channels, data).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.pfm");
        write_pfm(&path, &img).unwrap();
        prop_assert_eq!(read_pfm(&path).unwrap(), img);
    }

    /// Arbitrary text never panics the scene parser.
    #[test]
    fn scene_parser_is_total(text in "\\PC{0,200}") {
        let _ = parse_scene(&text, None, Strictness::Clamp);
    }

    /// Neither do well-formed JSON values of the wrong shape.
    #[test]
    fn scene_parser_total_on_json(
        key in prop::sample::select(vec!["projection", "camera", "objects", "lines", "particles", "parallax", "flags"]),
        value in prop::sample::select(vec!["null", "1", "-3.5", "\"x\"", "[]", "{}", "[[1,2,3]]", "[{}]", "{\"type\": 1}", "[[0, -1]]"]),
    ) {
        let text = format!("{{\"{key}\": {value}}}");
        let _ = parse_scene(&text, None, Strictness::Clamp);
    }

    #[test]
    fn obj_parser_is_total(text in "(v|vt|vn|f|#| |[0-9]|-|/|\\.|\n){0,120}") {
        let _ = parse_obj(&text, "p.obj");
    }
}
