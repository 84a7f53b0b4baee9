//! JSON scene documents.
//!
//! ```json
//! {
//!   "projection": {"type": "universal", "omega_deg": 270, "k": 0.32, "l": 0.62, "s": 0.86},
//!   "camera": {"yaw": 0, "pitch": 0, "roll": 0, "position": [0, 0, 0]},
//!   "objects": [{"primitive": "quad", "translate": [0, 0, -2]}, {"obj": "teapot.obj"}],
//!   "lines": [[[0, 0, -1], [1, 0, -1]]],
//!   "particles": [{"position": [0, 0, -3], "radius": 0.2}],
//!   "parallax": [[0, 0], [3.14159, 0.02]],
//!   "flags": {"intersecting": false}
//! }
//! ```
//!
//! Camera angles are radians; object rotations are degrees. The projection
//! may instead reference a baked map with `{"map": "path.pfm"}`.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::{Matrix4, Rotation3, Translation3};
use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::io::{obj::load_obj, primitives};
use crate::projections::params::Adjustment;
use crate::projections::ProjectionSpec;
use crate::raster::{Camera, Mesh, MeshInstance, ParallaxProfile, Particle, Scene};
use crate::sphere::Vec3;

/// What to do with out-of-range universal parameters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strictness {
    /// Reject with the nearest valid value as a suggestion.
    Strict,
    /// Move to the nearest valid value and report it.
    #[default]
    Clamp,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProjectionSource {
    Spec(ProjectionSpec),
    Map(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SceneDocument {
    pub scene: Scene,
    pub projection: Option<ProjectionSource>,
    pub adjustments: Vec<Adjustment>,
    pub warnings: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScene {
    #[serde(default)]
    projection: Option<Value>,
    #[serde(default)]
    camera: Camera,
    #[serde(default)]
    objects: Vec<RawObject>,
    #[serde(default)]
    lines: Vec<[Vec3; 2]>,
    #[serde(default)]
    particles: Vec<Particle>,
    #[serde(default)]
    parallax: ParallaxProfile,
    #[serde(default)]
    flags: Flags,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct Flags {
    #[serde(default)]
    intersecting: bool,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Scale {
    Uniform(f64),
    Axes(Vec3),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObject {
    #[serde(default)]
    obj: Option<PathBuf>,
    #[serde(default)]
    primitive: Option<String>,
    /// Half extents for `cube` and `room`.
    #[serde(default)]
    size: Option<Vec3>,
    #[serde(default)]
    translate: Option<Vec3>,
    /// Yaw, pitch, roll in degrees, applied as `Ry·Rx·Rz`.
    #[serde(default)]
    rotate_deg: Option<Vec3>,
    #[serde(default)]
    scale: Option<Scale>,
    /// Row-major 4×4; replaces translate, rotate and scale.
    #[serde(default)]
    matrix: Option<[f64; 16]>,
}

impl RawObject {
    fn transform(&self) -> Result<Matrix4<f64>> {
        if let Some(m) = self.matrix {
            if self.translate.is_some() || self.rotate_deg.is_some() || self.scale.is_some() {
                return Err(Error::domain("`matrix` cannot be combined with translate/rotate_deg/scale"));
            }
            return Ok(Matrix4::from_row_slice(&m));
        }
        let t = Translation3::from(self.translate.unwrap_or_else(Vec3::zeros)).to_homogeneous();
        let r = match self.rotate_deg {
            Some(a) => {
                let (y, p, r) = (a.x.to_radians(), a.y.to_radians(), a.z.to_radians());
                (Rotation3::from_axis_angle(&Vec3::y_axis(), y)
                    * Rotation3::from_axis_angle(&Vec3::x_axis(), p)
                    * Rotation3::from_axis_angle(&Vec3::z_axis(), r))
                .to_homogeneous()
            }
            None => Matrix4::identity(),
        };
        let s = match &self.scale {
            Some(Scale::Uniform(k)) => Matrix4::new_scaling(*k),
            Some(Scale::Axes(v)) => Matrix4::new_nonuniform_scaling(v),
            None => Matrix4::identity(),
        };
        let m = t * r * s;
        if !m.iter().all(|x| x.is_finite()) || m.fixed_view::<3, 3>(0, 0).determinant() == 0.0 {
            return Err(Error::domain("object transform must be finite and invertible"));
        }
        Ok(m)
    }

    fn mesh(&self, base: Option<&Path>, warnings: &mut Vec<String>) -> Result<Mesh> {
        match (&self.obj, &self.primitive) {
            (Some(p), None) => {
                let path = match base {
                    Some(b) if p.is_relative() => b.join(p),
                    _ => p.clone(),
                };
                let loaded = load_obj(&path)?;
                warnings.extend(loaded.warnings.into_iter().map(|w| format!("{}: {w}", path.display())));
                Ok(loaded.mesh)
            }
            (None, Some(name)) => {
                let half = self.size.unwrap_or_else(|| Vec3::repeat(0.5));
                match name.as_str() {
                    "quad" => Ok(primitives::quad()),
                    "cube" => Ok(primitives::cuboid(half)),
                    "room" => Ok(primitives::room(half)),
                    other => Err(Error::domain(format!("unknown primitive `{other}` (quad, cube, room)"))),
                }
            }
            _ => Err(Error::domain("each object needs exactly one of `obj` or `primitive`")),
        }
    }
}

fn json_error(label: &str, e: serde_json::Error) -> Error {
    Error::Parse { path: label.to_owned(), line: e.line(), message: e.to_string() }
}

fn parse_projection(value: Value, strictness: Strictness, label: &str) -> Result<(ProjectionSource, Vec<Adjustment>)> {
    if let Some(obj) = value.as_object() {
        if let Some(map) = obj.get("map") {
            if obj.len() != 1 {
                return Err(Error::domain("a map reference takes no other projection keys"));
            }
            let path = map.as_str().ok_or_else(|| Error::domain("`map` must be a path string"))?;
            return Ok((ProjectionSource::Map(PathBuf::from(path)), Vec::new()));
        }
    }
    let type_name = value.get("type").and_then(Value::as_str).map(str::to_owned);
    let mut spec: ProjectionSpec = serde_json::from_value(value).map_err(|e| {
        let msg = e.to_string();
        match type_name {
            Some(t) if msg.contains("unknown variant") => Error::UnknownProjection(t),
            _ => Error::Parse { path: label.to_owned(), line: 0, message: format!("projection: {msg}") },
        }
    })?;
    let adjustments = match strictness {
        Strictness::Strict => {
            spec.universal_params(true)?;
            Vec::new()
        }
        Strictness::Clamp => spec.clamp_in_place()?,
    };
    Ok((ProjectionSource::Spec(spec), adjustments))
}

/// Parses a scene document. Relative OBJ paths resolve against `base`.
pub fn parse_scene(text: &str, base: Option<&Path>, strictness: Strictness) -> Result<SceneDocument> {
    parse_labeled(text, base, strictness, "<scene>")
}

fn parse_labeled(text: &str, base: Option<&Path>, strictness: Strictness, label: &str) -> Result<SceneDocument> {
    let raw: RawScene = serde_json::from_str(text).map_err(|e| json_error(label, e))?;
    raw.camera.validate()?;
    raw.parallax.validate()?;
    let mut warnings = Vec::new();
    let (projection, adjustments) = match raw.projection {
        Some(v) => {
            let (p, a) = parse_projection(v, strictness, label)?;
            (Some(p), a)
        }
        None => (None, Vec::new()),
    };
    for a in &adjustments {
        warnings.push(format!("clamped {} from {} to {}", a.name, a.from, a.to));
    }
    let mut objects = Vec::with_capacity(raw.objects.len());
    for o in &raw.objects {
        let mesh = o.mesh(base, &mut warnings)?;
        mesh.validate()?;
        objects.push(MeshInstance::new(Arc::new(mesh)).with_transform(o.transform()?));
    }
    for p in &raw.particles {
        if !(p.radius > 0.0) || !p.position.iter().all(|x| x.is_finite()) {
            return Err(Error::domain("particles need a finite position and positive radius"));
        }
        let d = (p.position - raw.camera.position).norm();
        if p.radius >= d {
            return Err(Error::domain(format!("particle radius {} encloses the camera at distance {d}", p.radius)));
        }
    }
    if raw.lines.iter().flatten().any(|p| !p.iter().all(|x| x.is_finite())) {
        return Err(Error::domain("line endpoints must be finite"));
    }
    let scene = Scene {
        camera: raw.camera,
        objects,
        lines: raw.lines,
        particles: raw.particles,
        parallax: raw.parallax,
        intersecting: raw.flags.intersecting,
    };
    Ok(SceneDocument { scene, projection, adjustments, warnings })
}

/// Reads a scene file; a map reference is resolved relative to the file.
pub fn load_scene(path: impl AsRef<Path>, strictness: Strictness) -> Result<SceneDocument> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingAsset(path.to_owned()),
        _ => e.into(),
    })?;
    let base = path.parent();
    let mut doc = parse_labeled(&text, base, strictness, &path.display().to_string())?;
    if let (Some(ProjectionSource::Map(p)), Some(b)) = (&mut doc.projection, base) {
        if p.is_relative() {
            *p = b.join(&*p);
        }
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_universal() {
        let doc = parse_scene(
            r#"{"projection":{"type":"universal","omega_deg":270,"k":0.32,"l":0.62,"s":0.86}}"#,
            None,
            Strictness::Strict,
        )
        .unwrap();
        let Some(ProjectionSource::Spec(ProjectionSpec::Universal { omega_deg, k, .. })) = doc.projection else {
            panic!("{:?}", doc.projection)
        };
        assert_eq!((omega_deg, k), (270.0, 0.32));
        assert_eq!(doc.scene.camera, Camera::default());
        assert!(doc.scene.objects.is_empty());
    }

    #[test]
    fn clamping_follows_strictness() {
        let text = r#"{"projection":{"type":"universal","omega_deg":90,"k":2,"l":1,"s":1}}"#;
        let doc = parse_scene(text, None, Strictness::Clamp).unwrap();
        let Some(ProjectionSource::Spec(ProjectionSpec::Universal { k, .. })) = doc.projection else { panic!() };
        assert_eq!(k, 1.0);
        assert_eq!(doc.adjustments.len(), 1);
        assert!(matches!(parse_scene(text, None, Strictness::Strict), Err(Error::OutOfRange { name: "k", .. })));
    }

    #[test]
    fn unknown_projection() {
        let r = parse_scene(r#"{"projection":{"type":"mercator"}}"#, None, Strictness::Clamp);
        assert!(matches!(r, Err(Error::UnknownProjection(t)) if t == "mercator"));
    }

    #[test]
    fn objects_and_transforms() {
        let doc = parse_scene(
            r#"{"objects":[{"primitive":"quad","translate":[0,0,-2],"scale":2},
                           {"primitive":"room","size":[3,2,4]}],
                "particles":[{"position":[0,0,-3],"radius":0.5}],
                "lines":[[[0,0,-1],[1,0,-1]]],
                "parallax":[[0,0],[3,0.1]],
                "flags":{"intersecting":true}}"#,
            None,
            Strictness::Clamp,
        )
        .unwrap();
        let s = &doc.scene;
        assert_eq!(s.objects.len(), 2);
        assert_eq!(s.objects[0].transform[(2, 3)], -2.0);
        assert_eq!(s.objects[0].transform[(0, 0)], 2.0);
        assert!(s.intersecting);
        assert_eq!(s.parallax.samples().len(), 2);
    }

    #[test]
    fn map_reference() {
        let doc = parse_scene(r#"{"projection":{"map":"maps/fig1.pfm"}}"#, None, Strictness::Clamp).unwrap();
        assert_eq!(doc.projection, Some(ProjectionSource::Map(PathBuf::from("maps/fig1.pfm"))));
    }

    #[test]
    fn errors_are_structured() {
        for text in [
            "{",
            r#"{"camera":{"yaw":"x"}}"#,
            r#"{"objects":[{}]}"#,
            r#"{"objects":[{"primitive":"torus"}]}"#,
            r#"{"objects":[{"obj":"nope.obj"}]}"#,
            r#"{"parallax":[[2,0],[1,0]]}"#,
            r#"{"surprise":1}"#,
        ] {
            assert!(parse_scene(text, None, Strictness::Clamp).is_err(), "{text}");
        }
        match parse_scene("{\n\"camera\": 5\n}", None, Strictness::Clamp) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_scene(r#"{"objects":[{"obj":"/nonexistent/x.obj"}]}"#, None, Strictness::Clamp),
            Err(Error::MissingAsset(_))
        ));
    }
}
