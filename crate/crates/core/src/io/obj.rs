//! Wavefront OBJ subset: `v`, `vt`, `vn` and `f` records. Polygons are
//! triangulated as fans; materials and groups are ignored.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::raster::{Mesh, Vertex};
use crate::sphere::Vec3;

#[derive(Clone, Debug, PartialEq)]
pub struct ObjMesh {
    pub mesh: Mesh,
    pub warnings: Vec<String>,
}

pub fn load_obj(path: impl AsRef<Path>) -> Result<ObjMesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingAsset(path.to_owned()),
        _ => e.into(),
    })?;
    let out = parse_obj(&text, &path.display().to_string())?;
    for w in &out.warnings {
        log::warn!("{}: {w}", path.display());
    }
    Ok(out)
}

/// `label` names the source in error messages.
pub fn parse_obj(text: &str, label: &str) -> Result<ObjMesh> {
    let mut positions: Vec<Vec3> = Vec::new();
    let mut uvs: Vec<[f64; 2]> = Vec::new();
    let mut normals: Vec<Vec3> = Vec::new();
    let mut mesh = Mesh::default();
    let mut warnings = Vec::new();
    let mut index: HashMap<(usize, Option<usize>, Option<usize>), usize> = HashMap::new();
    let mut missing_uv = false;

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let err = |message: String| Error::Parse { path: label.to_owned(), line: line_no, message };
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut fields = line.split_whitespace();
        let Some(keyword) = fields.next() else { continue };
        let rest: Vec<&str> = fields.collect();
        let floats = |min: usize| -> Result<Vec<f64>> {
            if rest.len() < min {
                return Err(err(format!("`{keyword}` needs {min} numbers")));
            }
            rest.iter()
                .map(|s| s.parse::<f64>().ok().filter(|x| x.is_finite()))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| err(format!("`{keyword}` has a non-numeric field")))
        };
        match keyword {
            "v" => {
                let c = floats(3)?;
                positions.push(Vec3::new(c[0], c[1], c[2]));
            }
            "vt" => {
                let c = floats(1)?;
                uvs.push([c[0], c.get(1).copied().unwrap_or(0.0)]);
            }
            "vn" => {
                let c = floats(3)?;
                normals.push(Vec3::new(c[0], c[1], c[2]));
            }
            "f" => {
                if rest.len() < 3 {
                    return Err(err(format!("face needs at least 3 vertices, got {}", rest.len())));
                }
                let mut corners = Vec::with_capacity(rest.len());
                for item in &rest {
                    let mut parts = item.split('/');
                    let resolve = |s: Option<&str>, len: usize, what: &str| -> Result<Option<usize>> {
                        match s.filter(|s| !s.is_empty()) {
                            None => Ok(None),
                            Some(s) => {
                                let k: i64 = s.parse().map_err(|_| err(format!("bad {what} index `{s}`")))?;
                                let idx = if k > 0 { k - 1 } else { len as i64 + k };
                                if k == 0 || idx < 0 {
                                    return Err(err(format!("{what} index {k} is invalid")));
                                }
                                Ok(Some(idx as usize))
                            }
                        }
                    };
                    let v = resolve(parts.next(), positions.len(), "vertex")?
                        .ok_or_else(|| err("face corner without a vertex index".into()))?;
                    if v >= positions.len() {
                        return Err(err(format!("vertex index {} is past the {} vertices so far", v + 1, positions.len())));
                    }
                    let mut vt = resolve(parts.next(), uvs.len(), "texture")?;
                    if vt.is_some_and(|t| t >= uvs.len()) {
                        missing_uv = true;
                        vt = None;
                    }
                    let vn = resolve(parts.next(), normals.len(), "normal")?;
                    if vn.is_some_and(|t| t >= normals.len()) {
                        return Err(err(format!("normal index {} is past the {} normals so far", vn.unwrap() + 1, normals.len())));
                    }
                    let key = (v, vt, vn);
                    let id = *index.entry(key).or_insert_with(|| {
                        mesh.vertices.push(Vertex {
                            position: positions[v],
                            uv: vt.map(|t| uvs[t]).unwrap_or([0.0; 2]),
                            normal: vn.map(|t| normals[t]),
                        });
                        mesh.vertices.len() - 1
                    });
                    corners.push(id);
                }
                for k in 1..corners.len() - 1 {
                    mesh.faces.push([corners[0], corners[k], corners[k + 1]]);
                }
            }
            "o" | "g" | "s" | "mtllib" | "usemtl" | "l" | "p" => {}
            other => warnings.push(format!("line {line_no}: ignored record `{other}`")),
        }
    }
    if missing_uv {
        warnings.push("faces reference missing texture coordinates; using (0, 0)".into());
    }
    if mesh.faces.is_empty() {
        warnings.push("no faces".into());
        // keep bare vertex clouds addressable
        if mesh.vertices.is_empty() {
            mesh.vertices = positions.iter().map(|&p| Vertex::new(p)).collect();
        }
    }
    Ok(ObjMesh { mesh, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUAD: &str = "\
# unit quad
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
vt 0 0
vt 1 0
vt 1 1
vt 0 1
vn 0 0 1
f 1/1/1 2/2/1 3/3/1 4/4/1
";

    #[test]
    fn quad_is_two_triangles() {
        let m = parse_obj(QUAD, "quad.obj").unwrap();
        assert_eq!(m.mesh.vertices.len(), 4);
        assert_eq!(m.mesh.faces, vec![[0, 1, 2], [0, 2, 3]]);
        assert_eq!(m.mesh.vertices[2].uv, [1.0, 1.0]);
        assert_eq!(m.mesh.vertices[0].normal, Some(Vec3::z()));
        assert!(m.warnings.is_empty());
    }

    #[test]
    fn vertices_only_warns() {
        let m = parse_obj("v 0 0 0\nv 1 0 0\n", "pts.obj").unwrap();
        assert_eq!(m.mesh.faces.len(), 0);
        assert_eq!(m.mesh.vertices.len(), 2);
        assert!(m.warnings.iter().any(|w| w.contains("no faces")));
    }

    #[test]
    fn missing_uv_defaults_with_warning() {
        let m = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1/5 2/5 3/5\n", "t.obj").unwrap();
        assert!(m.mesh.vertices.iter().all(|v| v.uv == [0.0, 0.0]));
        assert!(!m.warnings.is_empty());
    }

    #[test]
    fn negative_indices() {
        let m = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n", "t.obj").unwrap();
        assert_eq!(m.mesh.faces, vec![[0, 1, 2]]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        match parse_obj("v 0 0 0\nv 1 x 0\n", "bad.obj") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse_obj("v 0 0 0\nf 1 2 3\n", "bad.obj") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }
}
