//! Writing render passes as PFM or PNG, picked by file extension.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::pfm::{write_pfm, PfmImage};
use crate::io::png::{quantize16, quantize8, write_gray16, write_rgb8};
use crate::projections::map::PerspectiveMap;
use crate::raster::RenderOutput;
use crate::sphere::Plane;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pass {
    Mask,
    /// Distance along `Ĝ`, not the `z` coordinate.
    Depth,
    Uv,
    Normal,
    Shaded,
    Wireframe,
}

impl Pass {
    pub const ALL: [Pass; 6] = [Pass::Mask, Pass::Depth, Pass::Uv, Pass::Normal, Pass::Shaded, Pass::Wireframe];

    pub fn name(self) -> &'static str {
        match self {
            Pass::Mask => "mask",
            Pass::Depth => "depth",
            Pass::Uv => "uv",
            Pass::Normal => "normal",
            Pass::Shaded => "shaded",
            Pass::Wireframe => "wireframe",
        }
    }
}

impl FromStr for Pass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Pass::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown pass `{s}`")))
    }
}

enum Data {
    Scalar(Plane<f64>),
    /// Float triples plus their 8-bit preview.
    Color(Plane<[f64; 3]>, Plane<[u8; 3]>),
}

fn pass_data(out: &RenderOutput, map: &PerspectiveMap, pass: Pass) -> Result<Data> {
    let b = &out.buffers;
    Ok(match pass {
        Pass::Mask => Data::Scalar(b.mask.clone()),
        Pass::Depth => Data::Scalar(b.resolved_depth()),
        Pass::Uv => {
            let uv = b.resolved_uv().map(|&[u, v]| [u, v, 0.0]);
            let png = uv.map(|c| [quantize8(c[0]), quantize8(c[1]), 0]);
            Data::Color(uv, png)
        }
        Pass::Normal => {
            let n = b.normals().map(|n| [n.x, n.y, n.z]);
            let png = n.map(|c| {
                if c.iter().all(|&x| x == 0.0) { [0; 3] } else { c.map(|x| quantize8((x + 1.0) / 2.0)) }
            });
            Data::Color(n, png)
        }
        Pass::Shaded => Data::Scalar(out.shaded(map)),
        Pass::Wireframe => Data::Scalar(
            out.wire.clone().ok_or_else(|| Error::domain("the render did not produce a wire plane"))?,
        ),
    })
}

/// Writes one pass. `.pfm` keeps floats; `.png` stores scalars as 16-bit
/// gray (depth scaled by its maximum) and vectors as 8-bit RGB.
pub fn save_pass(out: &RenderOutput, map: &PerspectiveMap, pass: Pass, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    let data = pass_data(out, map, pass)?;
    match (ext.as_str(), data) {
        ("pfm", Data::Scalar(p)) => write_pfm(
            path,
            &PfmImage { width: p.width(), height: p.height(), channels: 1, data: p.as_slice().iter().map(|&x| x as f32).collect() },
        ),
        ("pfm", Data::Color(p, _)) => write_pfm(
            path,
            &PfmImage {
                width: p.width(),
                height: p.height(),
                channels: 3,
                data: p.as_slice().iter().flatten().map(|&x| x as f32).collect(),
            },
        ),
        ("png", Data::Scalar(p)) => {
            let scale = if pass == Pass::Depth {
                p.as_slice().iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE)
            } else {
                1.0
            };
            write_gray16(path, &p.map(|&x| quantize16(x / scale)))
        }
        ("png", Data::Color(_, png)) => write_rgb8(path, &png),
        _ => Err(Error::Format(format!("unsupported pass extension `{ext}` (pfm or png)"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::pfm::read_pfm;
    use crate::projections::{map::bake_map, ProjectionSpec};
    use crate::raster::{render_scene, RenderOptions, Scene};

    #[test]
    fn empty_scene_gives_zero_images() {
        let dir = tempfile::tempdir().unwrap();
        let map = bake_map(&ProjectionSpec::Equirect, 16, 8).unwrap();
        let out = render_scene(&Scene::default(), &map, &RenderOptions { wireframe: true, ..Default::default() }).unwrap();
        for pass in Pass::ALL {
            let pfm = dir.path().join(format!("{}.pfm", pass.name()));
            save_pass(&out, &map, pass, &pfm).unwrap();
            assert!(read_pfm(&pfm).unwrap().data.iter().all(|&x| x == 0.0));
            let png = dir.path().join(format!("{}.png", pass.name()));
            save_pass(&out, &map, pass, &png).unwrap();
            let img = image::open(&png).unwrap().to_rgb16();
            assert!(img.pixels().all(|p| p.0 == [0, 0, 0]), "{pass:?}");
        }
    }

    #[test]
    fn pass_names_round_trip() {
        for p in Pass::ALL {
            assert_eq!(p.name().parse::<Pass>().unwrap(), p);
        }
        assert!("beauty".parse::<Pass>().is_err());
    }
}
