//! Map files: a 3-channel PFM of raw unit vectors next to a JSON sidecar
//! `<stem>.json`, a δ plane `<stem>.delta.pfm` and an optional mask plane
//! `<stem>.mask.pfm`.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::io::pfm::{read_pfm, write_pfm, PfmImage};
use crate::io::png::{quantize8, write_rgb8};
use crate::projections::map::{MapLayout, PerspectiveMap};
use crate::sphere::Plane;

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    sibling(path, ".json")
}

pub fn delta_path(path: &Path) -> PathBuf {
    sibling(path, ".delta.pfm")
}

pub fn mask_path(path: &Path) -> PathBuf {
    sibling(path, ".mask.pfm")
}

fn scalar_pfm(plane: &Plane<f32>) -> PfmImage {
    PfmImage { width: plane.width(), height: plane.height(), channels: 1, data: plane.as_slice().to_vec() }
}

/// Writes the vector PFM at `path` plus its sidecar and planes. The δ plane
/// holds the reciprocal pixel width, exactly as kept in memory.
pub fn save_map(map: &PerspectiveMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let vectors = PfmImage {
        width: map.width(),
        height: map.height(),
        channels: 3,
        data: map.vectors().as_slice().iter().flatten().copied().collect(),
    };
    write_pfm(path, &vectors)?;
    write_pfm(delta_path(path), &scalar_pfm(map.delta()))?;
    if let Some(mask) = map.mask() {
        write_pfm(mask_path(path), &scalar_pfm(mask))?;
    }
    let json = serde_json::to_string_pretty(map.layout())?;
    std::fs::write(sidecar_path(path), json + "\n")?;
    Ok(())
}

pub fn load_map(path: impl AsRef<Path>) -> Result<PerspectiveMap> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::MissingAsset(path.to_owned()));
    }
    let side = sidecar_path(path);
    let text = std::fs::read_to_string(&side)
        .map_err(|e| Error::Format(format!("cannot read map sidecar {}: {e}", side.display())))?;
    let layout: MapLayout = serde_json::from_str(&text)?;
    let img = read_pfm(path)?;
    if img.channels != 3 {
        return Err(Error::Format("map vectors need a 3-channel PFM".into()));
    }
    if (img.width, img.height) != (layout.width, layout.height) {
        return Err(Error::Format(format!(
            "PFM is {}x{} but the sidecar says {}x{}",
            img.width, img.height, layout.width, layout.height
        )));
    }
    let vectors = Plane::from_vec(img.width, img.height, img.data.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect())?;
    let scalar = |p: PathBuf| -> Result<Plane<f32>> {
        let s = read_pfm(&p)?;
        if s.channels != 1 {
            return Err(Error::Format(format!("{} must be single-channel", p.display())));
        }
        Plane::from_vec(s.width, s.height, s.data)
    };
    let delta = if layout.has_delta && delta_path(path).exists() { Some(scalar(delta_path(path))?) } else { None };
    let mask = match layout.mask {
        Some(_) => Some(scalar(mask_path(path))?),
        None => None,
    };
    PerspectiveMap::from_parts(layout, vectors, delta, mask)
}

/// 8-bit preview with each channel `(v̂ + 1)/2`; pixels outside the
/// projection are black.
pub fn map_preview(map: &PerspectiveMap) -> Plane<[u8; 3]> {
    Plane::from_fn(map.width(), map.height(), |i, j| match map.vector(i, j) {
        Some(v) => [0, 1, 2].map(|c| quantize8((v[c] + 1.0) / 2.0)),
        None => [0; 3],
    })
}

pub fn save_map_preview(map: &PerspectiveMap, path: impl AsRef<Path>) -> Result<()> {
    write_rgb8(path, &map_preview(map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projections::{map::bake_map, ProjectionSpec};

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        for spec in [
            ProjectionSpec::Equirect,
            ProjectionSpec::Dome { compression_deg: 0.0, tilt_deg: 0.0, offset: 0.0 },
        ] {
            let map = bake_map(&spec, 64, 32).unwrap();
            let p = dir.path().join(format!("{}.pfm", spec.name()));
            save_map(&map, &p).unwrap();
            assert_eq!(load_map(&p).unwrap(), map);
        }
    }

    #[test]
    fn sidecar_is_required_and_checked() {
        let dir = tempfile::tempdir().unwrap();
        let map = bake_map(&ProjectionSpec::Equirect, 16, 8).unwrap();
        let p = dir.path().join("m.pfm");
        save_map(&map, &p).unwrap();
        let side = sidecar_path(&p);
        let text = std::fs::read_to_string(&side).unwrap();
        std::fs::write(&side, text.replace("\"width\": 16", "\"width\": 17")).unwrap();
        assert!(matches!(load_map(&p), Err(Error::Format(_))));
        std::fs::remove_file(&side).unwrap();
        assert!(matches!(load_map(&p), Err(Error::Format(_))));
    }

    #[test]
    fn preview_remaps_channels() {
        let map = bake_map(&ProjectionSpec::Equirect, 8, 4).unwrap();
        let png = map_preview(&map);
        let v = map.vector(3, 1).unwrap();
        assert_eq!(png.at(3, 1)[2], quantize8((v.z + 1.0) / 2.0));
    }
}
