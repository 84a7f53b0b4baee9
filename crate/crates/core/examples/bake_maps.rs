//! Bakes one map per projection family and writes both the float map and an
//! 8-bit preview for each.
//!
//! `cargo run --example bake_maps -- [out_dir]`

use std::path::PathBuf;

use visphere::io::{save_map, save_map_preview};
use visphere::{bake_map, AovMode, ProjectionSpec};

fn main() -> visphere::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "example-output/maps".into()));
    std::fs::create_dir_all(&out)?;

    let specs: Vec<(ProjectionSpec, usize, usize)> = vec![
        (ProjectionSpec::Rectilinear { aov_deg: 90.0, mode: AovMode::Horizontal, lens: None }, 256, 256),
        (
            ProjectionSpec::Universal { omega_deg: 270.0, k: 0.32, l: 0.62, s: 0.86, mode: AovMode::Diagonal, lens: None },
            384,
            256,
        ),
        (ProjectionSpec::Panorama { omega_h_deg: 360.0, height: 2.0 }, 512, 160),
        (ProjectionSpec::Dome { compression_deg: 0.0, tilt_deg: 21.0, offset: 0.0 }, 256, 256),
        (ProjectionSpec::Equirect, 512, 256),
        (ProjectionSpec::Cubemap, 768, 128),
        (ProjectionSpec::ScreenArray { screens: 3, omega_h_deg: 60.0, aspect: 16.0 / 9.0 }, 576, 108),
        (ProjectionSpec::Vr { ipd: 0.06, omega_v_deg: 100.0, radial: vec![0.22, 0.24] }, 512, 256),
    ];

    for (spec, w, h) in specs {
        let map = bake_map(&spec, w, h)?;
        let stem = out.join(spec.name());
        save_map(&map, stem.with_extension("pfm"))?;
        save_map_preview(&map, stem.with_extension("png"))?;
        println!("{:<20} {w}x{h}  {} valid pixels", spec.name(), map.valid_count());
    }
    Ok(())
}
