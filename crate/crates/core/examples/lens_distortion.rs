//! Rectilinear maps with Brown-Conrady barrel and pincushion distortion, all
//! rendering the same room so the bending of straight edges is visible.
//!
//! `cargo run --example lens_distortion -- [out_dir]`

use std::path::PathBuf;

use visphere::io::passes::{save_pass, Pass};
use visphere::io::primitives::demo_room;
use visphere::projections::lens::LensDistortionCoeffs;
use visphere::raster::{render_scene, RenderOptions};
use visphere::{bake_map, AovMode, ProjectionSpec};

fn main() -> visphere::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "example-output/lens".into()));
    std::fs::create_dir_all(&out)?;
    let scene = demo_room();
    let opts = RenderOptions { wireframe: true, ..RenderOptions::default() };
    for (name, k1) in [("none", 0.0), ("barrel", -0.18), ("pincushion", 0.18)] {
        let lens = LensDistortionCoeffs { radial: vec![k1], ..Default::default() };
        let spec = ProjectionSpec::Rectilinear { aov_deg: 100.0, mode: AovMode::Horizontal, lens: Some(lens) };
        let map = bake_map(&spec, 400, 300)?;
        let rendered = render_scene(&scene, &map, &opts)?;
        save_pass(&rendered, &map, Pass::Shaded, out.join(format!("room.{name}.png")))?;
        println!("{name:<11} k1 = {k1:+.2}");
    }
    Ok(())
}
