//! A grid of spheres drawn as particles: each is a single small-circle test
//! per pixel, with analytic depth and normals.
//!
//! `cargo run --example particles -- [out_dir]`

use std::path::PathBuf;

use visphere::io::passes::{save_pass, Pass};
use visphere::raster::{render_scene, Particle, RenderOptions, Scene};
use visphere::{bake_map, AovMode, ProjectionSpec, Vec3};

fn main() -> visphere::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "example-output/particles".into()));
    std::fs::create_dir_all(&out)?;
    let spec = ProjectionSpec::Universal { omega_deg: 180.0, k: 0.0, l: 1.0, s: 1.0, mode: AovMode::Diagonal, lens: None };
    let map = bake_map(&spec, 512, 512)?;

    let mut scene = Scene::default();
    for row in -3..=3 {
        for col in -3..=3 {
            let p = Vec3::new(f64::from(col) * 1.2, f64::from(row) * 1.2, -4.0);
            scene.particles.push(Particle::new(p, 0.45)?);
        }
    }
    let rendered = render_scene(&scene, &map, &RenderOptions::default())?;
    for pass in [Pass::Mask, Pass::Depth, Pass::Normal, Pass::Shaded] {
        save_pass(&rendered, &map, pass, out.join(format!("particles.{}.png", pass.name())))?;
    }
    println!("{} particles rendered", rendered.diagnostics.particles);
    Ok(())
}
