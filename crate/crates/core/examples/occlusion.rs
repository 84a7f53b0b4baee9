//! Front-to-back compositing against the per-pixel depth oracle. A small
//! random scene is rendered with the centroid-ordered path and with the
//! nearest-depth path, and the coverage difference is reported.
//!
//! `cargo run --example occlusion -- [seed]`

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use visphere::raster::{render_scene, Mesh, MeshInstance, RenderOptions, Scene, StepMode, Vertex};
use visphere::{bake_map, AovMode, ProjectionSpec, Vec3};

fn main() -> visphere::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let map = bake_map(&ProjectionSpec::Rectilinear { aov_deg: 90.0, mode: AovMode::Horizontal, lens: None }, 256, 256)?;

    // Screen-parallel triangles at distinct depths never interpenetrate.
    let mut mesh = Mesh::default();
    for n in 0..10 {
        let z = -2.0 - n as f64 * 0.5;
        let c = Vec3::new(rng.gen_range(-0.6..0.6) * -z, rng.gen_range(-0.6..0.6) * -z, z);
        let r = rng.gen_range(0.3..0.8) * -z * 0.5;
        let base = mesh.vertices.len();
        for k in 0..3 {
            let a = std::f64::consts::TAU * k as f64 / 3.0 + rng.gen_range(0.0..1.0);
            mesh.vertices.push(Vertex::new(c + Vec3::new(a.cos() * r, a.sin() * r, 0.0)));
        }
        mesh.faces.push([base, base + 1, base + 2]);
    }
    let scene = Scene { objects: vec![MeshInstance::new(Arc::new(mesh))], ..Scene::default() };
    let opts = RenderOptions { mode: StepMode::Binary, ..RenderOptions::default() };
    let sorted = render_scene(&scene, &map, &opts)?;
    let oracle = render_scene(&Scene { intersecting: true, ..scene.clone() }, &map, &opts)?;

    let a = sorted.buffers.mask.as_slice();
    let b = oracle.buffers.mask.as_slice();
    let differing = a.iter().zip(b).filter(|(x, y)| (*x - *y).abs() > 1e-9).count();
    let max_m = a.iter().cloned().fold(0.0, f64::max);
    println!("culled {} of 10 triangles", sorted.diagnostics.culled);
    println!("{differing} of {} pixels differ between sorted and depth-tested; max m = {max_m}", a.len());
    Ok(())
}
