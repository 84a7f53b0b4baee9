//! A textured quad seen through the wide universal perspective
//! (Ω = 270°, k = 0.32, l = 0.62, s = 0.86). Writes the per-edge half-space
//! masks, their intersection, and the barycentric coordinates as RGB.
//!
//! `cargo run --example fig1_quad -- [out_dir]`

use std::path::PathBuf;

use visphere::io::png::{quantize8, write_rgb8};
use visphere::raster::{barycentric, edge_matrix, rasterize_triangle, CameraTriangle, CameraVertex, StepMode};
use visphere::{bake_map, AovMode, Plane, ProjectionSpec, Vec3};

fn main() -> visphere::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "example-output/fig1".into()));
    std::fs::create_dir_all(&out)?;
    let spec = ProjectionSpec::Universal { omega_deg: 270.0, k: 0.32, l: 0.62, s: 0.86, mode: AovMode::Diagonal, lens: None };
    let map = bake_map(&spec, 480, 320)?;

    // A 3×3 quad one unit ahead, split along its diagonal.
    let corner = |x: f64, y: f64| CameraVertex::new(Vec3::new(x, y, 1.0)).with_uv([(x + 1.5) / 3.0, (y + 1.5) / 3.0]);
    let (a, b, c, d) = (corner(-1.5, -1.5), corner(1.5, -1.5), corner(1.5, 1.5), corner(-1.5, 1.5));
    let tris = [CameraTriangle::new(a, b, c), CameraTriangle::new(a, c, d)];

    let mut quad = Plane::filled(map.width(), map.height(), 0.0);
    let mut bary = Plane::filled(map.width(), map.height(), [0u8; 3]);
    for t in &tris {
        let em = edge_matrix(t, true)?;
        let cov = rasterize_triangle(&map, &em, StepMode::Pixel);
        for j in 0..map.height() {
            for i in 0..map.width() {
                let m = cov.at(i, j);
                *quad.get_mut(i, j) += m;
                if m > 0.0 {
                    if let Some(g) = map.vector(i, j) {
                        let bc = barycentric(&g, t)?;
                        let px = bary.get_mut(i, j);
                        for (k, w) in bc.b.iter().enumerate() {
                            px[k] = px[k].max(quantize8(w * m));
                        }
                    }
                }
            }
        }
    }

    // The four outer edges of the quad, each as its own half-space mask.
    let outer = [(a, b), (b, c), (c, d), (d, a)];
    let halves: Vec<Plane<f64>> = outer
        .iter()
        .map(|(p, q)| {
            let row = p.position.cross(&q.position).normalize();
            Plane::from_fn(map.width(), map.height(), |i, j| match map.vector(i, j) {
                Some(g) => visphere::sphere::gpstep(g.dot(&row), map.inv_delta(i, j)),
                None => 0.0,
            })
        })
        .collect();
    let colors = [[255u8, 64, 64], [64, 255, 64], [64, 64, 255], [255, 255, 64]];
    let rgb = Plane::from_fn(map.width(), map.height(), |i, j| {
        let mut px = [0u8; 3];
        for (h, col) in halves.iter().zip(colors) {
            for k in 0..3 {
                px[k] = px[k].saturating_add(quantize8(h.at(i, j) * f64::from(col[k]) / 1020.0));
            }
        }
        px
    });

    write_rgb8(out.join("halfspaces.png"), &rgb)?;
    write_rgb8(out.join("quad_mask.png"), &quad.map(|&m| [quantize8(m); 3]))?;
    write_rgb8(out.join("barycentric.png"), &bary)?;
    let covered = quad.as_slice().iter().filter(|&&m| m > 0.999).count();
    println!("quad covers {covered} full pixels of {}", map.valid_count());
    Ok(())
}
