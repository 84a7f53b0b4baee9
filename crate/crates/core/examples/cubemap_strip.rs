//! Renders the room into a 6:1 cube strip and checks that neighbouring faces
//! agree on their shared edges.
//!
//! `cargo run --example cubemap_strip -- [out_dir]`

use std::path::PathBuf;

use visphere::io::passes::{save_pass, Pass};
use visphere::io::primitives::demo_room;
use visphere::projections::generators::{cube_face_matrix, cubemap_lookup};
use visphere::raster::{render_scene, RenderOptions};
use visphere::{bake_map, ProjectionSpec, Vec3};

fn main() -> visphere::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "example-output/cubemap".into()));
    std::fs::create_dir_all(&out)?;
    let map = bake_map(&ProjectionSpec::Cubemap, 768, 128)?;
    let rendered = render_scene(&demo_room(), &map, &RenderOptions { wireframe: true, ..RenderOptions::default() })?;
    save_pass(&rendered, &map, Pass::Shaded, out.join("room.cubemap.png"))?;

    // A step past each face's +u edge lands on the rim of its neighbour.
    for face in 0..6 {
        let edge = cube_face_matrix(face) * Vec3::new(0.501, 0.0, 0.5);
        let (neighbour, t) = cubemap_lookup(&edge).expect("edge direction has a face");
        println!("face {face} right edge -> face {neighbour} at (s, t) = ({:.4}, {:.4})", t.s, t.t);
    }
    Ok(())
}
