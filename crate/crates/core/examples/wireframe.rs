//! Renders the built-in room as a wire overlay on a stereographic dome-like
//! view and writes the shaded preview.
//!
//! `cargo run --example wireframe -- [out_dir]`

use std::path::PathBuf;

use visphere::io::passes::{save_pass, Pass};
use visphere::io::primitives::demo_room;
use visphere::raster::{render_scene, RenderOptions};
use visphere::{bake_map, AovMode, PerspectiveParams, ProjectionSpec};

fn main() -> visphere::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "example-output/wireframe".into()));
    std::fs::create_dir_all(&out)?;
    let params = PerspectiveParams::from_degrees(200.0, 0.5, 1.0, 1.0)?;
    let map = bake_map(&ProjectionSpec::universal(&params, AovMode::Diagonal), 512, 512)?;
    let scene = demo_room();
    let opts = RenderOptions { wireframe: true, ..RenderOptions::default() };
    let rendered = render_scene(&scene, &map, &opts)?;
    save_pass(&rendered, &map, Pass::Wireframe, out.join("room.wireframe.png"))?;
    save_pass(&rendered, &map, Pass::Shaded, out.join("room.shaded.png"))?;
    println!("{:?}", rendered.diagnostics);
    Ok(())
}
