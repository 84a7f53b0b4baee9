//! Converts a picture between two universal perspectives. A synthetic
//! checkerboard shot with a 90° gnomonic lens is reprojected to equidistant
//! and back, and the round-trip PSNR over the interior is printed.
//!
//! `cargo run --example remap_projection -- [out_dir]`

use std::path::PathBuf;

use visphere::cli::{remap_image, Filter};
use visphere::io::png::write_rgba8;
use visphere::{AovMode, PerspectiveParams, Plane};

fn main() -> visphere::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "example-output/remap".into()));
    std::fs::create_dir_all(&out)?;
    let n = 256;
    let checker = Plane::from_fn(n, n, |i, j| {
        // soft checkerboard so bilinear resampling stays representative
        let v = ((i as f64 * 0.15).sin() * (j as f64 * 0.15).sin() * 0.5 + 0.5) * 255.0;
        [v as u8, (255 - v as u8), 128, 255]
    });
    let gnomonic = PerspectiveParams::from_degrees(90.0, 1.0, 1.0, 1.0)?;
    let equidistant = PerspectiveParams::from_degrees(90.0, 0.0, 1.0, 1.0)?;

    let there = remap_image(&checker, &gnomonic, &equidistant, AovMode::Diagonal, n, n, Filter::Bilinear)?;
    let back = remap_image(&there, &equidistant, &gnomonic, AovMode::Diagonal, n, n, Filter::Bilinear)?;
    write_rgba8(out.join("source.png"), &checker)?;
    write_rgba8(out.join("equidistant.png"), &there)?;
    write_rgba8(out.join("roundtrip.png"), &back)?;

    let (mut se, mut count) = (0.0, 0usize);
    for j in n / 8..n - n / 8 {
        for i in n / 8..n - n / 8 {
            for c in 0..3 {
                let d = f64::from(checker.at(i, j)[c]) - f64::from(back.at(i, j)[c]);
                se += d * d;
                count += 1;
            }
        }
    }
    let psnr = 10.0 * (255.0f64.powi(2) / (se / count as f64)).log10();
    println!("interior round-trip PSNR {psnr:.1} dB");
    Ok(())
}
