//! 8- and 16-bit PNG export. PNG rows run top to bottom, so every write
//! flips the bottom-up [`Plane`].

use std::io::Cursor;
use std::path::Path;

use image::{ImageBuffer, ImageFormat, Luma, Rgb, Rgba};

use crate::error::Result;
use crate::sphere::Plane;

fn flipped<T, const N: usize, S>(plane: &Plane<[T; N]>) -> Vec<S>
where
    T: Copy + Into<S>,
{
    let (w, h) = (plane.width(), plane.height());
    let mut out = Vec::with_capacity(w * h * N);
    for row in (0..h).rev() {
        for i in 0..w {
            out.extend(plane.at(i, row).iter().map(|&c| c.into()));
        }
    }
    out
}

pub fn encode_rgb8(plane: &Plane<[u8; 3]>) -> Result<Vec<u8>> {
    let img: ImageBuffer<Rgb<u8>, _> =
        ImageBuffer::from_raw(plane.width() as u32, plane.height() as u32, flipped::<u8, 3, u8>(plane))
            .expect("buffer size matches");
    let mut out = Cursor::new(Vec::new());
    img.write_to(&mut out, ImageFormat::Png)?;
    Ok(out.into_inner())
}

pub fn write_rgb8(path: impl AsRef<Path>, plane: &Plane<[u8; 3]>) -> Result<()> {
    std::fs::write(path, encode_rgb8(plane)?)?;
    Ok(())
}

pub fn write_rgba8(path: impl AsRef<Path>, plane: &Plane<[u8; 4]>) -> Result<()> {
    let img: ImageBuffer<Rgba<u8>, _> =
        ImageBuffer::from_raw(plane.width() as u32, plane.height() as u32, flipped::<u8, 4, u8>(plane))
            .expect("buffer size matches");
    img.save_with_format(path, ImageFormat::Png)?;
    Ok(())
}

pub fn write_gray16(path: impl AsRef<Path>, plane: &Plane<u16>) -> Result<()> {
    let wrapped = plane.map(|&v| [v]);
    let img: ImageBuffer<Luma<u16>, _> =
        ImageBuffer::from_raw(plane.width() as u32, plane.height() as u32, flipped::<u16, 1, u16>(&wrapped))
            .expect("buffer size matches");
    img.save_with_format(path, ImageFormat::Png)?;
    Ok(())
}

/// Any PNG as RGBA8, bottom row first.
pub fn read_rgba8(path: impl AsRef<Path>) -> Result<Plane<[u8; 4]>> {
    let img = image::open(path)?.to_rgba8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    Ok(Plane::from_fn(w, h, |i, j| img.get_pixel(i as u32, (h - 1 - j) as u32).0))
}

/// Float in `[0, 1]` to the 8-bit range.
pub fn quantize8(x: f64) -> u8 {
    (x.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn quantize16(x: f64) -> u16 {
    (x.clamp(0.0, 1.0) * 65535.0).round() as u16
}
