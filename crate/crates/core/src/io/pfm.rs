//! Portable float maps. Rows are stored bottom to top, which matches
//! [`Plane`](crate::sphere::Plane) row order, so no flip is needed.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct PfmImage {
    pub width: usize,
    pub height: usize,
    /// 1 (`Pf`) or 3 (`PF`).
    pub channels: usize,
    pub data: Vec<f32>,
}

impl PfmImage {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f32>) -> Result<Self> {
        if !matches!(channels, 1 | 3) {
            return Err(Error::Format(format!("PFM holds 1 or 3 channels, not {channels}")));
        }
        if data.len() != width * height * channels {
            return Err(Error::Format(format!(
                "PFM sample count {} does not match {width}x{height}x{channels}",
                data.len()
            )));
        }
        Ok(Self { width, height, channels, data })
    }

    /// Little-endian bytes with scale −1.
    pub fn to_bytes(&self) -> Vec<u8> {
        let tag = if self.channels == 3 { "PF" } else { "Pf" };
        let mut out = format!("{tag}\n{} {}\n-1.0\n", self.width, self.height).into_bytes();
        out.reserve(self.data.len() * 4);
        for x in &self.data {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out
    }

    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let mut r = BufReader::new(reader);
        let mut tokens = Vec::new();
        // the header is three whitespace-separated tokens after the magic
        while tokens.len() < 4 {
            let mut line = String::new();
            if r.read_line(&mut line)? == 0 {
                return Err(Error::Format("truncated PFM header".into()));
            }
            tokens.extend(line.split_whitespace().map(str::to_owned));
        }
        let channels = match tokens[0].as_str() {
            "PF" => 3,
            "Pf" => 1,
            other => return Err(Error::Format(format!("not a PFM file (magic `{other}`)"))),
        };
        let num = |s: &str| s.parse::<usize>().map_err(|_| Error::Format(format!("bad PFM dimension `{s}`")));
        let (width, height) = (num(&tokens[1])?, num(&tokens[2])?);
        let scale: f64 = tokens[3].parse().map_err(|_| Error::Format(format!("bad PFM scale `{}`", tokens[3])))?;
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::Format("PFM scale must be nonzero".into()));
        }
        let n = width
            .checked_mul(height)
            .and_then(|x| x.checked_mul(channels))
            .ok_or_else(|| Error::Format("PFM dimensions overflow".into()))?;
        let mut bytes = vec![0u8; n * 4];
        r.read_exact(&mut bytes).map_err(|_| Error::Format("PFM data is shorter than its header says".into()))?;
        let data = bytes
            .chunks_exact(4)
            .map(|c| {
                let b = [c[0], c[1], c[2], c[3]];
                if scale < 0.0 { f32::from_le_bytes(b) } else { f32::from_be_bytes(b) }
            })
            .collect();
        Self::new(width, height, channels, data)
    }
}

pub fn write_pfm(path: impl AsRef<Path>, image: &PfmImage) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&image.to_bytes())?;
    Ok(())
}

pub fn read_pfm(path: impl AsRef<Path>) -> Result<PfmImage> {
    PfmImage::from_reader(std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_bytes() {
        let img = PfmImage::new(3, 2, 3, (0..18).map(|x| x as f32 * 0.25 - 1.0).collect()).unwrap();
        let bytes = img.to_bytes();
        assert!(bytes.starts_with(b"PF\n3 2\n-1.0\n"));
        assert_eq!(PfmImage::from_reader(&bytes[..]).unwrap(), img);
    }

    #[test]
    fn big_endian_is_read() {
        let mut bytes = b"Pf\n2 1\n1.0\n".to_vec();
        bytes.extend_from_slice(&1.5f32.to_be_bytes());
        bytes.extend_from_slice(&(-2.0f32).to_be_bytes());
        assert_eq!(PfmImage::from_reader(&bytes[..]).unwrap().data, vec![1.5, -2.0]);
    }

    #[test]
    fn malformed_headers() {
        assert!(PfmImage::from_reader(&b"P6\n1 1\n-1\n"[..]).is_err());
        assert!(PfmImage::from_reader(&b"Pf\n2 2\n-1.0\n\0\0"[..]).is_err());
        assert!(PfmImage::new(2, 2, 2, vec![0.0; 8]).is_err());
    }
}
