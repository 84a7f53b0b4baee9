//! Coordinate conventions, step functions and the discrete pixel derivative.

use nalgebra::{Unit, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::projections::map::PerspectiveMap;

pub type Vec3 = Vector3<f64>;
pub type UnitVector3 = Unit<Vec3>;

/// Smallest admissible pixel derivative. Keeps [`PixelDelta`] strictly positive
/// on constant regions.
pub const FWIDTH_FLOOR: f64 = 1e-12;

/// Normalized picture coordinate, `(0,0)` bottom-left and `(1,1)` top-right.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TextureCoord {
    pub s: f64,
    pub t: f64,
}

impl TextureCoord {
    pub const fn new(s: f64, t: f64) -> Self {
        Self { s, t }
    }
}

/// Centered picture coordinate; the AOV-major axis spans `[-1, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViewCoord {
    pub x: f64,
    pub y: f64,
}

impl ViewCoord {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Which picture dimension an angle of view is measured across.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AovMode {
    #[default]
    Horizontal,
    Vertical,
    Diagonal,
    /// Horizontal angle of a 4:3 frame inscribed in the picture.
    #[serde(alias = "horizontal_4x3")]
    Horizontal4x3,
}

impl std::str::FromStr for AovMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "horizontal" | "h" => Ok(AovMode::Horizontal),
            "vertical" | "v" => Ok(AovMode::Vertical),
            "diagonal" | "d" => Ok(AovMode::Diagonal),
            "horizontal4x3" | "horizontal-4x3" | "horizontal_4x3" | "4x3" => {
                Ok(AovMode::Horizontal4x3)
            }
            other => Err(Error::domain(format!("unknown AOV mode `{other}`"))),
        }
    }
}

impl AovMode {
    /// Per-axis scale applied to `2f - 1` when going from texture to view
    /// coordinates.
    fn view_scale(self, aspect: f64) -> (f64, f64) {
        match self {
            AovMode::Horizontal => (1.0, 1.0 / aspect),
            AovMode::Vertical => (aspect, 1.0),
            AovMode::Diagonal => {
                let d = (1.0 + aspect * aspect).sqrt();
                (aspect / d, 1.0 / d)
            }
            AovMode::Horizontal4x3 => (aspect * 0.75, 0.75),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AovSpec {
    /// Radians, in `(0, 2π]`.
    pub angle: f64,
    pub mode: AovMode,
}

impl AovSpec {
    pub fn new(angle: f64, mode: AovMode) -> Result<Self> {
        if !(angle.is_finite() && angle > 0.0 && angle <= std::f64::consts::TAU + 1e-12) {
            return Err(Error::domain(format!("angle of view {angle} outside (0, 2π]")));
        }
        Ok(Self { angle, mode })
    }

    pub fn from_degrees(deg: f64, mode: AovMode) -> Result<Self> {
        Self::new(deg.to_radians(), mode)
    }
}

/// Width of a one-pixel step, in the units of the stepped quantity.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct PixelDelta(f64);

impl PixelDelta {
    pub fn new(value: f64) -> Option<Self> {
        (value.is_finite() && value > 0.0).then_some(Self(value))
    }

    /// Clamps `value` up to [`FWIDTH_FLOOR`].
    pub fn floored(value: f64) -> Self {
        Self(if value.is_finite() { value.max(FWIDTH_FLOOR) } else { FWIDTH_FLOOR })
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

fn check_aspect(aspect: f64) -> Result<()> {
    if aspect.is_finite() && aspect > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("aspect ratio must be positive, got {aspect}")))
    }
}

pub fn texture_to_view(f: TextureCoord, aspect: f64, mode: AovMode) -> Result<ViewCoord> {
    check_aspect(aspect)?;
    let (sx, sy) = mode.view_scale(aspect);
    Ok(ViewCoord::new((2.0 * f.s - 1.0) * sx, (2.0 * f.t - 1.0) * sy))
}

pub fn view_to_texture(f: ViewCoord, aspect: f64, mode: AovMode) -> Result<TextureCoord> {
    check_aspect(aspect)?;
    let (sx, sy) = mode.view_scale(aspect);
    Ok(TextureCoord::new(0.5 + 0.5 * f.x / sx, 0.5 + 0.5 * f.y / sy))
}

/// Binary step: 1 strictly above zero.
pub fn bstep(g: f64) -> f64 {
    if g > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Pixel step: a linear ramp one `delta` wide, centered on `g = 0`.
pub fn pstep(g: f64, delta: PixelDelta) -> f64 {
    (g / delta.value() + 0.5).clamp(0.0, 1.0)
}

/// [`pstep`] written against a stored reciprocal delta.
#[inline]
pub fn gpstep(g: f64, inv_delta: f64) -> f64 {
    (g * inv_delta + 0.5).clamp(0.0, 1.0)
}

/// A dense row-major grid, `j = 0` is the bottom row.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Clone> Plane<T> {
    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Self { width, height, data: vec![value; width * height] }
    }
}

impl<T> Plane<T> {
    pub fn from_vec(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::Format(format!(
                "plane {width}x{height} needs {} samples, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Self { width, height, data })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for j in 0..height {
            for i in 0..width {
                data.push(f(i, j));
            }
        }
        Self { width, height, data }
    }

    /// Row-parallel construction; output is identical to [`Plane::from_fn`].
    pub fn par_from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> T + Sync) -> Self
    where
        T: Send,
    {
        let data = (0..width * height)
            .into_par_iter()
            .with_min_len(width.max(1))
            .map(|idx| f(idx % width, idx / width))
            .collect();
        Self { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.width && j < self.height);
        j * self.width + i
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[self.index(i, j)]
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut T {
        let idx = self.index(i, j);
        &mut self.data[idx]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Plane<U> {
        Plane { width: self.width, height: self.height, data: self.data.iter().map(f).collect() }
    }
}

impl<T: Copy> Plane<T> {
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.data[j * self.width + i]
    }
}

/// `|Δx| + |Δy|` with forward differences, switching to backward differences
/// on the last column and row.
pub fn discrete_fwidth(field: &Plane<f64>, i: usize, j: usize) -> Result<PixelDelta> {
    if field.width() < 2 || field.height() < 2 {
        return Err(Error::domain("discrete_fwidth needs at least a 2x2 grid"));
    }
    Ok(PixelDelta::floored(fwidth_with(field.width(), field.height(), i, j, |i, j| {
        field.at(i, j)
    })))
}

#[inline]
pub(crate) fn fwidth_with(
    width: usize,
    height: usize,
    i: usize,
    j: usize,
    value: impl Fn(usize, usize) -> f64,
) -> f64 {
    let here = value(i, j);
    let dx = if i + 1 < width { value(i + 1, j) - here } else { here - value(i - 1, j) };
    let dy = if j + 1 < height { value(i, j + 1) - here } else { here - value(i, j - 1) };
    dx.abs() + dy.abs()
}

/// Reciprocal of the largest per-component pixel derivative of a vector grid.
///
/// Zero vectors mark pixels outside the projection; differences never reach
/// across them, falling back to the opposite neighbor instead. Returns the δ
/// plane and whether any valid pixel hit the derivative floor.
pub fn global_delta(vectors: &Plane<[f32; 3]>) -> Result<(Plane<f32>, bool)> {
    let (w, h) = (vectors.width(), vectors.height());
    if w < 2 || h < 2 {
        return Err(Error::domain("global delta needs at least a 2x2 map"));
    }
    let valid = |i: usize, j: usize| vectors.at(i, j) != [0.0; 3];
    let diff = |a: [f32; 3], b: [f32; 3], c: usize| (f64::from(a[c]) - f64::from(b[c])).abs();
    let plane = Plane::par_from_fn(w, h, |i, j| {
        let here = vectors.at(i, j);
        let pick = |fwd: Option<(usize, usize)>, back: Option<(usize, usize)>| {
            fwd.filter(|&(a, b)| valid(a, b))
                .or(back.filter(|&(a, b)| valid(a, b)))
                .map(|(a, b)| vectors.at(a, b))
        };
        let nx = pick((i + 1 < w).then(|| (i + 1, j)), i.checked_sub(1).map(|a| (a, j)));
        let ny = pick((j + 1 < h).then(|| (i, j + 1)), j.checked_sub(1).map(|b| (i, b)));
        let mut widest = 0.0f64;
        for c in 0..3 {
            let dx = nx.map_or(0.0, |n| diff(n, here, c));
            let dy = ny.map_or(0.0, |n| diff(n, here, c));
            widest = widest.max(dx + dy);
        }
        let floored = widest < FWIDTH_FLOOR && valid(i, j);
        ((1.0 / widest.max(FWIDTH_FLOOR)) as f32, floored)
    });
    let degenerate = plane.as_slice().iter().any(|&(_, d)| d);
    Ok((plane.map(|&(v, _)| v), degenerate))
}

/// Recomputes the δ plane of a baked map (`δ = 1 / max ∂(Ĝ_c)`).
pub fn global_delta_map(map: &PerspectiveMap) -> Result<Plane<f32>> {
    let (plane, degenerate) = global_delta(map.vectors())?;
    if degenerate {
        log::warn!("perspective map has constant regions; δ saturated at 1/{FWIDTH_FLOOR:e}");
    }
    Ok(plane)
}
