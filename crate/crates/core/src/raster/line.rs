//! One-pixel wireframe strokes along great-circle arcs.

use crate::error::{Error, Result};
use crate::projections::map::PerspectiveMap;
use crate::raster::edge::raster_with;
use crate::raster::{step, Coverage, StepMode};
use crate::sphere::Vec3;

/// Segment between two camera-space points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineSegment {
    pub a: Vec3,
    pub b: Vec3,
}

impl LineSegment {
    pub fn new(a: Vec3, b: Vec3) -> Self {
        Self { a, b }
    }

    pub fn angular_span(&self) -> f64 {
        self.a.angle(&self.b)
    }
}

/// Precomputed stroke: the arc's pole and the radial cap around its midpoint.
#[derive(Clone, Copy, Debug)]
pub(crate) struct LineMask {
    pole: Vec3,
    mid: Vec3,
    cos_half: f64,
    gain: f64,
}

impl LineMask {
    pub(crate) fn new(a: &Vec3, b: &Vec3) -> Result<Self> {
        let pole = a.cross(b);
        let len = pole.norm();
        if !(len > 1e-12 * a.norm() * b.norm()) {
            return Err(Error::DegenerateLine);
        }
        let l = 0.5 * (a.normalize() + b.normalize());
        let cos_half = l.norm();
        let sin_half = (1.0 - cos_half * cos_half).max(0.0).sqrt();
        if !(sin_half > 0.0) {
            return Err(Error::DegenerateLine);
        }
        Ok(Self { pole: pole / len, mid: l / cos_half, cos_half, gain: 1.0 / sin_half })
    }

    pub(crate) fn axis(&self) -> Vec3 {
        self.mid
    }

    pub(crate) fn half_angle(&self) -> f64 {
        self.cos_half.clamp(-1.0, 1.0).acos()
    }

    #[inline]
    pub(crate) fn coverage(&self, g: &Vec3, inv_delta: f64, mode: StepMode) -> f64 {
        let gz = g.dot(&self.pole);
        let h = match mode {
            StepMode::Pixel => 1.0 - (gz.abs() * inv_delta).min(1.0),
            StepMode::Binary => {
                if (2.0 * gz).abs() * inv_delta < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
        };
        if h == 0.0 {
            return 0.0;
        }
        h.min(step((g.dot(&self.mid) - self.cos_half) * self.gain, inv_delta, mode))
    }
}

pub fn rasterize_line(map: &PerspectiveMap, a: &Vec3, b: &Vec3, mode: StepMode) -> Result<Coverage> {
    let line = LineMask::new(a, b)?;
    Ok(raster_with(map, mode, |g, d| line.coverage(g, d, mode)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projections::{map::bake_map, ProjectionSpec};
    use crate::sphere::AovMode;
    use approx::assert_abs_diff_eq;

    #[test]
    fn midpoint_is_on_stroke_and_inside_cap() {
        let a = Vec3::new(1.0, 0.0, 1.0);
        let b = Vec3::new(-1.0, 0.0, 1.0);
        let line = LineMask::new(&a, &b).unwrap();
        let g = Vec3::z();
        assert_abs_diff_eq!(g.dot(&line.pole), 0.0);
        assert!(g.dot(&line.mid) > line.cos_half);
        assert_abs_diff_eq!(line.cos_half, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_eq!(line.coverage(&g, 500.0, StepMode::Binary), 1.0);
        assert_eq!(line.coverage(&g, 500.0, StepMode::Pixel), 1.0);
        // the endpoint sits on the cap boundary
        let end = line.coverage(&a.normalize(), 500.0, StepMode::Pixel);
        assert_abs_diff_eq!(end, 0.5, epsilon = 1e-9);
    }

    #[test]
    fn degenerate_lines_are_errors() {
        let a = Vec3::new(0.0, 0.0, 1.0);
        assert!(matches!(LineMask::new(&a, &(3.0 * a)), Err(Error::DegenerateLine)));
        assert!(matches!(LineMask::new(&a, &-a), Err(Error::DegenerateLine)));
    }

    #[test]
    fn stroke_is_about_one_pixel_wide() {
        let spec = ProjectionSpec::Rectilinear { aov_deg: 90.0, mode: AovMode::Horizontal, lens: None };
        let map = bake_map(&spec, 128, 128).unwrap();
        // vertical line through a column boundary offset by a quarter pixel
        let x = 0.1;
        let cov = rasterize_line(&map, &Vec3::new(x, -0.5, 1.0), &Vec3::new(x, 0.5, 1.0), StepMode::Pixel).unwrap();
        let total: f64 = (0..128).map(|i| cov.at(i, 64)).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 0.05);
        let bin = rasterize_line(&map, &Vec3::new(x, -0.5, 1.0), &Vec3::new(x, 0.5, 1.0), StepMode::Binary).unwrap();
        let count: f64 = (0..128).map(|i| bin.at(i, 64)).sum();
        assert!((1.0..=2.0).contains(&count));
    }
}
