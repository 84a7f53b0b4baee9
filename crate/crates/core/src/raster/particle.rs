//! Spherical particles as small circles on the visual sphere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::projections::map::PerspectiveMap;
use crate::raster::edge::raster_with;
use crate::raster::{step, Coverage, Fragment, StepMode};
use crate::sphere::{Plane, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub position: Vec3,
    pub radius: f64,
}

impl Particle {
    pub fn new(position: Vec3, radius: f64) -> Result<Self> {
        let p = Self { position, radius };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.position.norm();
        if !(self.radius > 0.0 && d.is_finite() && self.radius < d) {
            return Err(Error::domain(format!(
                "particle radius {} must be positive and below its distance {d}",
                self.radius
            )));
        }
        Ok(())
    }
}

/// Rotation rows `X̂, Ŷ, P̂` and the rim threshold.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ParticleMask {
    x: Vec3,
    y: Vec3,
    p: Vec3,
    center: Vec3,
    dist: f64,
    radius: f64,
    cos_rim: f64,
    gain: f64,
}

impl ParticleMask {
    pub(crate) fn new(particle: &Particle) -> Result<Self> {
        particle.validate()?;
        let pos = particle.position;
        let dist = pos.norm();
        let p = pos / dist;
        // on the y-axis the first row is undefined, use +x instead
        let x = Vec3::new(pos.z, 0.0, -pos.x).try_normalize(1e-12 * dist).unwrap_or_else(Vec3::x);
        let y = x.cross(&p);
        let sin_rim = particle.radius / dist;
        let cos_rim = (1.0 - sin_rim * sin_rim).sqrt();
        Ok(Self { x, y, p, center: pos, dist, radius: particle.radius, cos_rim, gain: 1.0 / sin_rim })
    }

    pub(crate) fn axis(&self) -> Vec3 {
        self.p
    }

    pub(crate) fn angular_radius(&self) -> f64 {
        (self.radius / self.dist).asin()
    }

    #[inline]
    pub(crate) fn coverage(&self, g: &Vec3, inv_delta: f64, mode: StepMode) -> f64 {
        step((g.dot(&self.p) - self.cos_rim) * self.gain, inv_delta, mode)
    }

    pub(crate) fn contains(&self, g: &Vec3) -> bool {
        g.dot(&self.p) >= self.cos_rim
    }

    #[inline]
    pub(crate) fn uv(&self, g: &Vec3) -> [f64; 2] {
        let k = self.dist / (2.0 * self.radius);
        [g.dot(&self.x) * k + 0.5, g.dot(&self.y) * k + 0.5]
    }

    /// Front-surface hit along `Ĝ`; rim pixels whose ray misses the sphere
    /// take the closest approach instead.
    pub(crate) fn fragment(&self, g: &Vec3) -> Fragment {
        let gp = g.dot(&self.center);
        let disc = gp * gp - (self.dist * self.dist - self.radius * self.radius);
        let t = if disc >= 0.0 { gp - disc.sqrt() } else { gp };
        let normal = ((t * g - self.center) / self.radius).try_normalize(1e-12).unwrap_or(-self.p);
        Fragment { depth: t, uv: self.uv(g), normal }
    }
}

/// Coverage and the particle's local texture coordinates.
pub fn rasterize_particle(
    map: &PerspectiveMap,
    particle: &Particle,
    mode: StepMode,
) -> Result<(Coverage, Plane<[f64; 2]>)> {
    let mask = ParticleMask::new(particle)?;
    let cov = raster_with(map, mode, |g, d| mask.coverage(g, d, mode));
    let uv = Plane::par_from_fn(map.width(), map.height(), |i, j| {
        match map.vector(i, j) {
            Some(g) if cov.at(i, j) > 0.0 => mask.uv(&g),
            _ => [0.0; 2],
        }
    });
    Ok((cov, uv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projections::{map::bake_map, ProjectionSpec};
    use crate::sphere::AovMode;
    use approx::assert_abs_diff_eq;

    #[test]
    fn center_hit() {
        let m = ParticleMask::new(&Particle::new(Vec3::new(0.0, 0.0, 2.0), 1.0).unwrap()).unwrap();
        let g = Vec3::z();
        assert_eq!(m.coverage(&g, 100.0, StepMode::Binary), 1.0);
        assert_eq!(m.uv(&g), [0.5, 0.5]);
        let f = m.fragment(&g);
        assert_abs_diff_eq!(f.depth, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!((f.normal + Vec3::z()).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn rim_threshold_is_exact() {
        let part = Particle::new(Vec3::new(0.3, -0.2, 2.0), 0.5).unwrap();
        let m = ParticleMask::new(&part).unwrap();
        let rho = (part.radius / part.position.norm()).asin();
        let p = part.position.normalize();
        let side = p.cross(&Vec3::y()).normalize();
        let g = nalgebra::Rotation3::new(side * rho) * p;
        assert_abs_diff_eq!(g.dot(&p), m.cos_rim, epsilon = 1e-12);
        assert_abs_diff_eq!(m.coverage(&g, 1e3, StepMode::Pixel), 0.5, epsilon = 1e-6);
    }

    #[test]
    fn y_axis_uses_x_row() {
        let m = ParticleMask::new(&Particle::new(Vec3::new(0.0, 3.0, 0.0), 1.0).unwrap()).unwrap();
        assert_eq!(m.x, Vec3::x());
        assert_abs_diff_eq!(m.y.dot(&m.p), 0.0);
    }

    #[test]
    fn invalid_particles() {
        assert!(Particle::new(Vec3::new(0.0, 0.0, 1.0), 1.0).is_err());
        assert!(Particle::new(Vec3::new(0.0, 0.0, 1.0), 0.0).is_err());
    }

    #[test]
    fn uv_stays_in_unit_square() {
        let spec = ProjectionSpec::Rectilinear { aov_deg: 90.0, mode: AovMode::Horizontal, lens: None };
        let map = bake_map(&spec, 128, 128).unwrap();
        let part = Particle::new(Vec3::new(0.2, 0.1, 3.0), 0.6).unwrap();
        let (cov, uv) = rasterize_particle(&map, &part, StepMode::Pixel).unwrap();
        let mut covered = 0;
        for j in 0..128 {
            for i in 0..128 {
                if cov.at(i, j) > 0.0 {
                    covered += 1;
                    let [u, v] = uv.at(i, j);
                    // the pixel ramp reaches half a pixel past the rim
                    let slack = 1.0 / map.inv_delta(i, j) * part.position.norm() / part.radius;
                    assert!((-slack..=1.0 + slack).contains(&u), "{u}");
                    assert!((-slack..=1.0 + slack).contains(&v), "{v}");
                    if cov.at(i, j) == 1.0 {
                        assert!((0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v));
                    }
                }
            }
        }
        assert!(covered > 100);
    }
}
