//! Rasterization against a perspective map.
//!
//! Every primitive is reduced to a handful of half-spaces on the visual
//! sphere. A triangle edge `A→B` keeps the directions `Ĝ` with
//! `Ĝ·‖A×B‖ > 0`, which in the camera frame (`x` right, `y` up, `z` forward)
//! is the inner side of a triangle wound counter-clockwise as seen from the
//! eye.

pub mod barycentric;
pub mod composite;
pub mod edge;
pub mod line;
pub mod particle;
pub mod scene;
pub mod subdivide;

use serde::{Deserialize, Serialize};

use crate::sphere::{Plane, Vec3};

pub use barycentric::{barycentric, interpolate_fragment, Barycentric, Fragment};
pub use composite::FragmentBuffers;
pub use edge::{edge_matrix, rasterize_polygon, rasterize_triangle, smallest_circle, EdgeMatrix, SmallestCircle};
pub use line::{rasterize_line, LineSegment};
pub use particle::{rasterize_particle, Particle};
pub use scene::{
    apply_parallax, render_scene, Camera, Diagnostics, Mesh, MeshInstance, ParallaxProfile, RenderOptions, RenderOutput,
    Scene, Vertex,
};
pub use subdivide::subdivide_wide;

/// Which step function turns signed edge distances into coverage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepMode {
    /// One-pixel linear ramp driven by the map's δ plane.
    #[default]
    Pixel,
    /// Hard inside/outside test.
    Binary,
}

/// Per-pixel coverage in `[0, 1]`.
pub type Coverage = Plane<f64>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CameraVertex {
    pub position: Vec3,
    pub uv: [f64; 2],
    /// Zero when the source mesh carries no normals.
    pub normal: Vec3,
}

impl CameraVertex {
    pub fn new(position: Vec3) -> Self {
        Self { position, uv: [0.0; 2], normal: Vec3::zeros() }
    }

    pub fn with_uv(mut self, uv: [f64; 2]) -> Self {
        self.uv = uv;
        self
    }

    pub fn with_normal(mut self, normal: Vec3) -> Self {
        self.normal = normal;
        self
    }

    pub(crate) fn lerp(&self, other: &Self, t: f64) -> Self {
        Self {
            position: self.position.lerp(&other.position, t),
            uv: [
                self.uv[0] + (other.uv[0] - self.uv[0]) * t,
                self.uv[1] + (other.uv[1] - self.uv[1]) * t,
            ],
            normal: self.normal.lerp(&other.normal, t),
        }
    }
}

/// Camera-space triangle; counter-clockwise as seen from the eye faces it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CameraTriangle {
    pub a: CameraVertex,
    pub b: CameraVertex,
    pub c: CameraVertex,
}

impl CameraTriangle {
    pub fn new(a: CameraVertex, b: CameraVertex, c: CameraVertex) -> Self {
        Self { a, b, c }
    }

    pub fn from_positions(a: Vec3, b: Vec3, c: Vec3) -> Self {
        Self::new(CameraVertex::new(a), CameraVertex::new(b), CameraVertex::new(c))
    }

    pub fn positions(&self) -> [Vec3; 3] {
        [self.a.position, self.b.position, self.c.position]
    }

    /// `(A×B)·C`: positive when front-facing, zero when seen edge-on.
    pub fn orientation(&self) -> f64 {
        self.a.position.cross(&self.b.position).dot(&self.c.position)
    }

    pub fn is_front_facing(&self) -> bool {
        self.orientation() > 0.0
    }

    pub fn reversed(&self) -> Self {
        Self { a: self.a, b: self.c, c: self.b }
    }

    /// Unnormalized plane normal `(A−B)×(C−B)`, pointing towards the eye for
    /// front-facing triangles.
    pub fn plane_normal(&self) -> Vec3 {
        (self.a.position - self.b.position).cross(&(self.c.position - self.b.position))
    }

    pub fn centroid(&self) -> Vec3 {
        (self.a.position + self.b.position + self.c.position) / 3.0
    }

    /// Largest angle between two vertex directions.
    pub fn angular_span(&self) -> f64 {
        let [a, b, c] = self.positions();
        [(a, b), (b, c), (c, a)]
            .iter()
            .map(|(p, q)| p.angle(q))
            .fold(0.0, f64::max)
    }
}

#[inline]
pub(crate) fn step(g: f64, inv_delta: f64, mode: StepMode) -> f64 {
    match mode {
        StepMode::Pixel => crate::sphere::gpstep(g, inv_delta),
        StepMode::Binary => crate::sphere::bstep(g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn winding_convention() {
        let t = CameraTriangle::from_positions(
            Vec3::new(0.0, 0.0, 5.0),
            Vec3::new(1.0, 0.0, 5.0),
            Vec3::new(0.0, 1.0, 5.0),
        );
        assert!(t.is_front_facing());
        assert!(!t.reversed().is_front_facing());
        assert!(t.plane_normal().z < 0.0);
    }
}
