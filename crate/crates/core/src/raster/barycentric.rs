//! Perspective-correct barycentric coordinates and fragment interpolation.

use crate::error::{Error, Result};
use crate::raster::CameraTriangle;
use crate::sphere::Vec3;

/// Distance along `Ĝ` to the triangle plane and the area weights of the hit
/// point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Barycentric {
    pub r: f64,
    pub b: [f64; 3],
}

pub fn barycentric(g: &Vec3, t: &CameraTriangle) -> Result<Barycentric> {
    let [a, b, c] = t.positions();
    let n = t.plane_normal();
    let nn = n.norm_squared();
    let gn = g.dot(&n);
    if gn.abs() < 1e-12 * nn.sqrt() * g.norm() || nn == 0.0 {
        return Err(Error::GrazingRay);
    }
    let r = a.dot(&n) / gn;
    let p = r * g;
    let (pa, pb, pc) = (a - p, b - p, c - p);
    let bs = pc.cross(&pb).dot(&n) / nn;
    let bt = pa.cross(&pc).dot(&n) / nn;
    let bp = pb.cross(&pa).dot(&n) / nn;
    Ok(Barycentric { r, b: [bs, bt, bp] })
}

/// Interpolated surface data for one direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fragment {
    /// Distance from the eye, not the `z` coordinate.
    pub depth: f64,
    pub uv: [f64; 2],
    pub normal: Vec3,
}

pub fn interpolate_fragment(bc: &Barycentric, t: &CameraTriangle) -> Fragment {
    let [ws, wt, wp] = bc.b;
    let uv = [
        ws * t.a.uv[0] + wt * t.b.uv[0] + wp * t.c.uv[0],
        ws * t.a.uv[1] + wt * t.b.uv[1] + wp * t.c.uv[1],
    ];
    let blended = ws * t.a.normal + wt * t.b.normal + wp * t.c.normal;
    let normal = blended
        .try_normalize(1e-12)
        .or_else(|| t.plane_normal().try_normalize(0.0))
        .unwrap_or_else(Vec3::zeros);
    Fragment { depth: bc.r, uv, normal }
}
