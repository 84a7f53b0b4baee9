//! Random geometry and independent oracles shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use visphere::raster::{CameraTriangle, CameraVertex};
use visphere::{PerspectiveMap, Vec3};

/// Orthonormal tangent pair at unit vector `c`.
pub fn tangent_basis(c: &Vec3) -> (Vec3, Vec3) {
    let helper = if c.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = c.cross(&helper).normalize();
    (e1, c.cross(&e1))
}

/// Direction `angle` radians away from `c` towards azimuth `phi`.
pub fn offset_dir(c: &Vec3, angle: f64, phi: f64) -> Vec3 {
    let (e1, e2) = tangent_basis(c);
    c * angle.cos() + (e1 * phi.cos() + e2 * phi.sin()) * angle.sin()
}

/// Uniform direction within `max_angle` of `+z`.
pub fn random_dir_in_cone(rng: &mut impl Rng, max_angle: f64) -> Vec3 {
    let cos_min = max_angle.cos();
    let z = rng.gen_range(cos_min..1.0);
    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).sqrt();
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}

/// Front-facing camera-space triangle whose vertices lie within `radius`
/// radians of `center`, at distances drawn from `depth`.
pub fn random_triangle(
    rng: &mut impl Rng,
    center: &Vec3,
    radius: std::ops::Range<f64>,
    depth: std::ops::Range<f64>,
) -> CameraTriangle {
    loop {
        let rho = rng.gen_range(radius.clone());
        let v: Vec<Vec3> = (0..3)
            .map(|_| {
                let d = offset_dir(center, rho * rng.gen_range(0.3..1.0), rng.gen_range(0.0..std::f64::consts::TAU));
                d * rng.gen_range(depth.clone())
            })
            .collect();
        let mut t = CameraTriangle::from_positions(v[0], v[1], v[2]);
        let o = t.orientation();
        // reject slivers so the sign tests are well conditioned
        if o.abs() < 1e-6 * v.iter().map(|p| p.norm()).product::<f64>() {
            continue;
        }
        if o < 0.0 {
            t = t.reversed();
        }
        return t;
    }
}

pub fn with_uvs(t: CameraTriangle) -> CameraTriangle {
    CameraTriangle::new(
        CameraVertex::new(t.a.position).with_uv([0.0, 0.0]),
        CameraVertex::new(t.b.position).with_uv([1.0, 0.0]),
        CameraVertex::new(t.c.position).with_uv([0.0, 1.0]),
    )
}

/// Inside test by three dot-product signs against the normalized edge
/// crosses, computed without the library's edge rows.
pub fn sign_oracle(g: &Vec3, t: &CameraTriangle) -> bool {
    let [a, b, c] = t.positions();
    [(a, b), (b, c), (c, a)].iter().all(|(p, q)| g.dot(&p.cross(q).normalize()) > 0.0)
}

/// Angular distance from `g` to the great-circle arc `a → b`.
pub fn arc_distance(g: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let n = a.cross(b).normalize();
    let g = g.normalize();
    let within = a.cross(&g).dot(&n) >= 0.0 && g.cross(b).dot(&n) >= 0.0;
    if within {
        g.dot(&n).abs().min(1.0).asin()
    } else {
        g.angle(a).min(g.angle(b))
    }
}

/// Angular pixel size the map's step functions use.
pub fn pixel_angle(map: &PerspectiveMap, i: usize, j: usize) -> f64 {
    1.0 / map.inv_delta(i, j)
}
