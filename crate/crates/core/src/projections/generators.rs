//! Closed-form perspective maps for fixed display geometries.
//!
//! Rotation matrices act on column vectors (`M·v`).

use std::f64::consts::PI;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{texture_to_view, AovSpec, TextureCoord, UnitVector3, Vec3};

fn unit(v: Vec3) -> Result<UnitVector3> {
    let n = v.norm();
    if n.is_finite() && n > 0.0 {
        Ok(UnitVector3::new_unchecked(v / n))
    } else {
        Err(Error::OutOfDomain)
    }
}

fn fract(x: f64) -> f64 {
    x - x.floor()
}

/// Rotation about `+y` taking `+z` towards `+x`.
pub fn yaw_matrix(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// Rotation about `+x` taking `+y` towards `+z`.
pub fn pitch_matrix(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

pub fn rectilinear_map(f: TextureCoord, aov: AovSpec, aspect: f64) -> Result<UnitVector3> {
    if aov.angle >= PI {
        return Err(Error::domain(format!(
            "rectilinear angle of view must be below 180°, got {:.3}°",
            aov.angle.to_degrees()
        )));
    }
    let v = texture_to_view(f, aspect, aov.mode)?;
    unit(Vec3::new(v.x, v.y, 1.0 / (0.5 * aov.angle).tan()))
}

/// Cylindrical screen of unit radius. Returns the vector and the picture
/// aspect `Ω_h / H`.
pub fn panorama_map(f: TextureCoord, omega_h: f64, height: f64) -> Result<(UnitVector3, f64)> {
    if !(height.is_finite() && height > 0.0) {
        return Err(Error::domain("panorama height must be positive"));
    }
    let x = omega_h * (f.s - 0.5);
    let y = height * (f.t - 0.5);
    Ok((unit(Vec3::new(x.sin(), y, x.cos()))?, omega_h / height))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomeSpec {
    /// Extra coverage beyond the hemisphere, radians.
    pub compression: f64,
    /// Radians.
    pub tilt: f64,
    /// View position offset in dome radii.
    pub offset: f64,
}

impl DomeSpec {
    pub fn validate(&self) -> Result<()> {
        if [self.compression, self.tilt, self.offset].iter().all(|v| v.is_finite())
            && self.compression >= 0.0
        {
            Ok(())
        } else {
            Err(Error::domain("dome compression must be finite and non-negative"))
        }
    }
}

fn dome_radius(f: TextureCoord) -> (f64, f64, f64) {
    let x = 2.0 * f.s - 1.0;
    let y = 1.0 - 2.0 * f.t;
    (x, y, x.hypot(y))
}

/// Fisheye dome master. `pixel` is the texture-space size of one pixel and
/// drives the one-pixel rim ramp.
pub fn dome_map(f: TextureCoord, spec: &DomeSpec, pixel: [f64; 2]) -> Result<(UnitVector3, f64)> {
    let (x, y, r) = dome_radius(f);
    let theta = r * (spec.compression + 0.5 * PI);
    if theta > PI {
        return Err(Error::OutOfDomain);
    }
    let sigma = if r < 1e-8 { spec.compression + 0.5 * PI } else { theta.sin() / r };
    let local = unit(Vec3::new(x * sigma, theta.cos(), y * sigma + spec.offset))?;
    let v = unit(pitch_matrix(spec.tilt) * local.into_inner())?;

    let rim = |f: TextureCoord| 1.0 - dome_radius(f).2;
    let g = rim(f);
    let dx = rim(TextureCoord::new(f.s + pixel[0], f.t)) - g;
    let dy = rim(TextureCoord::new(f.s, f.t + pixel[1])) - g;
    let width = (dx.abs() + dy.abs()).max(crate::sphere::FWIDTH_FLOOR);
    Ok((v, (g / width).clamp(0.0, 1.0)))
}

/// Full-sphere latitude/longitude picture; `t = 0` is the nadir.
pub fn equirect_map(f: TextureCoord) -> UnitVector3 {
    let x = PI * (2.0 * f.s - 1.0);
    let y = PI * f.t;
    UnitVector3::new_normalize(Vec3::new(x.sin() * y.sin(), -y.cos(), x.cos() * y.sin()))
}

/// Face rotations of the 6:1 cube strip. Faces are `+X, -X, -Z, +Z, +Y, -Y`.
pub fn cube_face_matrix(face: usize) -> Matrix3<f64> {
    match face {
        0 => Matrix3::new(0.0, 0.0, 1.0, -1.0, 0.0, 0.0, 0.0, -1.0, 0.0),
        1 => Matrix3::new(0.0, 0.0, -1.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0),
        2 => Matrix3::new(1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0),
        3 => Matrix3::identity(),
        4 => Matrix3::new(1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, -1.0, 0.0),
        5 => Matrix3::new(-1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, -1.0, 0.0),
        _ => panic!("cube face index {face} out of range"),
    }
}

pub fn cube_face(f: TextureCoord) -> usize {
    ((6.0 * f.s).floor().max(0.0) as usize).min(5)
}

pub fn cubemap_map(f: TextureCoord) -> UnitVector3 {
    let face = cube_face(f);
    let u = 6.0 * f.s - face as f64 - 0.5;
    let local = Vec3::new(u, f.t - 0.5, 0.5);
    UnitVector3::new_normalize(cube_face_matrix(face) * local)
}

/// Where a direction lands in the cube strip.
pub fn cubemap_lookup(v: &Vec3) -> Option<(usize, TextureCoord)> {
    let mut best: Option<(usize, TextureCoord, f64)> = None;
    for face in 0..6 {
        let local = cube_face_matrix(face).transpose() * v;
        if local.z <= 0.0 {
            continue;
        }
        let u = 0.5 * local.x / local.z;
        let w = 0.5 * local.y / local.z;
        let spill = u.abs().max(w.abs());
        if spill <= 0.5 + 1e-9 && best.is_none_or(|b| spill < b.2) {
            let f = TextureCoord::new((face as f64 + u + 0.5) / 6.0, w + 0.5);
            best = Some((face, f, spill));
        }
    }
    best.map(|(face, f, _)| (face, f))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScreenArraySpec {
    pub screens: u32,
    /// Horizontal angle of view of one screen, radians.
    pub omega_h: f64,
    /// Aspect of one screen.
    pub aspect: f64,
}

impl ScreenArraySpec {
    pub fn validate(&self) -> Result<()> {
        if self.screens == 0 {
            return Err(Error::domain("screen array needs at least one screen"));
        }
        if !(self.omega_h > 0.0 && self.omega_h < PI) {
            return Err(Error::domain("per-screen angle of view must lie in (0°, 180°)"));
        }
        if !(self.aspect.is_finite() && self.aspect > 0.0) {
            return Err(Error::domain("screen aspect must be positive"));
        }
        Ok(())
    }
}

pub fn screen_array_map(f: TextureCoord, spec: &ScreenArraySpec) -> Result<UnitVector3> {
    spec.validate()?;
    let n = f64::from(spec.screens);
    let column = (n * f.s).floor().clamp(0.0, n - 1.0);
    let i = column + 0.5 * (1.0 - n);
    let x = 2.0 * (n * f.s - column) - 1.0;
    let local = Vec3::new(x, (2.0 * f.t - 1.0) / spec.aspect, 1.0 / (0.5 * spec.omega_h).tan());
    unit(yaw_matrix(i * spec.omega_h) * local)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VrSpec {
    /// Interpupillary distance as a fraction of the full screen width.
    pub ipd: f64,
    /// Vertical angle of view, radians.
    pub omega_v: f64,
    /// Full side-by-side screen aspect.
    pub aspect: f64,
    #[serde(default)]
    pub radial: Vec<f64>,
}

impl VrSpec {
    fn normalization(&self) -> f64 {
        1.0 + self.radial.iter().sum::<f64>()
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=0.5).contains(&self.ipd) {
            return Err(Error::domain("ipd must lie in [0, 0.5] screen widths"));
        }
        if !(self.omega_v > 0.0 && self.omega_v < PI) {
            return Err(Error::domain("vertical angle of view must lie in (0°, 180°)"));
        }
        if !(self.aspect.is_finite() && self.aspect > 0.0) {
            return Err(Error::domain("aspect must be positive"));
        }
        if self.normalization().abs() < 1e-12 {
            return Err(Error::domain("radial coefficients sum to -1; normalization undefined"));
        }
        Ok(())
    }
}

pub fn vr_map(f: TextureCoord, spec: &VrSpec) -> Result<UnitVector3> {
    spec.validate()?;
    let eye = if f.s > 0.5 {
        1.0
    } else if f.s < 0.5 {
        -1.0
    } else {
        0.0
    };
    let x = (2.0 * fract(2.0 * f.s) - 1.0 + eye * (1.0 - 2.0 * spec.ipd)) * 0.5 * spec.aspect;
    let y = 2.0 * f.t - 1.0;
    let r2 = x * x + y * y;
    let poly = 1.0 + spec.radial.iter().rev().fold(0.0, |acc, &k| (acc + k) * r2);
    let gain = poly / spec.normalization();
    unit(Vec3::new(x * gain, y * gain, 1.0 / (0.5 * spec.omega_v).tan()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MirrorDomeSpec {
    pub projector: [f64; 3],
    pub dome_origin: [f64; 3],
    pub dome_radius: f64,
}

/// Bounces a projector ray off the unit spherical mirror into the dome.
///
/// `normal` is the mirror normal, which on a unit sphere at the origin is
/// also the surface position. Returns the dome direction and the raw light
/// path length `r' + |I|` used by the dimming mask.
pub fn mirror_dome_map(normal: &Vec3, spec: &MirrorDomeSpec) -> Result<(UnitVector3, f64)> {
    if !(spec.dome_radius > 0.0) {
        return Err(Error::domain("dome radius must be positive"));
    }
    let n = *normal;
    let p = Vec3::from(spec.projector);
    let o = Vec3::from(spec.dome_origin);
    let d = spec.dome_radius;
    let incident = n - p;
    let reflected = unit(incident - 2.0 * incident.dot(&n) * n)?.into_inner();
    let r = reflected.dot(&(o - n));
    let miss = r * reflected + n - o;
    let disc = d * d - miss.norm_squared();
    if disc < 0.0 {
        return Err(Error::OutOfDomain);
    }
    let r1 = r + disc.sqrt();
    let v = (r1 * reflected + n - o) / d;
    Ok((unit(v)?, r1 + incident.norm()))
}

/// Direction from the observer to a projector-lit surface point, rotated by
/// `w`. Returns the raw projector distance `|S - I|` for the dimming mask.
pub fn projection_mapping_map(
    surface: &Vec3,
    observer: &Vec3,
    w: &Matrix3<f64>,
    projector: &Vec3,
) -> Result<(UnitVector3, f64)> {
    let dir = unit(surface - observer)?;
    Ok((unit(w * dir.into_inner())?, (surface - projector).norm()))
}

/// Camera frame looking from `eye` towards `target`: columns are right, up,
/// forward.
pub fn look_at(eye: &Vec3, target: &Vec3) -> Result<Matrix3<f64>> {
    let forward = unit(target - eye)?.into_inner();
    let hint = if forward.y.abs() > 0.99 { Vec3::z() } else { Vec3::y() };
    let right = unit(hint.cross(&forward))?.into_inner();
    let up = forward.cross(&right);
    Ok(Matrix3::from_columns(&[right, up, forward]))
}

/// Ray against the unit sphere at the origin; nearest hit.
pub fn hit_unit_sphere(origin: &Vec3, dir: &Vec3) -> Option<Vec3> {
    let b = origin.dot(dir);
    let c = origin.norm_squared() - 1.0;
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let t = -b - disc.sqrt();
    (t > 0.0).then(|| origin + t * dir)
}

/// Ray from inside an axis-aligned box centered at the origin to its wall.
pub fn hit_box_from_inside(origin: &Vec3, dir: &Vec3, half: &Vec3) -> Option<Vec3> {
    let mut t = f64::INFINITY;
    for a in 0..3 {
        if dir[a] != 0.0 {
            let wall = half[a].copysign(dir[a]);
            let ta = (wall - origin[a]) / dir[a];
            if ta > 0.0 {
                t = t.min(ta);
            }
        }
    }
    t.is_finite().then(|| origin + t * dir)
}
