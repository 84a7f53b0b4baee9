//! The universal perspective model: picture coordinates to incident vectors
//! and back.
//!
//! `k` morphs between gnomonic (`1`), stereographic (`½`), equidistant
//! (`0`), equisolid (`-½`) and orthographic (`-1`). `l` blends cylindrical
//! (`0`) into spherical (`1`) and `s` rescales the vertical axis of
//! non-spherical pictures.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::projections::params::PerspectiveParams;
use crate::sphere::{UnitVector3, Vec3, ViewCoord};

/// `|k|` below this counts as the equidistant branch.
const K_ZERO: f64 = 1e-9;
/// Radii and polar angles below this use the analytic axis limit.
const AXIS_EPS: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Branch {
    Tangent,
    Linear,
    Sine,
}

fn branch(k: f64) -> Branch {
    if k > K_ZERO {
        Branch::Tangent
    } else if k < -K_ZERO {
        Branch::Sine
    } else {
        Branch::Linear
    }
}

/// `dθ/dR` at the axis.
fn axis_slope(p: &PerspectiveParams) -> f64 {
    let half = 0.5 * p.omega;
    match branch(p.k) {
        Branch::Tangent => (p.k * half).tan() / p.k,
        Branch::Linear => half,
        Branch::Sine => (p.k * half).sin() / p.k,
    }
}

/// Polar angle for a normalized radius.
pub fn radius_to_theta(r: f64, p: &PerspectiveParams) -> Result<f64> {
    let half = 0.5 * p.omega;
    let theta = match branch(p.k) {
        Branch::Tangent => ((p.k * half).tan() * r).atan() / p.k,
        Branch::Linear => half * r,
        Branch::Sine => {
            let arg = (p.k * half).sin() * r;
            if arg.abs() > 1.0 {
                return Err(Error::OutOfDomain);
            }
            arg.asin() / p.k
        }
    };
    if theta > std::f64::consts::PI + 1e-12 {
        // past the antipode
        return Err(Error::OutOfDomain);
    }
    Ok(theta)
}

/// Normalized radius for a polar angle, `R(Ω/2) = 1`.
pub fn theta_to_radius(theta: f64, p: &PerspectiveParams) -> Result<f64> {
    let half = 0.5 * p.omega;
    match branch(p.k) {
        Branch::Tangent => {
            if p.k * theta >= FRAC_PI_2 {
                return Err(Error::OutOfDomain);
            }
            Ok((p.k * theta).tan() / (p.k * half).tan())
        }
        Branch::Linear => Ok(theta / half),
        Branch::Sine => {
            // past the sine's crest the back of the sphere would fold onto the front
            if (p.k * theta).abs() > FRAC_PI_2 + 1e-12 {
                return Err(Error::OutOfDomain);
            }
            Ok((p.k * theta).sin() / (p.k * half).sin())
        }
    }
}

/// Largest radius the 2D→3D transform accepts (may be infinite).
pub fn domain_radius(p: &PerspectiveParams) -> f64 {
    let half = 0.5 * p.omega;
    match branch(p.k) {
        Branch::Tangent => f64::INFINITY,
        Branch::Linear => std::f64::consts::PI / half,
        Branch::Sine => {
            // asin saturates at 1 and θ must stay below π
            let cap = (std::f64::consts::PI * p.k.abs()).min(FRAC_PI_2).sin();
            cap / (p.k * half).sin().abs()
        }
    }
}

pub fn universal_2d_to_3d(f: ViewCoord, p: &PerspectiveParams) -> Result<UnitVector3> {
    let r = (f.x * f.x + p.l * f.y * f.y).sqrt();
    let (sigma, cos_theta) = if r < AXIS_EPS {
        (axis_slope(p), 1.0)
    } else {
        let theta = radius_to_theta(r, p)?;
        (theta.sin() / r, theta.cos())
    };
    let v = Vec3::new(f.x * sigma, f.y * sigma / p.anamorphic(), cos_theta);
    let n = v.norm();
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::OutOfDomain);
    }
    Ok(UnitVector3::new_unchecked(v / n))
}

/// Principal picture position of a direction.
///
/// The anamorphic factor is removed before the polar angle is measured so that
/// the transform inverts [`universal_2d_to_3d`] for every `l` and `s`.
pub fn universal_3d_to_2d(v: &Vec3, p: &PerspectiveParams) -> Result<ViewCoord> {
    let c = p.anamorphic();
    let vy = v.y * c;
    let rho = (v.x * v.x + p.l * vy * vy).sqrt();
    let scale = (rho * rho + v.z * v.z).sqrt();
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::domain("zero-length direction"));
    }
    let theta = rho.atan2(v.z);
    if rho <= AXIS_EPS * scale {
        if v.z < 0.0 {
            return Err(Error::domain("direction opposite to the axis has no azimuth"));
        }
        let gain = 1.0 / (scale * axis_slope(p));
        return Ok(ViewCoord::new(v.x * gain, vy * gain));
    }
    let r = theta_to_radius(theta, p)?;
    let gain = r / rho;
    Ok(ViewCoord::new(v.x * gain, vy * gain))
}

/// Moves a picture position from one universal projection to another.
pub fn remap_2d_to_2d(
    f: ViewCoord,
    p_in: &PerspectiveParams,
    p_out: &PerspectiveParams,
) -> Result<ViewCoord> {
    let v = universal_2d_to_3d(f, p_in)?;
    universal_3d_to_2d(&v, p_out)
}

/// Normalized radial profile `R(θ)` with `l = s = 1`.
pub fn radial_profile(theta: f64, omega: f64, k: f64) -> Result<f64> {
    let p = PerspectiveParams { omega, k, l: 1.0, s: 1.0 };
    theta_to_radius(theta, &p)
}
