//! Universal perspective parameters and their admissible ranges.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest accepted angle of view.
pub const OMEGA_MIN: f64 = 1e-6;
/// Margin kept below the tangent pole when `k > 0`.
pub const OMEGA_POLE_MARGIN: f64 = 1e-4;
pub const K_RANGE: (f64, f64) = (-1.0, 1.0);
pub const L_RANGE: (f64, f64) = (0.0, 1.0);
pub const S_RANGE: (f64, f64) = (0.8, 1.0);

/// Named azimuthal projections and their `k` value.
pub const PRESETS: [(&str, f64); 5] = [
    ("gnomonic", 1.0),
    ("stereographic", 0.5),
    ("equidistant", 0.0),
    ("equisolid", -0.5),
    ("orthographic", -1.0),
];

/// `{Ω, k, l, s}`: angle of view, azimuthal type, cylindricity, anamorphic
/// correction. Angles are radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerspectiveParams {
    pub omega: f64,
    pub k: f64,
    pub l: f64,
    pub s: f64,
}

/// One parameter moved by [`PerspectiveParams::clamp_reporting`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Adjustment {
    pub name: &'static str,
    pub from: f64,
    pub to: f64,
}

/// Largest admissible angle of view for a given `k`, already including the
/// pole margin.
pub fn omega_max(k: f64) -> f64 {
    let k = k.clamp(K_RANGE.0, K_RANGE.1);
    let base = PI / k.abs().max(0.5);
    if k > 0.0 {
        base - OMEGA_POLE_MARGIN
    } else {
        base
    }
}

/// Clamps raw values into range. NaN is rejected; infinities clamp.
pub fn clamp_params(omega: f64, k: f64, l: f64, s: f64) -> Result<PerspectiveParams> {
    PerspectiveParams::clamp_reporting(omega, k, l, s).map(|(p, _)| p)
}

impl PerspectiveParams {
    /// Strict constructor: any out-of-range value is an error carrying the
    /// nearest valid value.
    pub fn new(omega: f64, k: f64, l: f64, s: f64) -> Result<Self> {
        let (p, adjustments) = Self::clamp_reporting(omega, k, l, s)?;
        match adjustments.first() {
            None => Ok(p),
            Some(a) => Err(Error::OutOfRange { name: a.name, value: a.from, suggestion: a.to }),
        }
    }

    pub fn from_degrees(omega_deg: f64, k: f64, l: f64, s: f64) -> Result<Self> {
        Self::new(omega_deg.to_radians(), k, l, s)
    }

    pub fn clamp_reporting(
        omega: f64,
        k: f64,
        l: f64,
        s: f64,
    ) -> Result<(Self, Vec<Adjustment>)> {
        for (name, v) in [("omega", omega), ("k", k), ("l", l), ("s", s)] {
            if v.is_nan() {
                return Err(Error::domain(format!("parameter {name} is NaN")));
            }
        }
        let mut adjustments = Vec::new();
        let mut fit = |name: &'static str, v: f64, lo: f64, hi: f64| {
            let c = v.clamp(lo, hi);
            if c != v {
                adjustments.push(Adjustment { name, from: v, to: c });
            }
            c
        };
        let k = fit("k", k, K_RANGE.0, K_RANGE.1);
        let l = fit("l", l, L_RANGE.0, L_RANGE.1);
        let s = fit("s", s, S_RANGE.0, S_RANGE.1);
        let omega = fit("omega", omega, OMEGA_MIN, omega_max(k));
        Ok((Self { omega, k, l, s }, adjustments))
    }

    /// Vertical anamorphic divisor `l(1 - s) + s`.
    pub fn anamorphic(&self) -> f64 {
        self.l * (1.0 - self.s) + self.s
    }

    pub fn omega_deg(&self) -> f64 {
        self.omega.to_degrees()
    }
}

/// Parameter ranges as served to interactive clients.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Limits {
    pub k: [f64; 2],
    pub l: [f64; 2],
    pub s: [f64; 2],
    pub omega_deg_min: f64,
    /// `Ω_max` in degrees for `k ≤ 0`, `0 < k ≤ ½` and `k = 1`.
    pub omega_deg_max_k_nonpositive: f64,
    pub omega_deg_max_k_half: f64,
    pub omega_deg_max_k_one: f64,
    pub omega_pole_margin_rad: f64,
    pub rule: String,
}

impl Limits {
    pub fn current() -> Self {
        Self {
            k: [K_RANGE.0, K_RANGE.1],
            l: [L_RANGE.0, L_RANGE.1],
            s: [S_RANGE.0, S_RANGE.1],
            omega_deg_min: OMEGA_MIN.to_degrees(),
            omega_deg_max_k_nonpositive: omega_max(0.0).to_degrees(),
            omega_deg_max_k_half: omega_max(0.5).to_degrees(),
            omega_deg_max_k_one: omega_max(1.0).to_degrees(),
            omega_pole_margin_rad: OMEGA_POLE_MARGIN,
            rule: "omega_max = 180deg / max(0.5, |k|), minus the pole margin when k > 0".into(),
        }
    }
}
