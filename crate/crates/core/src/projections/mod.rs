//! Perspective-map generators and the universal perspective model.
//!
//! [`ProjectionSpec`] is the serializable description used by scene files,
//! map sidecars and the command line. [`ProjectionSpec::generator`] turns it
//! into a validated per-pixel [`Generator`].

pub mod generators;
pub mod lens;
pub mod map;
pub mod params;
pub mod universal;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{texture_to_view, AovMode, AovSpec, TextureCoord, UnitVector3, Vec3};
use generators::*;
use lens::{brown_conrady, LensDistortionCoeffs};
use params::{Adjustment, PerspectiveParams};

/// What a generator's per-pixel scalar means.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskKind {
    /// Multiplies geometric coverage (dome rim).
    Coverage,
    /// Raw light-path length; the bake turns it into `(raw / max)²`.
    Dimming,
}

/// One evaluated pixel. `vector` is `None` outside the projectable domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub vector: Option<UnitVector3>,
    pub mask: f64,
}

impl Sample {
    pub fn hit(v: UnitVector3) -> Self {
        Self { vector: Some(v), mask: 1.0 }
    }

    pub fn miss() -> Self {
        Self { vector: None, mask: 0.0 }
    }

    fn from_result(r: Result<UnitVector3>) -> Self {
        r.map_or_else(|_| Self::miss(), Self::hit)
    }

    fn from_masked(r: Result<(UnitVector3, f64)>) -> Self {
        r.map_or_else(|_| Self::miss(), |(v, m)| Self { vector: Some(v), mask: m })
    }
}

/// A per-pixel perspective-map formula.
pub trait Generator: Sync {
    fn sample(&self, f: TextureCoord) -> Sample;

    fn mask_kind(&self) -> Option<MaskKind> {
        None
    }
}

fn default_diagonal() -> AovMode {
    AovMode::Diagonal
}

fn default_projector_aov() -> f64 {
    60.0
}

/// Serializable projection description. Angles are degrees.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProjectionSpec {
    Universal {
        omega_deg: f64,
        k: f64,
        l: f64,
        s: f64,
        #[serde(default = "default_diagonal")]
        mode: AovMode,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lens: Option<LensDistortionCoeffs>,
    },
    Rectilinear {
        aov_deg: f64,
        #[serde(default)]
        mode: AovMode,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lens: Option<LensDistortionCoeffs>,
    },
    Panorama {
        omega_h_deg: f64,
        height: f64,
    },
    Dome {
        #[serde(default)]
        compression_deg: f64,
        #[serde(default)]
        tilt_deg: f64,
        #[serde(default)]
        offset: f64,
    },
    #[serde(alias = "equirectangular")]
    Equirect,
    Cubemap,
    ScreenArray {
        screens: u32,
        omega_h_deg: f64,
        aspect: f64,
    },
    Vr {
        ipd: f64,
        omega_v_deg: f64,
        #[serde(default)]
        radial: Vec<f64>,
    },
    /// The mirror normal pass is traced analytically from a pinhole projector
    /// aimed at the mirror center.
    MirrorDome {
        projector: [f64; 3],
        dome_origin: [f64; 3],
        dome_radius: f64,
        #[serde(default = "default_projector_aov")]
        projector_aov_deg: f64,
    },
    /// The surface position pass is traced from a projector looking along
    /// `+z` inside an axis-aligned box room centered at the origin.
    ProjectionMapping {
        observer: [f64; 3],
        projector: [f64; 3],
        room_half_extents: [f64; 3],
        #[serde(default = "default_projector_aov")]
        projector_aov_deg: f64,
        #[serde(default)]
        yaw_deg: f64,
    },
}

impl ProjectionSpec {
    pub fn universal(p: &PerspectiveParams, mode: AovMode) -> Self {
        ProjectionSpec::Universal {
            omega_deg: p.omega.to_degrees(),
            k: p.k,
            l: p.l,
            s: p.s,
            mode,
            lens: None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProjectionSpec::Universal { .. } => "universal",
            ProjectionSpec::Rectilinear { .. } => "rectilinear",
            ProjectionSpec::Panorama { .. } => "panorama",
            ProjectionSpec::Dome { .. } => "dome",
            ProjectionSpec::Equirect => "equirect",
            ProjectionSpec::Cubemap => "cubemap",
            ProjectionSpec::ScreenArray { .. } => "screen_array",
            ProjectionSpec::Vr { .. } => "vr",
            ProjectionSpec::MirrorDome { .. } => "mirror_dome",
            ProjectionSpec::ProjectionMapping { .. } => "projection_mapping",
        }
    }

    /// Universal parameters, clamped or strictly checked.
    pub fn universal_params(&self, strict: bool) -> Result<Option<(PerspectiveParams, Vec<Adjustment>)>> {
        let ProjectionSpec::Universal { omega_deg, k, l, s, .. } = *self else {
            return Ok(None);
        };
        if strict {
            let p = PerspectiveParams::new(omega_deg.to_radians(), k, l, s)?;
            Ok(Some((p, Vec::new())))
        } else {
            PerspectiveParams::clamp_reporting(omega_deg.to_radians(), k, l, s).map(Some)
        }
    }

    /// Clamps universal parameters in place and reports what moved.
    pub fn clamp_in_place(&mut self) -> Result<Vec<Adjustment>> {
        let Some((p, adjustments)) = self.universal_params(false)? else {
            return Ok(Vec::new());
        };
        if let ProjectionSpec::Universal { omega_deg, k, l, s, .. } = self {
            if !adjustments.is_empty() {
                *omega_deg = p.omega.to_degrees();
            }
            (*k, *l, *s) = (p.k, p.l, p.s);
        }
        Ok(adjustments)
    }

    /// Picture aspect this projection expects at a given resolution.
    pub fn natural_aspect(&self, width: usize, height: usize) -> f64 {
        match self {
            ProjectionSpec::Panorama { omega_h_deg, height: h } => omega_h_deg.to_radians() / h,
            _ => width as f64 / height as f64,
        }
    }

    /// Validates the description and builds a generator for a `width × height`
    /// bake.
    pub fn generator(&self, width: usize, height: usize) -> Result<Box<dyn Generator>> {
        if width == 0 || height == 0 {
            return Err(Error::domain("map dimensions must be positive"));
        }
        let aspect = width as f64 / height as f64;
        let pixel = [1.0 / width as f64, 1.0 / height as f64];
        Ok(match self {
            ProjectionSpec::Universal { mode, lens, .. } => {
                let (params, _) = self.universal_params(true)?.expect("universal");
                if let Some(l) = lens {
                    l.validate()?;
                }
                Box::new(UniversalGen { params, mode: *mode, aspect, lens: lens.clone() })
            }
            ProjectionSpec::Rectilinear { aov_deg, mode, lens } => {
                let aov = AovSpec::from_degrees(*aov_deg, *mode)?;
                if aov.angle >= std::f64::consts::PI {
                    return Err(Error::domain("rectilinear angle of view must be below 180°"));
                }
                if let Some(l) = lens {
                    l.validate()?;
                }
                Box::new(RectilinearGen { aov, aspect, lens: lens.clone() })
            }
            ProjectionSpec::Panorama { omega_h_deg, height: h } => {
                if !(*h > 0.0) || !(*omega_h_deg > 0.0 && *omega_h_deg <= 360.0) {
                    return Err(Error::domain("panorama needs 0° < Ω_h ≤ 360° and H > 0"));
                }
                Box::new(PanoramaGen { omega_h: omega_h_deg.to_radians(), height: *h })
            }
            ProjectionSpec::Dome { compression_deg, tilt_deg, offset } => {
                let spec = DomeSpec {
                    compression: compression_deg.to_radians(),
                    tilt: tilt_deg.to_radians(),
                    offset: *offset,
                };
                spec.validate()?;
                Box::new(DomeGen { spec, pixel })
            }
            ProjectionSpec::Equirect => Box::new(EquirectGen),
            ProjectionSpec::Cubemap => Box::new(CubemapGen),
            ProjectionSpec::ScreenArray { screens, omega_h_deg, aspect } => {
                let spec = ScreenArraySpec {
                    screens: *screens,
                    omega_h: omega_h_deg.to_radians(),
                    aspect: *aspect,
                };
                spec.validate()?;
                Box::new(ScreenArrayGen(spec))
            }
            ProjectionSpec::Vr { ipd, omega_v_deg, radial } => {
                let spec = VrSpec {
                    ipd: *ipd,
                    omega_v: omega_v_deg.to_radians(),
                    aspect,
                    radial: radial.clone(),
                };
                spec.validate()?;
                Box::new(VrGen(spec))
            }
            ProjectionSpec::MirrorDome { projector, dome_origin, dome_radius, projector_aov_deg } => {
                let spec = MirrorDomeSpec {
                    projector: *projector,
                    dome_origin: *dome_origin,
                    dome_radius: *dome_radius,
                };
                if !(*dome_radius > 0.0) {
                    return Err(Error::domain("dome radius must be positive"));
                }
                let eye = Vec3::from(*projector);
                if eye.norm() <= 1.0 {
                    return Err(Error::domain("projector must sit outside the unit mirror"));
                }
                let frame = look_at(&eye, &Vec3::zeros())?;
                let aov = AovSpec::from_degrees(*projector_aov_deg, AovMode::Horizontal)?;
                Box::new(MirrorDomeGen { spec, eye, frame, aov, aspect })
            }
            ProjectionSpec::ProjectionMapping {
                observer,
                projector,
                room_half_extents,
                projector_aov_deg,
                yaw_deg,
            } => {
                let half = Vec3::from(*room_half_extents);
                let eye = Vec3::from(*projector);
                if half.iter().any(|&h| !(h > 0.0)) || (0..3).any(|a| eye[a].abs() >= half[a]) {
                    return Err(Error::domain("projector must sit inside a non-empty room"));
                }
                let aov = AovSpec::from_degrees(*projector_aov_deg, AovMode::Horizontal)?;
                Box::new(ProjectionMappingGen {
                    observer: Vec3::from(*observer),
                    eye,
                    half,
                    w: yaw_matrix(yaw_deg.to_radians()),
                    aov,
                    aspect,
                })
            }
        })
    }
}

struct UniversalGen {
    params: PerspectiveParams,
    mode: AovMode,
    aspect: f64,
    lens: Option<LensDistortionCoeffs>,
}

impl Generator for UniversalGen {
    fn sample(&self, f: TextureCoord) -> Sample {
        let Ok(mut v) = texture_to_view(f, self.aspect, self.mode) else {
            return Sample::miss();
        };
        if let Some(lens) = &self.lens {
            v = brown_conrady(v, lens);
        }
        Sample::from_result(universal::universal_2d_to_3d(v, &self.params))
    }
}

struct RectilinearGen {
    aov: AovSpec,
    aspect: f64,
    lens: Option<LensDistortionCoeffs>,
}

impl Generator for RectilinearGen {
    fn sample(&self, f: TextureCoord) -> Sample {
        let Ok(mut v) = texture_to_view(f, self.aspect, self.aov.mode) else {
            return Sample::miss();
        };
        if let Some(lens) = &self.lens {
            v = brown_conrady(v, lens);
        }
        // cot(Ω/2) > 0 below 180°, so the vector never vanishes
        let z = 1.0 / (0.5 * self.aov.angle).tan();
        Sample::hit(UnitVector3::new_normalize(Vec3::new(v.x, v.y, z)))
    }
}

struct PanoramaGen {
    omega_h: f64,
    height: f64,
}

impl Generator for PanoramaGen {
    fn sample(&self, f: TextureCoord) -> Sample {
        Sample::from_result(panorama_map(f, self.omega_h, self.height).map(|(v, _)| v))
    }
}

struct DomeGen {
    spec: DomeSpec,
    pixel: [f64; 2],
}

impl Generator for DomeGen {
    fn sample(&self, f: TextureCoord) -> Sample {
        Sample::from_masked(dome_map(f, &self.spec, self.pixel))
    }

    fn mask_kind(&self) -> Option<MaskKind> {
        Some(MaskKind::Coverage)
    }
}

struct EquirectGen;

impl Generator for EquirectGen {
    fn sample(&self, f: TextureCoord) -> Sample {
        Sample::hit(equirect_map(f))
    }
}

struct CubemapGen;

impl Generator for CubemapGen {
    fn sample(&self, f: TextureCoord) -> Sample {
        Sample::hit(cubemap_map(f))
    }
}

struct ScreenArrayGen(ScreenArraySpec);

impl Generator for ScreenArrayGen {
    fn sample(&self, f: TextureCoord) -> Sample {
        Sample::from_result(screen_array_map(f, &self.0))
    }
}

struct VrGen(VrSpec);

impl Generator for VrGen {
    fn sample(&self, f: TextureCoord) -> Sample {
        Sample::from_result(vr_map(f, &self.0))
    }
}

struct MirrorDomeGen {
    spec: MirrorDomeSpec,
    eye: Vec3,
    frame: Matrix3<f64>,
    aov: AovSpec,
    aspect: f64,
}

impl Generator for MirrorDomeGen {
    fn sample(&self, f: TextureCoord) -> Sample {
        let Ok(ray) = rectilinear_map(f, self.aov, self.aspect) else {
            return Sample::miss();
        };
        let dir = self.frame * ray.into_inner();
        match hit_unit_sphere(&self.eye, &dir) {
            Some(normal) => Sample::from_masked(mirror_dome_map(&normal, &self.spec)),
            None => Sample::miss(),
        }
    }

    fn mask_kind(&self) -> Option<MaskKind> {
        Some(MaskKind::Dimming)
    }
}

struct ProjectionMappingGen {
    observer: Vec3,
    eye: Vec3,
    half: Vec3,
    w: Matrix3<f64>,
    aov: AovSpec,
    aspect: f64,
}

impl Generator for ProjectionMappingGen {
    fn sample(&self, f: TextureCoord) -> Sample {
        let Ok(ray) = rectilinear_map(f, self.aov, self.aspect) else {
            return Sample::miss();
        };
        match hit_box_from_inside(&self.eye, &ray, &self.half) {
            Some(surface) => Sample::from_masked(projection_mapping_map(
                &surface,
                &self.observer,
                &self.w,
                &self.eye,
            )),
            None => Sample::miss(),
        }
    }

    fn mask_kind(&self) -> Option<MaskKind> {
        Some(MaskKind::Dimming)
    }
}
