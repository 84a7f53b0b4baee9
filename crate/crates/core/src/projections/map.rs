//! Baked perspective maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::projections::{Generator, MaskKind, ProjectionSpec};
use crate::sphere::{global_delta, AovSpec, Plane, TextureCoord, Vec3};

/// Map metadata; this is what the JSON sidecar of a map file holds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapLayout {
    pub width: usize,
    pub height: usize,
    pub aspect: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aov: Option<AovSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection: Option<ProjectionSpec>,
    #[serde(default)]
    pub has_delta: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<MaskKind>,
}

impl MapLayout {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            aspect: width as f64 / height.max(1) as f64,
            aov: None,
            projection: None,
            has_delta: true,
            mask: None,
        }
    }
}

/// Per-pixel unit incident vectors plus the δ plane and an optional mask.
///
/// Vectors are stored as `f32`; a zero vector marks a pixel outside the
/// projection's domain.
#[derive(Clone, Debug, PartialEq)]
pub struct PerspectiveMap {
    layout: MapLayout,
    vectors: Plane<[f32; 3]>,
    delta: Plane<f32>,
    mask: Option<Plane<f32>>,
    degenerate: bool,
}

const UNIT_TOLERANCE: f64 = 1e-6;

fn is_zero(v: &[f32; 3]) -> bool {
    v.iter().all(|&c| c == 0.0)
}

impl PerspectiveMap {
    /// Assembles a map, checking dimensions and unit length. The δ plane is
    /// recomputed when not supplied.
    pub fn from_parts(
        mut layout: MapLayout,
        vectors: Plane<[f32; 3]>,
        delta: Option<Plane<f32>>,
        mask: Option<Plane<f32>>,
    ) -> Result<Self> {
        let (w, h) = (vectors.width(), vectors.height());
        if w < 2 || h < 2 {
            return Err(Error::domain("perspective maps need at least 2x2 pixels"));
        }
        if (layout.width, layout.height) != (w, h) {
            return Err(Error::Format(format!(
                "layout says {}x{} but vector plane is {w}x{h}",
                layout.width, layout.height
            )));
        }
        for v in vectors.as_slice() {
            let n = v.iter().map(|&c| f64::from(c).powi(2)).sum::<f64>().sqrt();
            if !is_zero(v) && (n - 1.0).abs() > UNIT_TOLERANCE {
                return Err(Error::Format(format!("map vector {v:?} is not unit length")));
            }
        }
        for (name, plane) in [("delta", delta.as_ref()), ("mask", mask.as_ref())] {
            if let Some(p) = plane {
                if (p.width(), p.height()) != (w, h) {
                    return Err(Error::Format(format!("{name} plane size differs from the map")));
                }
            }
        }
        let (delta, degenerate) = match delta {
            Some(d) => {
                if d.as_slice().iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                    return Err(Error::Format("delta plane must be positive and finite".into()));
                }
                (d, false)
            }
            None => global_delta(&vectors)?,
        };
        if degenerate {
            log::warn!("perspective map has constant regions; δ saturated");
        }
        layout.has_delta = true;
        if mask.is_none() {
            layout.mask = None;
        }
        Ok(Self { layout, vectors, delta, mask, degenerate })
    }

    pub fn layout(&self) -> &MapLayout {
        &self.layout
    }

    pub fn width(&self) -> usize {
        self.layout.width
    }

    pub fn height(&self) -> usize {
        self.layout.height
    }

    pub fn vectors(&self) -> &Plane<[f32; 3]> {
        &self.vectors
    }

    /// Stored reciprocal pixel derivative δ.
    pub fn delta(&self) -> &Plane<f32> {
        &self.delta
    }

    pub fn mask(&self) -> Option<&Plane<f32>> {
        self.mask.as_ref()
    }

    pub fn mask_kind(&self) -> Option<MaskKind> {
        self.mask.as_ref().and(self.layout.mask)
    }

    /// Whether δ had to be floored somewhere.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    #[inline]
    pub fn vector(&self, i: usize, j: usize) -> Option<Vec3> {
        let v = self.vectors.at(i, j);
        (!is_zero(&v)).then(|| Vec3::new(v[0].into(), v[1].into(), v[2].into()))
    }

    #[inline]
    pub fn inv_delta(&self, i: usize, j: usize) -> f64 {
        self.delta.at(i, j).into()
    }

    /// Per-pixel coverage multiplier (1 unless the map carries a coverage mask).
    #[inline]
    pub fn coverage_mask(&self, i: usize, j: usize) -> f64 {
        match (self.layout.mask, &self.mask) {
            (Some(MaskKind::Coverage), Some(m)) => m.at(i, j).into(),
            _ => 1.0,
        }
    }

    pub fn texel_center(&self, i: usize, j: usize) -> TextureCoord {
        texel_center(self.width(), self.height(), i, j)
    }

    pub fn valid_count(&self) -> usize {
        self.vectors.as_slice().iter().filter(|v| !is_zero(v)).count()
    }
}

pub fn texel_center(width: usize, height: usize, i: usize, j: usize) -> TextureCoord {
    TextureCoord::new((i as f64 + 0.5) / width as f64, (j as f64 + 0.5) / height as f64)
}

/// Evaluates `spec` at every pixel center.
pub fn bake_map(spec: &ProjectionSpec, width: usize, height: usize) -> Result<PerspectiveMap> {
    let generator = spec.generator(width, height)?;
    let mut layout = MapLayout::new(width, height);
    layout.aspect = spec.natural_aspect(width, height);
    layout.projection = Some(spec.clone());
    layout.aov = match spec {
        ProjectionSpec::Universal { omega_deg, mode, .. } => {
            Some(AovSpec { angle: omega_deg.to_radians(), mode: *mode })
        }
        ProjectionSpec::Rectilinear { aov_deg, mode, .. } => {
            Some(AovSpec { angle: aov_deg.to_radians(), mode: *mode })
        }
        _ => None,
    };
    bake_with(generator.as_ref(), layout)
}

/// Bakes an arbitrary generator. Pixels the generator rejects are stored as
/// invalid; the bake itself never fails on them.
pub fn bake_with(generator: &dyn Generator, mut layout: MapLayout) -> Result<PerspectiveMap> {
    let (w, h) = (layout.width, layout.height);
    if w < 2 || h < 2 {
        return Err(Error::domain("perspective maps need at least 2x2 pixels"));
    }
    let samples = Plane::par_from_fn(w, h, |i, j| generator.sample(texel_center(w, h, i, j)));
    let vectors = samples.map(|s| match s.vector {
        Some(v) => [v.x as f32, v.y as f32, v.z as f32],
        None => [0.0; 3],
    });
    let kind = generator.mask_kind();
    let mask = kind.map(|kind| match kind {
        MaskKind::Coverage => samples.map(|s| s.mask as f32),
        MaskKind::Dimming => {
            let peak = samples
                .as_slice()
                .iter()
                .filter(|s| s.vector.is_some())
                .map(|s| s.mask)
                .fold(0.0f64, f64::max);
            samples.map(|s| match s.vector {
                Some(_) if peak > 0.0 => ((s.mask / peak).powi(2)) as f32,
                _ => 0.0,
            })
        }
    });
    layout.mask = kind;
    PerspectiveMap::from_parts(layout, vectors, None, mask)
}
