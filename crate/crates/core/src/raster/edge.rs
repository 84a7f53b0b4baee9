//! Great-circle edge functions, the smallest-circle miter and polygon masks.

use crate::error::{Error, Result};
use crate::projections::map::PerspectiveMap;
use crate::raster::{step, CameraTriangle, Coverage, StepMode};
use crate::sphere::{Plane, Vec3};

/// Collinearity threshold on `16K² / (a²+b²+c²)²`.
const COLLINEAR_EPS: f64 = 1e-12;
const EDGE_EPS: f64 = 1e-12;

/// Smallest circle enclosing the projected vertices, as a small circle on
/// the sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmallestCircle {
    /// Not normalized; `|S|` is the cosine of the angular radius.
    pub center: Vec3,
    pub threshold: f64,
    pub degenerate: bool,
}

pub fn smallest_circle(t: &CameraTriangle) -> SmallestCircle {
    let [a, b, c] = t.positions().map(|p| p.normalize());
    let a2 = (b - c).norm_squared();
    let b2 = (c - a).norm_squared();
    let c2 = (a - b).norm_squared();
    let os = a2 * (b2 + c2 - a2);
    let ot = b2 * (c2 + a2 - b2);
    let op = c2 * (a2 + b2 - c2);
    let sum = os + ot + op;
    let scale = (a2 + b2 + c2).powi(2);
    let mut degenerate = !(scale > 0.0) || sum.abs() <= COLLINEAR_EPS * scale;
    let center = if os <= 0.0 {
        0.5 * (b + c)
    } else if ot <= 0.0 {
        0.5 * (c + a)
    } else if op <= 0.0 {
        0.5 * (a + b)
    } else {
        (os * a + ot * b + op * c) / sum
    };
    // a vanishing center means the directions surround a hemisphere
    let threshold = center.norm();
    degenerate |= !(threshold > COLLINEAR_EPS);
    SmallestCircle { center, threshold, degenerate }
}

/// Rows of signed-distance functions; a direction is inside when every
/// `gain·(Ĝ·row − offset)` is positive.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeMatrix {
    rows: Vec<Vec3>,
    offsets: Vec<f64>,
    gains: Vec<f64>,
}

fn edge_row(p: &Vec3, q: &Vec3) -> Result<Vec3> {
    let n = p.cross(q);
    let len = n.norm();
    if !(len > EDGE_EPS * p.norm() * q.norm()) {
        return Err(Error::DegenerateEdge);
    }
    Ok(n / len)
}

impl EdgeMatrix {
    pub fn from_rows(rows: Vec<Vec3>) -> Self {
        let n = rows.len();
        Self { rows, offsets: vec![0.0; n], gains: vec![1.0; n] }
    }

    /// Adds a small-circle row `Ĝ·Ŝ ≥ |S|`. The gain converts the dot product
    /// into angular distance from the rim so the pixel ramp keeps its width.
    pub fn push_small_circle(&mut self, circle: &SmallestCircle) {
        let cos_r = circle.threshold.min(1.0);
        let sin_r = (1.0 - cos_r * cos_r).sqrt();
        if sin_r > 1e-9 {
            self.rows.push(circle.center / circle.threshold);
            self.offsets.push(cos_r);
            self.gains.push(1.0 / sin_r);
        }
    }

    pub fn rows(&self) -> &[Vec3] {
        &self.rows
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Signed row values `G'ᵢ`.
    pub fn distances(&self, g: &Vec3) -> Vec<f64> {
        (0..self.len()).map(|i| self.distance(i, g)).collect()
    }

    #[inline]
    fn distance(&self, i: usize, g: &Vec3) -> f64 {
        self.gains[i] * (g.dot(&self.rows[i]) - self.offsets[i])
    }

    /// Closed half-space test: boundary directions count as inside.
    pub fn contains(&self, g: &Vec3) -> bool {
        (0..self.len()).all(|i| self.distance(i, g) >= 0.0)
    }

    #[inline]
    pub fn coverage(&self, g: &Vec3, inv_delta: f64, mode: StepMode) -> f64 {
        let mut m = 1.0f64;
        for i in 0..self.rows.len() {
            m = m.min(step(self.distance(i, g), inv_delta, mode));
            if m == 0.0 {
                break;
            }
        }
        m
    }
}

/// Edge rows `‖A×B‖, ‖B×C‖, ‖C×A‖`, plus the miter row when asked for and
/// the triangle is not collinear on the sphere.
pub fn edge_matrix(t: &CameraTriangle, miter: bool) -> Result<EdgeMatrix> {
    let [a, b, c] = t.positions();
    let mut em = EdgeMatrix::from_rows(vec![edge_row(&a, &b)?, edge_row(&b, &c)?, edge_row(&c, &a)?]);
    if miter {
        let circle = smallest_circle(t);
        if !circle.degenerate {
            em.push_small_circle(&circle);
        }
    }
    Ok(em)
}

/// Evaluates `f(Ĝ, δ)` over the map; invalid pixels stay at zero.
pub(crate) fn raster_with(
    map: &PerspectiveMap,
    mode: StepMode,
    f: impl Fn(&Vec3, f64) -> f64 + Sync,
) -> Coverage {
    Plane::par_from_fn(map.width(), map.height(), |i, j| match map.vector(i, j) {
        None => 0.0,
        Some(g) => {
            let rim = map.coverage_mask(i, j);
            let rim = match mode {
                StepMode::Pixel => rim,
                StepMode::Binary => crate::sphere::bstep(rim - 0.5),
            };
            if rim == 0.0 {
                0.0
            } else {
                f(&g, map.inv_delta(i, j)) * rim
            }
        }
    })
}

pub fn rasterize_triangle(map: &PerspectiveMap, em: &EdgeMatrix, mode: StepMode) -> Coverage {
    raster_with(map, mode, |g, d| em.coverage(g, d, mode))
}

/// Rows for a convex planar polygon given counter-clockwise as seen from the
/// eye.
pub fn polygon_edge_matrix(vertices: &[Vec3]) -> Result<EdgeMatrix> {
    let n = vertices.len();
    if n < 3 {
        return Err(Error::TooFewVertices(n));
    }
    // Newell normal and planarity against the polygon's own size
    let mut normal = Vec3::zeros();
    for i in 0..n {
        normal += vertices[i].cross(&vertices[(i + 1) % n]);
    }
    let centroid = vertices.iter().sum::<Vec3>() / n as f64;
    let size = vertices.iter().map(|v| (v - centroid).norm()).fold(0.0, f64::max);
    let nn = normal.norm();
    if !(nn > 0.0 && size > 0.0) {
        return Err(Error::DegenerateEdge);
    }
    let unit = normal / nn;
    let deviation =
        vertices.iter().map(|v| (v - centroid).dot(&unit).abs()).fold(0.0, f64::max) / size;
    if deviation > 1e-6 {
        return Err(Error::NonPlanar(deviation));
    }
    let rows = (0..n)
        .map(|i| edge_row(&vertices[i], &vertices[(i + 1) % n]))
        .collect::<Result<Vec<_>>>()?;
    // convex and consistently wound: every vertex lies inside the other rows
    for (i, row) in rows.iter().enumerate() {
        for (k, v) in vertices.iter().enumerate() {
            if k != i && k != (i + 1) % n && row.dot(v) < -1e-12 * v.norm() {
                return Err(Error::domain("polygon is not convex or not counter-clockwise"));
            }
        }
    }
    Ok(EdgeMatrix::from_rows(rows))
}

pub fn rasterize_polygon(map: &PerspectiveMap, vertices: &[Vec3], mode: StepMode) -> Result<Coverage> {
    let em = polygon_edge_matrix(vertices)?;
    Ok(rasterize_triangle(map, &em, mode))
}
