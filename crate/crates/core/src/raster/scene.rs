//! Scene description in world space and the front-to-back renderer.

use std::sync::Arc;

use nalgebra::{Matrix3, Matrix4, Point3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::projections::map::PerspectiveMap;
use crate::projections::MaskKind;
use crate::raster::composite::PixelAccum;
use crate::raster::edge::{edge_matrix, smallest_circle, EdgeMatrix};
use crate::raster::line::LineMask;
use crate::raster::particle::{Particle, ParticleMask};
use crate::raster::{barycentric, interpolate_fragment, subdivide_wide, CameraTriangle, CameraVertex, FragmentBuffers, StepMode};
use crate::sphere::{Plane, Vec3};

/// Viewer pose. World space is right-handed with `+y` up and the unrotated
/// camera looking down `−z`; angles are radians.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Camera {
    pub yaw: f64,
    pub pitch: f64,
    pub roll: f64,
    pub position: Vec3,
}

impl Camera {
    /// `Ry(yaw)·Rx(pitch)·Rz(roll)`, camera axes expressed in world space.
    pub fn rotation(&self) -> Matrix3<f64> {
        let ry = nalgebra::Rotation3::from_axis_angle(&Vec3::y_axis(), self.yaw);
        let rx = nalgebra::Rotation3::from_axis_angle(&Vec3::x_axis(), self.pitch);
        let rz = nalgebra::Rotation3::from_axis_angle(&Vec3::z_axis(), self.roll);
        (ry * rx * rz).into_inner()
    }

    /// World point to camera space (`x` right, `y` up, `z` forward).
    pub fn to_camera(&self, p: &Vec3) -> Vec3 {
        flip_z(self.rotation().transpose() * (p - self.position))
    }

    pub fn direction_to_camera(&self, d: &Vec3) -> Vec3 {
        flip_z(self.rotation().transpose() * d)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.yaw, self.pitch, self.roll].iter().all(|a| a.is_finite())
            && self.position.iter().all(|x| x.is_finite());
        if ok { Ok(()) } else { Err(Error::domain("camera pose must be finite")) }
    }
}

fn flip_z(v: Vec3) -> Vec3 {
    Vec3::new(v.x, v.y, -v.z)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vertex {
    pub position: Vec3,
    pub uv: [f64; 2],
    pub normal: Option<Vec3>,
}

impl Vertex {
    pub fn new(position: Vec3) -> Self {
        Self { position, uv: [0.0; 2], normal: None }
    }
}

/// Indexed triangle mesh; faces are counter-clockwise seen from outside.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Vertex>,
    pub faces: Vec<[usize; 3]>,
}

impl Mesh {
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if let Some(f) = self.faces.iter().find(|f| f.iter().any(|&i| i >= n)) {
            return Err(Error::domain(format!("face {f:?} indexes past {n} vertices")));
        }
        if self.vertices.iter().any(|v| !v.position.iter().all(|x| x.is_finite())) {
            return Err(Error::domain("non-finite vertex position"));
        }
        Ok(())
    }

    /// Unique undirected edges.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut e: Vec<[usize; 2]> = self
            .faces
            .iter()
            .flat_map(|f| [[f[0], f[1]], [f[1], f[2]], [f[2], f[0]]])
            .map(|[a, b]| [a.min(b), a.max(b)])
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeshInstance {
    pub mesh: Arc<Mesh>,
    pub transform: Matrix4<f64>,
}

impl MeshInstance {
    pub fn new(mesh: Arc<Mesh>) -> Self {
        Self { mesh, transform: Matrix4::identity() }
    }

    pub fn with_transform(mut self, transform: Matrix4<f64>) -> Self {
        self.transform = transform;
        self
    }
}

/// Forward shift of the no-parallax point as a function of incidence angle.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParallaxProfile {
    samples: Vec<(f64, f64)>,
}

impl ParallaxProfile {
    /// `(θ, offset)` pairs with `θ` in `[0, π]`, strictly increasing.
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        let p = Self { samples };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (k, &(theta, off)) in self.samples.iter().enumerate() {
            if !(0.0..=std::f64::consts::PI).contains(&theta) || !off.is_finite() {
                return Err(Error::domain(format!("parallax sample {k} ({theta}, {off}) is out of range")));
            }
            if k > 0 && theta <= self.samples[k - 1].0 {
                return Err(Error::domain("parallax samples must be sorted by angle"));
            }
        }
        Ok(())
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Linear interpolation, held constant past either end.
    pub fn offset(&self, theta: f64) -> f64 {
        let s = &self.samples;
        match s.len() {
            0 => 0.0,
            _ if theta <= s[0].0 => s[0].1,
            _ if theta >= s[s.len() - 1].0 => s[s.len() - 1].1,
            _ => {
                let k = s.partition_point(|&(t, _)| t <= theta);
                let ((t0, o0), (t1, o1)) = (s[k - 1], s[k]);
                o0 + (o1 - o0) * (theta - t0) / (t1 - t0)
            }
        }
    }

    pub fn apply(&self, p: &Vec3) -> Vec3 {
        if self.is_empty() {
            return *p;
        }
        let theta = p.angle(&Vec3::z());
        Vec3::new(p.x, p.y, p.z - self.offset(theta))
    }
}

pub fn apply_parallax(positions: &[Vec3], profile: &ParallaxProfile) -> Vec<Vec3> {
    positions.iter().map(|p| profile.apply(p)).collect()
}

/// Everything a render needs besides the map, in world space.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Scene {
    pub camera: Camera,
    pub objects: Vec<MeshInstance>,
    pub lines: Vec<[Vec3; 2]>,
    pub particles: Vec<Particle>,
    pub parallax: ParallaxProfile,
    /// Geometry may interpenetrate, so ordering by centroid is not enough.
    pub intersecting: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderOptions {
    pub mode: StepMode,
    pub miter: bool,
    /// Also produce the unoccluded wire plane from scene lines and mesh edges.
    pub wireframe: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self { mode: StepMode::Pixel, miter: true, wireframe: false }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Triangles rasterized after culling and subdivision.
    pub triangles: usize,
    pub culled: usize,
    /// Triangles that were split into more than one piece.
    pub subdivided: usize,
    /// Primitives dropped because of degenerate geometry.
    pub skipped: usize,
    pub particles: usize,
    pub lines: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenderOutput {
    pub buffers: FragmentBuffers,
    pub wire: Option<Plane<f64>>,
    pub diagnostics: Diagnostics,
}

impl RenderOutput {
    /// Headlight Lambert times a uv checker, times the map's dimming plane,
    /// with the wire plane drawn on top.
    pub fn shaded(&self, map: &PerspectiveMap) -> Plane<f64> {
        let normals = self.buffers.normals();
        let uv = self.buffers.resolved_uv();
        let dimming = match (map.mask_kind(), map.mask()) {
            (Some(MaskKind::Dimming), Some(m)) => Some(m),
            _ => None,
        };
        Plane::from_fn(map.width(), map.height(), |i, j| {
            let m = self.buffers.mask.at(i, j);
            let mut value = 0.0;
            if let (true, Some(g)) = (m > 0.0, map.vector(i, j)) {
                let lambert = (-normals.at(i, j).dot(&g)).max(0.0);
                let [u, v] = uv.at(i, j);
                let cell = ((u * 8.0).floor() + (v * 8.0).floor()).rem_euclid(2.0);
                value = m * (0.2 + 0.8 * lambert) * (0.8 + 0.2 * cell);
                if let Some(d) = dimming {
                    value *= f64::from(d.at(i, j));
                }
            }
            match &self.wire {
                Some(w) => value.max(w.at(i, j)),
                None => value,
            }
        })
    }
}

enum Shape {
    Triangle { tri: CameraTriangle, em: EdgeMatrix },
    Particle(ParticleMask),
}

struct Prim {
    shape: Shape,
    axis: Vec3,
    radius: f64,
    key: f64,
}

impl Prim {
    #[inline]
    fn coverage(&self, g: &Vec3, inv_delta: f64, mode: StepMode) -> f64 {
        match &self.shape {
            Shape::Triangle { em, .. } => em.coverage(g, inv_delta, mode),
            Shape::Particle(p) => p.coverage(g, inv_delta, mode),
        }
    }

    /// Closed inside test, so shared edges belong to both neighbours.
    fn contains(&self, g: &Vec3) -> bool {
        match &self.shape {
            Shape::Triangle { em, .. } => em.contains(g),
            Shape::Particle(p) => p.contains(g),
        }
    }

    fn fragment(&self, g: &Vec3) -> Option<crate::raster::Fragment> {
        match &self.shape {
            Shape::Triangle { tri, .. } => barycentric(g, tri).ok().map(|bc| interpolate_fragment(&bc, tri)),
            Shape::Particle(p) => Some(p.fragment(g)),
        }
    }
}

struct WirePrim {
    mask: LineMask,
    axis: Vec3,
    radius: f64,
}

/// Bounding cone of a rectangular block of map pixels.
struct Tile {
    i0: usize,
    j0: usize,
    i1: usize,
    j1: usize,
    axis: Vec3,
    radius: f64,
    pixel: f64,
}

const TILE: usize = 16;

fn tiles(map: &PerspectiveMap) -> Vec<Tile> {
    let (w, h) = (map.width(), map.height());
    let mut out = Vec::new();
    for j0 in (0..h).step_by(TILE) {
        for i0 in (0..w).step_by(TILE) {
            let (i1, j1) = ((i0 + TILE).min(w), (j0 + TILE).min(h));
            let mut sum = Vec3::zeros();
            let mut pixel = 0.0f64;
            let mut any = false;
            for j in j0..j1 {
                for i in i0..i1 {
                    if let Some(g) = map.vector(i, j) {
                        sum += g;
                        pixel = pixel.max(1.0 / map.inv_delta(i, j));
                        any = true;
                    }
                }
            }
            if !any {
                continue;
            }
            let (axis, radius) = match sum.try_normalize(1e-9) {
                Some(axis) => {
                    let r = (j0..j1)
                        .flat_map(|j| (i0..i1).map(move |i| (i, j)))
                        .filter_map(|(i, j)| map.vector(i, j))
                        .map(|g| g.angle(&axis))
                        .fold(0.0, f64::max);
                    (axis, r)
                }
                None => (Vec3::z(), std::f64::consts::PI),
            };
            out.push(Tile { i0, j0, i1, j1, axis, radius, pixel });
        }
    }
    out
}

fn overlaps(tile: &Tile, axis: &Vec3, radius: f64) -> bool {
    tile.axis.angle(axis) <= tile.radius + radius + 2.0 * tile.pixel + 1e-9
}

fn camera_triangles(scene: &Scene, diag: &mut Diagnostics) -> Vec<CameraTriangle> {
    let cam = &scene.camera;
    let mut out = Vec::new();
    for inst in &scene.objects {
        let lin = inst.transform.fixed_view::<3, 3>(0, 0).into_owned();
        let normal_m = lin.try_inverse().map(|m| m.transpose()).unwrap_or(lin);
        let verts: Vec<CameraVertex> = inst
            .mesh
            .vertices
            .iter()
            .map(|v| {
                let world = inst.transform.transform_point(&Point3::from(v.position)).coords;
                let pos = scene.parallax.apply(&cam.to_camera(&world));
                let normal = v
                    .normal
                    .and_then(|n| cam.direction_to_camera(&(normal_m * n)).try_normalize(1e-12))
                    .unwrap_or_else(Vec3::zeros);
                CameraVertex { position: pos, uv: v.uv, normal }
            })
            .collect();
        for f in &inst.mesh.faces {
            let t = CameraTriangle::new(verts[f[0]], verts[f[1]], verts[f[2]]);
            if t.is_front_facing() {
                out.push(t);
            } else {
                diag.culled += 1;
            }
        }
    }
    out
}

fn triangle_prims(tris: &[CameraTriangle], miter: bool, diag: &mut Diagnostics) -> Vec<Prim> {
    let mut out = Vec::new();
    for t in tris {
        let pieces = match subdivide_wide(t) {
            Ok(p) => p,
            Err(e) => {
                log::debug!("skipping triangle: {e}");
                diag.skipped += 1;
                continue;
            }
        };
        // pieces of a split triangle share internal corners, which a miter
        // row would notch
        let whole = pieces.len() == 1;
        if !whole {
            diag.subdivided += 1;
        }
        for tri in pieces {
            let em = match edge_matrix(&tri, miter && whole) {
                Ok(em) => em,
                Err(e) => {
                    log::debug!("skipping triangle: {e}");
                    diag.skipped += 1;
                    continue;
                }
            };
            let circle = smallest_circle(&tri);
            let (axis, radius) = match circle.center.try_normalize(1e-12) {
                Some(axis) if !circle.degenerate => (axis, circle.threshold.clamp(-1.0, 1.0).acos()),
                _ => (tri.centroid().normalize(), tri.angular_span()),
            };
            diag.triangles += 1;
            out.push(Prim { shape: Shape::Triangle { tri, em }, axis, radius, key: tri.centroid().norm() });
        }
    }
    out
}

fn wire_prims(scene: &Scene, diag: &mut Diagnostics) -> Vec<WirePrim> {
    let cam = &scene.camera;
    let to_cam = |p: &Vec3| scene.parallax.apply(&cam.to_camera(p));
    let mut segs: Vec<(Vec3, Vec3)> = scene.lines.iter().map(|[a, b]| (to_cam(a), to_cam(b))).collect();
    for inst in &scene.objects {
        let world = |k: usize| inst.transform.transform_point(&Point3::from(inst.mesh.vertices[k].position)).coords;
        segs.extend(inst.mesh.edges().into_iter().map(|[a, b]| (to_cam(&world(a)), to_cam(&world(b)))));
    }
    let mut out = Vec::new();
    for (a, b) in segs {
        match LineMask::new(&a, &b) {
            Ok(mask) => {
                diag.lines += 1;
                out.push(WirePrim { axis: mask.axis(), radius: mask.half_angle(), mask });
            }
            Err(e) => {
                log::debug!("skipping line: {e}");
                diag.skipped += 1;
            }
        }
    }
    out
}

/// Renders triangles and particles front to back into fresh buffers.
///
/// Pixels are independent, so tiles run in parallel while each pixel visits
/// primitives in sorted order; the result does not depend on thread count.
pub fn render_scene(scene: &Scene, map: &PerspectiveMap, options: &RenderOptions) -> Result<RenderOutput> {
    scene.camera.validate()?;
    scene.parallax.validate()?;
    for inst in &scene.objects {
        inst.mesh.validate()?;
    }
    let mut diag = Diagnostics::default();
    let tris = camera_triangles(scene, &mut diag);
    let mut prims = triangle_prims(&tris, options.miter, &mut diag);
    for p in &scene.particles {
        let moved = Particle { position: scene.parallax.apply(&scene.camera.to_camera(&p.position)), radius: p.radius };
        match ParticleMask::new(&moved) {
            Ok(mask) => {
                diag.particles += 1;
                prims.push(Prim {
                    axis: mask.axis(),
                    radius: mask.angular_radius(),
                    key: moved.position.norm(),
                    shape: Shape::Particle(mask),
                });
            }
            Err(e) => {
                log::debug!("skipping particle: {e}");
                diag.skipped += 1;
            }
        }
    }
    prims.sort_by(|a, b| a.key.total_cmp(&b.key));
    let wires = if options.wireframe { wire_prims(scene, &mut diag) } else { Vec::new() };

    let (w, h) = (map.width(), map.height());
    let tiles = tiles(map);
    let mode = if scene.intersecting { StepMode::Binary } else { options.mode };
    let rendered: Vec<(usize, Vec<(usize, PixelAccum, f64)>)> = tiles
        .par_iter()
        .enumerate()
        .map(|(k, tile)| {
            let local: Vec<&Prim> = prims.iter().filter(|p| overlaps(tile, &p.axis, p.radius)).collect();
            let local_wires: Vec<&WirePrim> = wires.iter().filter(|l| overlaps(tile, &l.axis, l.radius)).collect();
            let mut px = Vec::with_capacity((tile.i1 - tile.i0) * (tile.j1 - tile.j0));
            for j in tile.j0..tile.j1 {
                for i in tile.i0..tile.i1 {
                    let Some(g) = map.vector(i, j) else { continue };
                    let rim = map.coverage_mask(i, j);
                    let inv = map.inv_delta(i, j);
                    let acc = if scene.intersecting {
                        nearest(&local, &g, rim)
                    } else {
                        front_to_back(&local, &g, inv, rim, mode)
                    };
                    let wire = local_wires
                        .iter()
                        .map(|l| l.mask.coverage(&g, inv, options.mode))
                        .fold(0.0, f64::max)
                        * rim;
                    px.push((map.vectors().index(i, j), acc, wire));
                }
            }
            (k, px)
        })
        .collect();

    let mut accum = vec![PixelAccum::default(); w * h];
    let mut wire = options.wireframe.then(|| Plane::filled(w, h, 0.0));
    for (_, px) in rendered {
        for (idx, acc, wv) in px {
            accum[idx] = acc;
            if let Some(wp) = wire.as_mut() {
                wp.as_mut_slice()[idx] = wv;
            }
        }
    }
    Ok(RenderOutput { buffers: FragmentBuffers::from_pixels(w, h, &accum), wire, diagnostics: diag })
}

fn front_to_back(prims: &[&Prim], g: &Vec3, inv: f64, rim: f64, mode: StepMode) -> PixelAccum {
    let mut acc = PixelAccum::default();
    if rim <= 0.0 {
        return acc;
    }
    for p in prims {
        let m = p.coverage(g, inv, mode) * rim;
        if m <= 0.0 {
            continue;
        }
        if let Some(f) = p.fragment(g) {
            acc.add(m, &f);
            if acc.mask >= rim {
                break;
            }
        }
    }
    acc
}

fn nearest(prims: &[&Prim], g: &Vec3, rim: f64) -> PixelAccum {
    let mut acc = PixelAccum::default();
    if rim < 0.5 {
        return acc;
    }
    let best = prims
        .iter()
        .filter(|p| p.contains(g))
        .filter_map(|p| p.fragment(g))
        .filter(|f| f.depth > 0.0)
        .min_by(|a, b| a.depth.total_cmp(&b.depth));
    if let Some(f) = best {
        acc.add(1.0, &f);
    }
    acc
}
