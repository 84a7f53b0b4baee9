//! Built-in meshes for scenes that do not ship OBJ files.

use std::sync::Arc;

use nalgebra::{Matrix4, Translation3};

use crate::raster::{Mesh, MeshInstance, Particle, Scene, Vertex};
use crate::sphere::Vec3;

/// Unit square in the `xy` plane centered on the origin, facing `+z`.
pub fn quad() -> Mesh {
    face(Vec3::zeros(), Vec3::x() * 0.5, Vec3::y() * 0.5, Vec3::z(), false)
}

/// Axis-aligned box with outward faces.
pub fn cuboid(half: Vec3) -> Mesh {
    box_mesh(half, false)
}

/// Axis-aligned box seen from inside: faces point inwards.
pub fn room(half: Vec3) -> Mesh {
    box_mesh(half, true)
}

/// Furnished box room around the viewer: walls, a table-sized block, a
/// picture on the far wall, a few particles and a horizon line.
pub fn demo_room() -> Scene {
    let at = |x: f64, y: f64, z: f64| Translation3::new(x, y, z).to_homogeneous();
    let objects = vec![
        MeshInstance::new(Arc::new(room(Vec3::new(4.0, 2.5, 4.0)))),
        MeshInstance::new(Arc::new(cuboid(Vec3::new(0.8, 0.4, 0.5)))).with_transform(at(0.0, -2.1, -2.5)),
        MeshInstance::new(Arc::new(cuboid(Vec3::new(0.3, 1.0, 0.3)))).with_transform(at(-2.5, -1.5, -1.0)),
        MeshInstance::new(Arc::new(quad())).with_transform(at(0.0, 0.3, -3.99) * Matrix4::new_nonuniform_scaling(&Vec3::new(2.4, 1.4, 1.0))),
    ];
    let particles = [(-1.0, 0.5, -2.0, 0.25), (1.2, -0.4, -1.8, 0.2), (2.0, 1.0, 2.5, 0.3)]
        .iter()
        .map(|&(x, y, z, r)| Particle { position: Vec3::new(x, y, z), radius: r })
        .collect();
    Scene {
        objects,
        particles,
        lines: vec![[Vec3::new(-4.0, 0.0, -3.98), Vec3::new(4.0, 0.0, -3.98)]],
        ..Scene::default()
    }
}

fn face(center: Vec3, u: Vec3, v: Vec3, normal: Vec3, inward: bool) -> Mesh {
    let corners = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];
    let vertices = corners
        .iter()
        .map(|&(a, b)| Vertex {
            position: center + a * u + b * v,
            uv: [(a + 1.0) / 2.0, (b + 1.0) / 2.0],
            normal: Some(if inward { -normal } else { normal }),
        })
        .collect();
    let faces = if inward { vec![[0, 2, 1], [0, 3, 2]] } else { vec![[0, 1, 2], [0, 2, 3]] };
    Mesh { vertices, faces }
}

fn box_mesh(half: Vec3, inward: bool) -> Mesh {
    let (x, y, z) = (Vec3::x(), Vec3::y(), Vec3::z());
    // (outward normal, u, v) with u × v = normal
    let sides = [(x, y, z), (-x, z, y), (y, z, x), (-y, x, z), (z, x, y), (-z, y, x)];
    let mut mesh = Mesh::default();
    for (n, u, v) in sides {
        let scale = |a: Vec3| a.component_mul(&half);
        let f = face(scale(n), scale(u), scale(v), n, inward);
        let base = mesh.vertices.len();
        mesh.vertices.extend(f.vertices);
        mesh.faces.extend(f.faces.iter().map(|t| t.map(|k| k + base)));
    }
    mesh
}
