//! Splitting of triangles that cover too much of the sphere.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::raster::CameraTriangle;

/// Largest allowed angle between two vertex directions of one piece.
pub const MAX_SPAN: f64 = FRAC_PI_2;
pub const MAX_DEPTH: usize = 16;

/// Splits at edge midpoints until every piece spans at most `π/2`. Pieces are
/// coplanar with the input and keep its winding.
pub fn subdivide_wide(t: &CameraTriangle) -> Result<Vec<CameraTriangle>> {
    let mut out = Vec::new();
    split(t, 0, &mut out)?;
    Ok(out)
}

fn split(t: &CameraTriangle, depth: usize, out: &mut Vec<CameraTriangle>) -> Result<()> {
    if t.positions().iter().any(|p| !(p.norm() > 1e-12)) {
        return Err(Error::domain("triangle passes through the eye"));
    }
    let span = t.angular_span();
    if span <= MAX_SPAN {
        out.push(*t);
        return Ok(());
    }
    if depth >= MAX_DEPTH {
        return Err(Error::SubdivisionLimit(depth));
    }
    let ab = t.a.lerp(&t.b, 0.5);
    let bc = t.b.lerp(&t.c, 0.5);
    let ca = t.c.lerp(&t.a, 0.5);
    for piece in [
        CameraTriangle::new(t.a, ab, ca),
        CameraTriangle::new(ab, t.b, bc),
        CameraTriangle::new(ca, bc, t.c),
        CameraTriangle::new(ab, bc, ca),
    ] {
        split(&piece, depth + 1, out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projections::{map::bake_map, ProjectionSpec};
    use crate::raster::{edge_matrix, rasterize_triangle, CameraVertex, StepMode};
    use crate::sphere::Vec3;
    use approx::assert_abs_diff_eq;

    #[test]
    fn small_triangle_unchanged() {
        let t = CameraTriangle::from_positions(
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(0.5, 0.0, 1.0),
            Vec3::new(0.0, 0.5, 1.0),
        );
        assert_eq!(subdivide_wide(&t).unwrap(), vec![t]);
    }

    #[test]
    fn wide_triangle_union_matches_oracle() {
        // spans just above π/2 between A and B
        let t = CameraTriangle::from_positions(
            Vec3::new(-1.05, -0.3, 1.0),
            Vec3::new(1.05, -0.3, 1.0),
            Vec3::new(0.0, 0.8, 1.0),
        );
        assert!(t.angular_span() > MAX_SPAN);
        let pieces = subdivide_wide(&t).unwrap();
        assert_eq!(pieces.len(), 4);
        let n = t.plane_normal().normalize();
        for p in &pieces {
            assert!(p.is_front_facing());
            for v in p.positions() {
                assert_abs_diff_eq!((v - t.a.position).dot(&n), 0.0, epsilon = 1e-12);
            }
        }
        let spec = ProjectionSpec::universal(
            &crate::projections::params::PerspectiveParams::from_degrees(170.0, 0.0, 1.0, 1.0).unwrap(),
            crate::sphere::AovMode::Horizontal,
        );
        let map = bake_map(&spec, 96, 96).unwrap();
        let [a, b, c] = t.positions();
        let mut union = vec![0.0f64; 96 * 96];
        for p in &pieces {
            let cov = rasterize_triangle(&map, &edge_matrix(p, false).unwrap(), StepMode::Binary);
            for (u, x) in union.iter_mut().zip(cov.as_slice()) {
                *u += x;
            }
        }
        let mut mismatched = 0;
        for j in 0..96 {
            for i in 0..96 {
                let g = map.vector(i, j).unwrap();
                let d = [g.dot(&a.cross(&b)), g.dot(&b.cross(&c)), g.dot(&c.cross(&a))];
                let inside = d.iter().all(|&x| x > 0.0);
                let u = union[map.vectors().index(i, j)];
                assert!(u <= 1.0, "overlap at ({i},{j})");
                if (u == 1.0) != inside {
                    mismatched += 1;
                }
            }
        }
        assert_eq!(mismatched, 0);
    }

    #[test]
    fn shared_midpoints_agree() {
        let t = CameraTriangle::new(
            CameraVertex::new(Vec3::new(-2.0, -0.5, 1.0)).with_uv([0.0, 0.0]),
            CameraVertex::new(Vec3::new(2.0, -0.5, 1.0)).with_uv([1.0, 0.0]),
            CameraVertex::new(Vec3::new(0.0, 2.0, 1.0)).with_uv([0.0, 1.0]),
        );
        let pieces = subdivide_wide(&t).unwrap();
        assert!(pieces.len() >= 4);
        for p in &pieces {
            for v in [p.a, p.b, p.c] {
                for q in &pieces {
                    for w in [q.a, q.b, q.c] {
                        if v.position == w.position {
                            assert_eq!(v.uv, w.uv);
                        }
                    }
                }
            }
            assert!(p.angular_span() <= MAX_SPAN);
        }
    }

    #[test]
    fn through_the_eye_is_rejected() {
        let t = CameraTriangle::from_positions(
            Vec3::new(-1.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        );
        assert!(subdivide_wide(&t).is_err());
    }
}
