//! Front-to-back coverage compositing.

use crate::raster::Fragment;
use crate::sphere::{Plane, Vec3};

/// Running sums for one pixel.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct PixelAccum {
    pub mask: f64,
    pub depth: f64,
    pub uv: [f64; 2],
    pub normal: Vec3,
}

impl PixelAccum {
    /// Clips `m_f` against what is already painted and adds the remainder.
    #[inline]
    pub fn add(&mut self, m_f: f64, f: &Fragment) -> f64 {
        let m = m_f.min(1.0 - self.mask);
        if m > 0.0 {
            self.mask += m;
            self.depth += m * f.depth;
            self.uv[0] += m * f.uv[0];
            self.uv[1] += m * f.uv[1];
            self.normal += m * f.normal;
            m
        } else {
            0.0
        }
    }
}

/// Mask, depth, uv and normal sums. All start at zero.
#[derive(Clone, Debug, PartialEq)]
pub struct FragmentBuffers {
    pub mask: Plane<f64>,
    pub depth: Plane<f64>,
    pub uv: Plane<[f64; 2]>,
    normal: Plane<Vec3>,
}

impl FragmentBuffers {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            mask: Plane::filled(width, height, 0.0),
            depth: Plane::filled(width, height, 0.0),
            uv: Plane::filled(width, height, [0.0; 2]),
            normal: Plane::filled(width, height, Vec3::zeros()),
        }
    }

    pub(crate) fn from_pixels(width: usize, height: usize, px: &[PixelAccum]) -> Self {
        let plane = |f: &dyn Fn(&PixelAccum) -> f64| Plane::from_vec(width, height, px.iter().map(f).collect()).expect("size");
        Self {
            mask: plane(&|p| p.mask),
            depth: plane(&|p| p.depth),
            uv: Plane::from_vec(width, height, px.iter().map(|p| p.uv).collect()).expect("size"),
            normal: Plane::from_vec(width, height, px.iter().map(|p| p.normal).collect()).expect("size"),
        }
    }

    pub fn width(&self) -> usize {
        self.mask.width()
    }

    pub fn height(&self) -> usize {
        self.mask.height()
    }

    /// Returns the clipped mask `m_fc` that was actually added.
    pub fn composite(&mut self, i: usize, j: usize, m_f: f64, fragment: &Fragment) -> f64 {
        let mut acc = PixelAccum {
            mask: self.mask.at(i, j),
            depth: self.depth.at(i, j),
            uv: self.uv.at(i, j),
            normal: self.normal.at(i, j),
        };
        let m = acc.add(m_f, fragment);
        *self.mask.get_mut(i, j) = acc.mask;
        *self.depth.get_mut(i, j) = acc.depth;
        *self.uv.get_mut(i, j) = acc.uv;
        *self.normal.get_mut(i, j) = acc.normal;
        m
    }

    /// Accumulated, not yet normalized normals.
    pub fn normal_sum(&self) -> &Plane<Vec3> {
        &self.normal
    }

    /// Normals renormalized at read-out; zero where nothing was painted.
    pub fn normals(&self) -> Plane<Vec3> {
        self.normal.map(|n| n.try_normalize(1e-12).unwrap_or_else(Vec3::zeros))
    }

    /// Depth divided by coverage, so partially covered pixels report the
    /// fragment distance rather than a blend with the empty background.
    pub fn resolved_depth(&self) -> Plane<f64> {
        Plane::from_fn(self.width(), self.height(), |i, j| {
            let m = self.mask.at(i, j);
            if m > 0.0 { self.depth.at(i, j) / m } else { 0.0 }
        })
    }

    pub fn resolved_uv(&self) -> Plane<[f64; 2]> {
        Plane::from_fn(self.width(), self.height(), |i, j| {
            let m = self.mask.at(i, j);
            let uv = self.uv.at(i, j);
            if m > 0.0 { [uv[0] / m, uv[1] / m] } else { [0.0; 2] }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn frag(depth: f64) -> Fragment {
        Fragment { depth, uv: [0.25, 0.5], normal: Vec3::new(0.0, 0.0, -1.0) }
    }

    #[test]
    fn saturated_pixel_discards() {
        let mut b = FragmentBuffers::new(1, 1);
        b.composite(0, 0, 1.0, &frag(2.0));
        assert_eq!(b.composite(0, 0, 1.0, &frag(1.0)), 0.0);
        assert_eq!(b.depth.at(0, 0), 2.0);
    }

    #[test]
    fn empty_pixel_takes_fragment() {
        let mut b = FragmentBuffers::new(1, 1);
        b.composite(0, 0, 0.7, &frag(2.0));
        assert_abs_diff_eq!(b.mask.at(0, 0), 0.7);
        assert_abs_diff_eq!(b.depth.at(0, 0), 1.4);
        assert_abs_diff_eq!(b.uv.at(0, 0)[1], 0.35);
        assert_abs_diff_eq!(b.resolved_depth().at(0, 0), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_clip_example() {
        let mut b = FragmentBuffers::new(1, 1);
        b.composite(0, 0, 0.4, &frag(1.0));
        let m = b.composite(0, 0, 0.9, &frag(3.0));
        assert_abs_diff_eq!(m, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(b.mask.at(0, 0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn normals_renormalized_at_readout() {
        let mut b = FragmentBuffers::new(1, 1);
        b.composite(0, 0, 0.5, &Fragment { depth: 1.0, uv: [0.0; 2], normal: Vec3::x() });
        b.composite(0, 0, 0.5, &Fragment { depth: 1.0, uv: [0.0; 2], normal: Vec3::y() });
        let n = b.normals().at(0, 0);
        assert_abs_diff_eq!(n.norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(n.x, n.y, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn mask_never_exceeds_one(ms in proptest::collection::vec(0.0f64..=1.0, 1..20)) {
            let mut b = FragmentBuffers::new(1, 1);
            for m in ms {
                b.composite(0, 0, m, &frag(1.0));
                prop_assert!(b.mask.at(0, 0) <= 1.0 + 1e-6);
            }
        }

        #[test]
        fn disjoint_binary_masks_commute(order in Just((0..6usize).collect::<Vec<_>>()).prop_shuffle()) {
            // six fragments on six different pixels of a 3×2 grid
            let mut a = FragmentBuffers::new(3, 2);
            let mut b = FragmentBuffers::new(3, 2);
            for k in 0..6 {
                a.composite(k % 3, k / 3, 1.0, &frag(k as f64 + 1.0));
            }
            for &k in &order {
                b.composite(k % 3, k / 3, 1.0, &frag(k as f64 + 1.0));
            }
            prop_assert_eq!(a, b);
        }
    }
}
