//! Visual-sphere perspective rendering.
//!
//! A *perspective map* stores, for every output pixel, the unit incident
//! vector that pixel sees. Any projection (rectilinear, fisheye, dome,
//! cube strip, VR, projector warps) is just a different map. Geometry is
//! rasterized directly against the map: every triangle edge is a great
//! circle on the visual sphere, so an edge test is a single dot product
//! between the map vector and the normalized cross product of the edge's
//! endpoints.
//!
//! Module layout:
//!
//! - [`sphere`]: coordinate conventions, step functions, discrete derivatives.
//! - [`projections`]: the universal perspective model, fixed projection
//!   generators, lens distortion and map baking.
//! - [`raster`]: triangle, polygon, line and particle rasterization plus
//!   front-to-back compositing.
//! - [`io`]: OBJ meshes, scene documents, PFM/PNG files.
//! - [`cli`]: the `visphere` command line and preview server.
//!
//! Frame convention: camera space is `x` right, `y` up, `z` forward. Texture
//! coordinate `t = 0` is the bottom row, which is also the first row stored in
//! a PFM file.

// `!(x > 0.0)` is how NaN gets rejected alongside the range check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod io;
pub mod projections;
pub mod raster;
pub mod sphere;

pub use error::{Error, Result};
pub use projections::map::{bake_map, MapLayout, PerspectiveMap};
pub use projections::params::PerspectiveParams;
pub use projections::ProjectionSpec;
pub use sphere::{AovMode, AovSpec, Plane, TextureCoord, UnitVector3, Vec3, ViewCoord};
