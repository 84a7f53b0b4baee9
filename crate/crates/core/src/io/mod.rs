//! File formats: PFM and PNG images, the OBJ subset, scene documents, map
//! files and render passes.

pub mod map_io;
pub mod obj;
pub mod passes;
pub mod pfm;
pub mod png;
pub mod primitives;
pub mod scene;

pub use map_io::{load_map, save_map, save_map_preview};
pub use obj::{load_obj, parse_obj, ObjMesh};
pub use passes::{save_pass, Pass};
pub use pfm::{read_pfm, write_pfm, PfmImage};
pub use scene::{load_scene, parse_scene, ProjectionSource, SceneDocument, Strictness};
