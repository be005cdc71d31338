//! Self-intersection removal for oriented triangle meshes, with a
//! topology-adaptive evolution loop built on top of it.

pub mod bvh;
pub mod cdt;
pub mod error;
pub mod evolve;
pub mod intersect;
pub mod kernel;
pub mod mesh;
pub mod morph;
pub mod transformesh;
pub mod winding;

pub use error::{Error, Result};
pub use mesh::SurfaceMesh;

/// Library version, as reported by the command-line tool.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
