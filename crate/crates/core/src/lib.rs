//! Extended finite elements on polygonal meshes for large-deformation fracture
//! of hyperelastic solids.

pub mod basis;
pub mod cli;
pub mod enrichment;
pub mod error;
pub mod fracture;
pub mod geometry;
pub mod io;
pub mod material;
pub mod mesh;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::Vec2;
