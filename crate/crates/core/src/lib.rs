//! Isolated non-saddle sets of flows on closed orientable surfaces.
//!
//! The crate builds triangulated surfaces from planar pieces, synthesises
//! flows with a prescribed stationary set, approximates them by a
//! combinatorial multivalued map, and measures the region of influence of
//! the stationary set together with the cohomology of the inclusion.

pub mod algebra;
pub mod continuation;
pub mod dynamics;
pub mod error;
pub mod flow;
pub mod geom;
pub mod mesh;
pub mod render;
pub mod verify;

pub use error::{Error, Result};

/// Version of every JSON document the crate reads or writes.
pub const SCHEMA: u32 = 1;
