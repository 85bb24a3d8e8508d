//! Intrinsic coarsening of triangle meshes.
//!
//! A surface is represented purely by its edge lengths on a Δ-complex
//! ([`Surface`]). Vertices are removed greedily in order of an intrinsic
//! curvature error: each removal conformally flattens the vertex, flips it
//! down to degree three (two on the boundary), excises it and restores an
//! intrinsic Delaunay triangulation. Every atomic operation is logged so
//! that points on the input can be tracked onto the coarse surface, which in
//! turn yields scalar and tangent-vector prolongation operators.
//!
//! The crate is `no_std` and only needs `alloc`; file formats and the
//! command-line front-end live in `ice-cli`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod coarsen;
pub mod error;
pub mod flatten;
pub mod flip;
pub mod geometry;
pub mod mapping;
pub mod math;
pub mod mesh;
pub mod metric;
pub mod removal;
pub mod shapes;
pub mod solvers;
pub mod sparse;
pub mod tangent;

pub use coarsen::{CoarsenConfig, Coarsener, CoarsenSummary};
pub use error::{Error, Result};
pub use geometry::Surface;
pub use mapping::{Prolongation, RemovalRecord, TrackedPoint, Tracker};
pub use mesh::{DeltaComplex, Face, Halfedge, Vertex};
pub use tangent::TangentVec;
