use crate::mesh::{Face, Halfedge, Vertex};

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("face {face} references vertex {vertex}, but only {count} vertices were given")]
    VertexOutOfRange { face: usize, vertex: usize, count: usize },
    #[error("face {0} repeats a vertex")]
    DegenerateFace(usize),
    #[error("edge ({0}, {1}) is shared by more than two faces or appears twice with the same orientation")]
    NonManifoldEdge(usize, usize),
    #[error("vertex {0} is non-manifold (its faces do not form a single fan)")]
    NonManifoldVertex(usize),
    #[error("edge ({0}, {1}) has zero length")]
    ZeroLengthEdge(usize, usize),
    #[error("face {0} violates the triangle inequality")]
    TriangleInequality(usize),
    #[error("face {0:?} is degenerate")]
    DegenerateLayout(Face),
    #[error("edge {0:?} cannot be flipped")]
    Unflippable(Halfedge),
    #[error("edge {0:?} is a boundary edge")]
    BoundaryEdge(Halfedge),
    #[error("vertex {0:?} is not flat")]
    NotFlat(Vertex),
    #[error("vertex {vertex:?} has degree {degree}, expected {expected}")]
    WrongDegree { vertex: Vertex, degree: usize, expected: usize },
    #[error("vertex {0:?} cannot be removed")]
    Blocked(Vertex),
    #[error("vertex {0:?} was removed")]
    DeadVertex(Vertex),
    #[error("mass for vertex {0} is negative or not finite")]
    InvalidMass(usize),
    #[error("vertex {0} is out of range")]
    VertexIndex(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("linear system is singular: pin a vertex, add Dirichlet data or use a mean-zero gauge")]
    Singular,
    #[error("solver did not converge ({0} iterations)")]
    NoConvergence(usize),
    #[error("multigrid diverged after {0} cycles")]
    Diverged(usize),
    #[error("{0}")]
    Config(&'static str),
}
