//! Point tracking through coarsening and the prolongation operators built
//! from it.

mod prolong;
mod track;

pub use prolong::{compact_index, Prolongation, VectorProlongation};
pub use track::{LocalFace, RemovalRecord, TrackOp, TrackedPoint, Tracker, TrackingStats};
