//! Downstream algorithms on intrinsic surfaces: Laplacians, Poisson and
//! multigrid solves, graph distances and geodesic tracing.

mod geodesic;
mod laplacian;
mod linear;
mod multigrid;
mod poisson;
mod trace;

pub use geodesic::{all_pairs_dijkstra, dijkstra, LowRankDistance};
pub use laplacian::cotan_laplacian;
pub use linear::{conjugate_gradient, Cholesky, CgOutcome};
pub use multigrid::{Multigrid, MultigridOutcome};
pub use poisson::{poisson_coarse, solve_poisson, Gauge};
pub use trace::{trace_geodesic, TraceOutcome};
