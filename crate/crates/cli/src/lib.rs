//! File formats and the `simplify` pipeline behind the `ice` binary.

pub mod app;
pub mod field;
pub mod obj;
pub mod output;

pub use app::{simplify, Artifacts, Demo, SimplifyOptions};
