//! Exact layout decomposition for LELE-end-cutting triple patterning.
//!
//! Features are assigned to one of two exposure masks while a third trim
//! mask carries end-cuts that split same-mask neighbours apart. The optimum
//! of the weighted conflict + stitch cost is found by a 0-1 integer program
//! solved with an in-crate branch-and-bound, after splitting the layout into
//! independent pieces.

pub mod config;
pub mod cost;
pub mod decomposer;
pub mod endcut;
pub mod fixtures;
pub mod geometry;
pub mod ilp_model;
pub mod index;
pub mod io;
pub mod layout_graph;
pub mod parallel;
pub mod solver;
pub mod svg;
pub mod synth;
pub mod verify;

pub use config::Config;
pub use cost::Cost;
