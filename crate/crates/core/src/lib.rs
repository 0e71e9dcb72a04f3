//! Exact bottleneck 2-connected Steiner networks in L_p planes.
//!
//! Given terminals and a budget of `k` Steiner points, [`solve`] returns a
//! 2-connected network spanning the terminals whose longest edge is as
//! short as possible.

mod convex;
pub mod builder;
pub mod driver;
pub mod format;
pub mod geometry;
pub mod graph;
pub mod linked;
pub mod oracle;
pub mod placement;
pub mod repair;
pub mod threshold;

pub use driver::{solve, solve_k0, solve_with, sweep, Instance, LevelResult, Solution, SolveError, SolveOptions};
pub use geometry::{Metric, Point};
pub use graph::{is_two_connected, Network};
pub use oracle::{naive_solve, OracleConfig};
