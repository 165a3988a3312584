//! Estimation of the frontier bounding the support of a homogeneous Poisson
//! point process.
//!
//! Points are observed inside `S = {(x, y) : 0 <= x <= 1, 0 <= y <= f(x)}`.
//! The unit interval is cut into `k_n = d_n (h_n + 1)` cells; the highest
//! point of each cell is an extreme value, and averaging those maxima over
//! the `h_n + 1` dyadic blocks gives a Haar series estimate of `f`. The
//! lowest point of each cell feeds a data-driven correction of the negative
//! bias of order `k_n / (n c)`.
//!
//! Module map:
//!
//! - [`haar`]: dyadic indexing, the Haar basis, the Dirichlet kernel and
//!   truncated expansions of a frontier.
//! - [`step`]: piecewise constant functions with exact L² arithmetic.
//! - [`frontier`]: frontier functions with their bounds and integrals.
//! - [`process`]: simulation of the point process and per-cell extremes.
//! - [`estimators`]: the extreme value estimators and their corrections.
//! - [`oracles`]: closed-form laws used as ground truth.
//! - [`harness`]: Monte Carlo experiments and their reports.

pub mod error;
pub mod estimators;
pub mod frontier;
pub mod haar;
pub mod harness;
pub mod oracles;
pub mod partition;
pub mod process;
pub mod quadrature;
pub mod step;

pub use error::{Error, Result};
pub use estimators::EstimateBundle;
pub use frontier::FrontierSpec;
pub use partition::PartitionConfig;
pub use process::{CellExtremes, CellStats, PointSample};
pub use step::StepFunction;
