//! Solver and analysis toolkit for scalar delay equations whose delay depends
//! on the current state,
//!
//! ```text
//!     x'(t) = -a*tau*x(t) + tau*F(x(t - 1 + eps*x(t)))
//! ```
//!
//! in delay-rescaled time. Solutions are grown half a unit at a time: each
//! step is the fixed point of a Picard operator whose integrand is replaced by
//! its Chebyshev-Lagrange interpolant, so every half-unit piece of the orbit
//! is a degree q-1 polynomial in the Chebyshev basis.
//!
//! The crate also carries the downstream pipeline used to compare orbits of
//! coarse projections (small q) against high-resolution references: delay
//! embedding, false nearest neighbors, correlation dimension, peak-to-peak
//! maps, Vietoris-Rips persistent homology and Wasserstein distances between
//! persistence diagrams.

pub mod analysis;
pub mod chebyshev;
mod error;
pub mod solver;
pub mod systems;
pub mod tda;
pub mod trajectory;

pub use chebyshev::ChebSegment;
pub use error::Error;
pub use solver::{SolverConfig, StepReport, Stopping};
pub use systems::{SolverConstants, SystemSpec};
pub use tda::PersistenceDiagram;
pub use trajectory::{TimeSeries, Trajectory};

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
