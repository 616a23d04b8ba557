//! Reference oracles for the test suites. Everything here is an independent
//! implementation path: quadrature-based method of steps for the solver,
//! full boundary-matrix reduction for Rips persistence, and exhaustive
//! matching enumeration for Wasserstein distances.

pub mod brute_persistence;
pub mod exhaustive_wasserstein;
pub mod method_of_steps;
pub mod quadrature;
