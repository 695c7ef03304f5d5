//! Numerical verification toolkit for bilinear fractional integrals, bilinear
//! pseudodifferential operators and their Leibniz-type estimates on periodic grids.

pub mod config;
pub mod cutoff;
pub mod error;
pub mod frac_ops;
pub mod grid;
pub mod harness;
pub mod lp;
pub mod report;
pub mod semigroup;
pub mod symbols;
pub mod testbed;
pub mod weights;

pub use error::{Error, Result};
pub use grid::{Ball, GridFunction, PeriodicGrid, Region};
pub use harness::run_experiment;
