//! Exact difference calculus for functors between finite presheaf categories.

pub mod analytic;
pub mod chain;
pub mod coend;
pub mod error;
pub mod fincat;
pub mod funcalc;
pub mod json;
pub mod natenum;
pub mod newton;
pub mod presheaf;
pub mod prof;
pub mod random;
pub mod suites;

pub use error::{Error, Result};
