//! Numerical verification of Loomis–Whitney-type inequalities in the
//! Heisenberg groups ℍⁿ.

pub mod error;
pub mod experiments;
pub mod grid;
pub mod heis;
pub mod lw;
pub mod numeric;
pub mod planar;
pub mod quadrature;
pub mod report;
pub mod sobolev;

pub use error::{Error, Result};
pub use report::RatioReport;
