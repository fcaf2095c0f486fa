//! Loomis–Whitney ratios for sets and functions, exponent arithmetic and
//! the experiments built on them.

mod exponents;
mod ratio;
mod search;
mod strong;
mod sweep;

pub use exponents::{exponent_table, to_f64, ExponentTable, IdentityCheck};
pub use ratio::{lw_measurements, lw_ratio, lw_ratio_sampled, LwMeasurements, DENSE_MAX_N};
pub use strong::{strong_ratio, vertex_ratio};
pub use sweep::{
    euclidean_counterexample, h1_box_ratio, invariance_suite, invariance_with, lw_exponent, region_suite,
    sharpness_sweep, suite_ratios, EuclideanReport, InvarianceEntry, InvarianceReport, SharpnessTable, SuiteReport,
};
pub use search::{extremizer_search, SearchConfig, SearchFamily, SearchResult, TraceEntry};
