//! Horizontal gradients, the Sobolev inequality, dyadic level sets and
//! horizontal perimeter.

mod function;
mod levels;
mod perimeter;
mod ratio;

pub use function::{horizontal_gradient, SampledFunction};
pub use levels::{
    level_decomposition, levelset_lemma_check, levelset_table, BandCells, LevelSetDecomposition, LevelsetCheck,
};
pub use perimeter::{
    boundary_containment_check, isoperimetric_ratio, perimeter_estimate, ContainmentReport, PerimeterReport,
    PERIMETER_LADDER,
};
pub use ratio::sobolev_ratio;
