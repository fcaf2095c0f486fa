//! Regions, voxel grids, sampled functions and projection measures.

mod function;
pub mod io;
mod project;
mod region;
mod spec;
mod voxel;

pub use function::{lp_norm, GridFunction};
pub use project::{
    image_bounds, measure_bracket, monte_carlo_projection, project_voxels, target_spec, MeasureBracket,
    MonteCarloEstimate, TargetGrid,
};
pub use region::{Membership, Region};
pub use spec::GridSpec;
pub use voxel::{raster_spec, rasterize, rasterize_on, volume, RasterMode, VoxelGrid, RASTER_PAD};
