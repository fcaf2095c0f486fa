use super::exponents::{exponent_table, to_f64};
use crate::error::{Error, Result};
use crate::grid::{monte_carlo_projection, project_voxels, rasterize, volume, RasterMode, Region, TargetGrid, VoxelGrid};
use crate::heis::{HDim, PlaneProjection};
use crate::report::RatioReport;
use serde::Serialize;

/// Largest `n` measured on dense voxel grids; beyond it `lw_ratio` samples.
pub const DENSE_MAX_N: usize = 2;

/// Measured sides of the Loomis–Whitney inequality for a set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LwMeasurements {
    /// Center-mode and cover-mode `|K|`.
    pub volume: (f64, f64),
    /// Per `j`: center-mode and cover-mode `|π_j(K)|`.
    pub projections: Vec<(f64, f64)>,
}

fn check_region(region: &Region, n: HDim) -> Result<()> {
    if region.dim() != n.ambient() {
        return Err(Error::DimensionMismatch { expected: n.ambient(), got: region.dim() });
    }
    Ok(())
}

/// Voxel measurements of `|K|` and every `|π_j(K)|` at `resolution` cells per axis.
pub fn lw_measurements(region: &Region, n: HDim, resolution: usize) -> Result<LwMeasurements> {
    check_region(region, n)?;
    let inner = rasterize(region, resolution, RasterMode::Center)?;
    let outer = rasterize(region, resolution, RasterMode::Cover)?;
    let target = TargetGrid::Cells(resolution);
    let project = |g: &VoxelGrid, j: usize, mode: RasterMode| -> Result<f64> {
        Ok(volume(&project_voxels(g, &PlaneProjection::vertical(n, j)?, &target, mode)?))
    };
    let projections = (1..=n.horizontal())
        .map(|j| Ok((project(&inner, j, RasterMode::Center)?, project(&outer, j, RasterMode::Cover)?)))
        .collect::<Result<_>>()?;
    Ok(LwMeasurements { volume: (volume(&inner), volume(&outer)), projections })
}

/// `|K| / ∏_j |π_j(K)|^{(n+1)/(n(2n+1))}`.
///
/// `value` uses center-mode measurements on both sides; `conservative`
/// pairs the inner volume with outer projections and `optimistic` the
/// reverse. For `n > DENSE_MAX_N` the measures are sampled instead.
pub fn lw_ratio(region: &Region, n: HDim, resolution: usize) -> Result<RatioReport> {
    check_region(region, n)?;
    if n.n() > DENSE_MAX_N {
        return lw_ratio_sampled(region, n, 1_000_000, resolution, 0);
    }
    let m = lw_measurements(region, n, resolution)?;
    ratio_from_measurements(region.label(), n, resolution, &m)
}

pub(crate) fn ratio_from_measurements(label: &str, n: HDim, resolution: usize, m: &LwMeasurements) -> Result<RatioReport> {
    let e = to_f64(exponent_table(n)?.lw_exponent);
    let report = RatioReport::new("lw-ratio", n.n(), format!("region={label}"), resolution);
    let (vin, vout) = m.volume;
    if vout == 0.0 {
        return Ok(RatioReport { empty: true, ..report });
    }
    let inner: f64 = m.projections.iter().map(|p| p.0.powf(e)).product();
    let outer: f64 = m.projections.iter().map(|p| p.1.powf(e)).product();
    if outer == 0.0 {
        if vin > 0.0 {
            return Err(Error::Discretization(format!(
                "{label}: inner volume {vin} > 0 but an outer projection measure vanishes"
            )));
        }
        return Ok(RatioReport { inconclusive: true, ..report });
    }
    if inner == 0.0 {
        return Ok(RatioReport { inconclusive: true, ..report }.with_values(vin / outer, vin / outer, f64::INFINITY));
    }
    Ok(report.with_values(vin / inner, vin / outer, vout / inner))
}

/// Monte Carlo variant of [`lw_ratio`] for higher `n`.
///
/// The bracket spreads the volume estimate by two binomial standard errors.
pub fn lw_ratio_sampled(region: &Region, n: HDim, samples: usize, target_cells: usize, seed: u64) -> Result<RatioReport> {
    check_region(region, n)?;
    let e = to_f64(exponent_table(n)?.lw_exponent);
    let mut volume = 0.0;
    let mut hits = 0;
    let mut denom = 1.0;
    for j in 1..=n.horizontal() {
        let est = monte_carlo_projection(region, &PlaneProjection::vertical(n, j)?, samples, target_cells, seed)?;
        volume = est.volume;
        hits = est.hits;
        denom *= est.projection.powf(e);
    }
    let report = RatioReport::new("lw-ratio", n.n(), format!("region={},sampler=mc", region.label()), target_cells).with_seed(seed);
    if hits == 0 {
        return Ok(RatioReport { empty: true, ..report });
    }
    let frac = hits as f64 / samples as f64;
    let se = 2.0 * (frac * (1.0 - frac) / samples as f64).sqrt() / frac;
    let v = volume / denom;
    Ok(report.with_values(v, v * (1.0 - se), v * (1.0 + se)))
}
