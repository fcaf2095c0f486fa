use super::function::{horizontal_gradient, SampledFunction};
use crate::error::{Error, Result};
use crate::grid::{
    project_voxels, raster_spec, rasterize_on, target_spec, volume, GridFunction, GridSpec, RasterMode, Region,
    TargetGrid,
};
use crate::heis::{HDim, PlaneProjection};
use crate::numeric::{chunked_sum, rel_diff, unflatten};
use crate::report::RatioReport;
use rayon::prelude::*;
use serde::Serialize;

/// Default widest mollifier half-width, in cells.
pub const PERIMETER_LADDER: f64 = 8.0;

/// Narrowest rung; a one-cell bump is the identity.
const MIN_WIDTH: f64 = 2.0;

const LADDER_TOL: f64 = 0.03;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerimeterReport {
    pub value: f64,
    /// Mollifier half-width (cells) at which `value` was taken.
    pub width: f64,
    /// `(width, perimeter)` for every rung, widest first.
    pub ladder: Vec<(f64, f64)>,
    pub resolution: usize,
}

fn check_region(region: &Region, n: HDim) -> Result<()> {
    if region.dim() != n.ambient() {
        return Err(Error::DimensionMismatch { expected: n.ambient(), got: region.dim() });
    }
    Ok(())
}

fn subsamples(dim: usize) -> usize {
    if dim <= 3 {
        2
    } else {
        1
    }
}

/// Fraction of each cell's subsample points lying in the region.
fn occupancy(region: &Region, spec: &GridSpec) -> Vec<f64> {
    let d = spec.dim();
    let s = subsamples(d);
    let per_cell = s.pow(d as u32);
    let sub_shape = vec![s; d];
    (0..spec.len())
        .into_par_iter()
        .map(|flat| {
            let mut idx = [0usize; 16];
            let mut sub = [0usize; 16];
            let mut p = [0.0f64; 16];
            unflatten(flat, &spec.shape, &mut idx[..d]);
            let mut hits = 0usize;
            for m in 0..per_cell {
                unflatten(m, &sub_shape, &mut sub[..d]);
                for a in 0..d {
                    p[a] = spec.origin[a] + (idx[a] as f64 + (sub[a] as f64 + 0.5) / s as f64) * spec.spacing[a];
                }
                hits += region.contains(&p[..d]) as usize;
            }
            hits as f64 / per_cell as f64
        })
        .collect()
}

fn bump_kernel(width: f64) -> Vec<f64> {
    let r = width.ceil() as isize;
    let mut k: Vec<f64> = (-r..=r)
        .map(|i| {
            let z = i as f64 / width;
            if z.abs() < 1.0 {
                (1.0 - z * z).powi(2)
            } else {
                0.0
            }
        })
        .collect();
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

fn convolve_axis(v: &[f64], shape: &[usize], axis: usize, kernel: &[f64]) -> Vec<f64> {
    let stride: usize = shape[axis + 1..].iter().product();
    let len = shape[axis];
    let r = (kernel.len() / 2) as isize;
    let mut out = vec![0.0; v.len()];
    out.par_chunks_mut(stride * len).enumerate().for_each(|(blk, chunk)| {
        let base = blk * stride * len;
        for i in 0..len as isize {
            for s in 0..stride {
                let mut acc = 0.0;
                for (o, w) in kernel.iter().enumerate() {
                    let src = i + o as isize - r;
                    if src >= 0 && src < len as isize {
                        acc += w * v[base + src as usize * stride + s];
                    }
                }
                chunk[i as usize * stride + s] = acc;
            }
        }
    });
    out
}

fn total_variation(occ: &[f64], spec: &GridSpec, n: HDim, width: f64) -> Result<f64> {
    let kernel = bump_kernel(width);
    let mut v = occ.to_vec();
    for a in 0..spec.dim() {
        v = convolve_axis(&v, &spec.shape, a, &kernel);
    }
    let u = SampledFunction { grid: GridFunction::new(spec.clone(), v)?, support_margin: 1 };
    let grads = horizontal_gradient(&u, n)?;
    let cell = spec.cell_volume();
    Ok(chunked_sum(spec.len(), |i| grads.iter().map(|g| g.samples[i].powi(2)).sum::<f64>().sqrt()) * cell)
}

fn mollification_spec(region: &Region, resolution: usize, width: f64) -> Result<GridSpec> {
    if resolution < 2 {
        return Err(Error::InvalidParameter(format!("resolution must be >= 2, got {resolution}")));
    }
    let pad = width.ceil() as usize + 2;
    GridSpec::covering(region.lo(), region.hi(), &vec![resolution; region.dim()], pad)
}

/// Horizontal perimeter of `region` from a mollified indicator.
///
/// The mollifier half-width (in cells of the `resolution`-per-axis grid over
/// the bounding box) starts at `mollification_width` and halves down to two
/// cells. The value is taken at the narrowest width that agrees with the
/// previous rung within 3%.
pub fn perimeter_estimate(region: &Region, n: HDim, mollification_width: f64, resolution: usize) -> Result<PerimeterReport> {
    check_region(region, n)?;
    if !(mollification_width >= 2.0 * MIN_WIDTH) {
        return Err(Error::InvalidParameter(format!(
            "mollification width must be >= {} cells, got {mollification_width}",
            2.0 * MIN_WIDTH
        )));
    }
    let spec = mollification_spec(region, resolution, mollification_width)?;
    let occ = occupancy(region, &spec);
    let mut ladder = Vec::new();
    let mut w = mollification_width;
    while w >= MIN_WIDTH {
        ladder.push((w, total_variation(&occ, &spec, n, w)?));
        w /= 2.0;
    }
    if ladder.iter().all(|&(_, p)| p == 0.0) {
        return Ok(PerimeterReport { value: 0.0, width: ladder[ladder.len() - 1].0, ladder, resolution });
    }
    let agreeing = (1..ladder.len()).rev().find(|&i| rel_diff(ladder[i].1, ladder[i - 1].1) <= LADDER_TOL);
    match agreeing {
        Some(i) => Ok(PerimeterReport { value: ladder[i].1, width: ladder[i].0, ladder, resolution }),
        None => Err(Error::NotStabilized { doublings: ladder.len(), last: ladder[ladder.len() - 1].1 }),
    }
}

/// `|E|^{(2n+1)/(2n+2)} / P_H(E)`.
///
/// `value` uses the subsampled occupancy volume; the bracket uses the
/// center and cover rasterizations.
pub fn isoperimetric_ratio(region: &Region, n: HDim, resolution: usize) -> Result<RatioReport> {
    check_region(region, n)?;
    let per = perimeter_estimate(region, n, PERIMETER_LADDER, resolution)?;
    let spec = mollification_spec(region, resolution, PERIMETER_LADDER)?;
    let occ = occupancy(region, &spec);
    let vol = occ.iter().sum::<f64>() * spec.cell_volume();
    if vol == 0.0 || per.value == 0.0 {
        return Err(Error::ZeroNorm("region has zero volume".into()));
    }
    let rs = raster_spec(region, resolution)?;
    let inner = volume(&rasterize_on(region, &rs, RasterMode::Center)?);
    let outer = volume(&rasterize_on(region, &rs, RasterMode::Cover)?);
    let e = (2 * n.n() + 1) as f64 / (2 * n.n() + 2) as f64;
    let f = |v: f64| v.powf(e) / per.value;
    Ok(RatioReport::new("isoperimetric", n.n(), region.label(), resolution).with_values(f(vol), f(inner), f(outer)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ContainmentEntry {
    pub j: usize,
    /// Occupied cells of the projected set.
    pub occupied: usize,
    /// Of those, cells farther than one cell from the projected boundary.
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContainmentReport {
    pub resolution: usize,
    pub entries: Vec<ContainmentEntry>,
    pub violations: usize,
}

/// Checks `π_j(E) ⊆ π_j(∂E)` for every `j` at voxel scale.
///
/// `∂E` is the cover occupancy minus the one-cell erosion of the center
/// occupancy. `E` (center mode) and `∂E` (cover mode) are projected onto a
/// common target grid.
pub fn boundary_containment_check(region: &Region, n: HDim, resolution: usize) -> Result<ContainmentReport> {
    check_region(region, n)?;
    let spec = raster_spec(region, resolution)?;
    let inner = rasterize_on(region, &spec, RasterMode::Center)?;
    let outer = rasterize_on(region, &spec, RasterMode::Cover)?;
    let boundary = outer.minus(&inner.eroded(1))?;
    let mut entries = Vec::new();
    for j in 1..=n.horizontal() {
        let proj = PlaneProjection::vertical(n, j)?;
        let target = TargetGrid::Spec(target_spec(&spec, &proj, &TargetGrid::Cells(resolution))?);
        let pe = project_voxels(&inner, &proj, &target, RasterMode::Center)?;
        let pb = project_voxels(&boundary, &proj, &target, RasterMode::Cover)?.dilated(1);
        entries.push(ContainmentEntry { j, occupied: pe.count(), violations: pe.minus(&pb)?.count() });
    }
    let violations = entries.iter().map(|e| e.violations).sum();
    Ok(ContainmentReport { resolution, entries, violations })
}
