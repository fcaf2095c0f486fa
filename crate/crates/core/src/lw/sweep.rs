use super::exponents::{exponent_table, to_f64};
use super::ratio::{lw_measurements, lw_ratio};
use crate::error::{Error, Result};
use crate::grid::{project_voxels, rasterize_on, volume, GridSpec, RasterMode, Region, TargetGrid};
use crate::heis::{HDim, HPoint, PlaneProjection};
use crate::numeric::rel_diff;
use crate::report::RatioReport;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct SharpnessTable {
    pub rows: Vec<(f64, RatioReport)>,
    /// `max / min − 1` over the row values.
    pub spread: f64,
}

/// `lw_ratio` of `[−r, r]^{2n} × [−r², r²]` for each `r`.
pub fn sharpness_sweep(n: HDim, r_values: &[f64], resolution: usize) -> Result<SharpnessTable> {
    if r_values.is_empty() || r_values.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::InvalidParameter("r values must be positive and nonempty".into()));
    }
    let rows = r_values
        .iter()
        .map(|&r| Ok((r, lw_ratio(&Region::heis_box(n, r)?, n, resolution)?)))
        .collect::<Result<Vec<_>>>()?;
    let max = rows.iter().map(|r| r.1.value).fold(f64::NEG_INFINITY, f64::max);
    let min = rows.iter().map(|r| r.1.value).fold(f64::INFINITY, f64::min);
    Ok(SharpnessTable { rows, spread: max / min - 1.0 })
}

/// Closed-form box ratio `8 r⁴ / (5 r³)^{4/3} = 8 / 25^{2/3}` in `ℍ¹`.
pub fn h1_box_ratio() -> f64 {
    8.0 / 25f64.powf(2.0 / 3.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct EuclideanReport {
    pub delta: f64,
    pub r: f64,
    /// Largest admissible `λ` forced by the thin slab `[0,1]² × [0,δ]`.
    pub lambda_max: f64,
    /// Smallest admissible `λ` forced by the cube `[0,R]³`.
    pub lambda_min: f64,
    pub slab_volume: f64,
    pub slab_projections: [f64; 2],
    pub cube_volume: f64,
    pub cube_projections: [f64; 2],
    /// `|π_j([0,R]³)| / R³` for the Heisenberg projections, center and cover mode.
    pub heisenberg_projections_over_r3: Vec<(f64, f64)>,
    /// Exact `|π_j([0,R]³)| / R³ = 1/R + 1/4`.
    pub heisenberg_exact_over_r3: f64,
}

/// Measure a box and its two Euclidean coordinate projections on a grid
/// whose cells tile it exactly.
fn aligned_box_measures(hi: [f64; 3], cells: usize) -> Result<(f64, [f64; 2])> {
    let n = HDim::new(1)?;
    let region = Region::axis_box(vec![0.0; 3], hi.to_vec())?;
    let spec = GridSpec::covering(&[0.0; 3], &hi, &[cells; 3], 2)?;
    let grid = rasterize_on(&region, &spec, RasterMode::Center)?;
    let mut proj = [0.0; 2];
    for (slot, j) in proj.iter_mut().zip([1, 2]) {
        let kept: Vec<usize> = (0..3).filter(|&a| a + 1 != j).collect();
        let lo: Vec<f64> = kept.iter().map(|_| 0.0).collect();
        let top: Vec<f64> = kept.iter().map(|&a| hi[a]).collect();
        let target = TargetGrid::Spec(GridSpec::covering(&lo, &top, &[cells; 2], 2)?);
        *slot = volume(&project_voxels(&grid, &PlaneProjection::coordinate(n, j)?, &target, RasterMode::Center)?);
    }
    Ok((volume(&grid), proj))
}

/// The Euclidean obstruction: no single `λ` works for both thin slabs and large cubes.
pub fn euclidean_counterexample(delta: f64, r: f64) -> Result<EuclideanReport> {
    if !(delta > 0.0 && delta < 1.0 && r > 1.0) {
        return Err(Error::InvalidParameter(format!("need 0 < delta < 1 < R, got delta={delta}, R={r}")));
    }
    let cells = 16;
    let (slab_volume, slab_projections) = aligned_box_measures([1.0, 1.0, delta], cells)?;
    let (cube_volume, cube_projections) = aligned_box_measures([r, r, r], cells)?;
    let lambda_max = slab_volume.ln() / (slab_projections[0] * slab_projections[1]).ln();
    let lambda_min = cube_volume.ln() / (cube_projections[0] * cube_projections[1]).ln();
    let n = HDim::new(1)?;
    let cube = Region::axis_box(vec![0.0; 3], vec![r; 3])?;
    let m = lw_measurements(&cube, n, 64)?;
    let r3 = r * r * r;
    Ok(EuclideanReport {
        delta,
        r,
        lambda_max,
        lambda_min,
        slab_volume,
        slab_projections,
        cube_volume,
        cube_projections,
        heisenberg_projections_over_r3: m.projections.iter().map(|p| (p.0 / r3, p.1 / r3)).collect(),
        heisenberg_exact_over_r3: 1.0 / r + 0.25,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceEntry {
    pub transform: String,
    pub value: f64,
    pub relative_change: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub base: f64,
    pub tolerance: f64,
    pub entries: Vec<InvarianceEntry>,
    pub pass: bool,
}

/// Relative change of a region statistic under left translations and dilations.
pub fn invariance_with(
    region: &Region,
    translations: &[HPoint],
    dilations: &[f64],
    tolerance: f64,
    stat: impl Fn(&Region) -> Result<f64>,
) -> Result<InvarianceReport> {
    let base = stat(region)?;
    let mut entries = Vec::new();
    let mut push = |transform: String, value: f64| {
        let relative_change = rel_diff(value, base);
        entries.push(InvarianceEntry { transform, value, relative_change, pass: relative_change <= tolerance });
    };
    for p in translations {
        push(format!("translate(x={:?},t={})", p.x, p.t), stat(&region.left_translate(p)?)?);
    }
    for &r in dilations {
        push(format!("dilate({r})"), stat(&region.dilate(r)?)?);
    }
    let pass = entries.iter().all(|e| e.pass);
    Ok(InvarianceReport { base, tolerance, entries, pass })
}

/// [`invariance_with`] for `lw_ratio`.
pub fn invariance_suite(
    region: &Region,
    n: HDim,
    translations: &[HPoint],
    dilations: &[f64],
    resolution: usize,
    tolerance: f64,
) -> Result<InvarianceReport> {
    invariance_with(region, translations, dilations, tolerance, |r| Ok(lw_ratio(r, n, resolution)?.value))
}

/// Built-in sets in `ℍ¹`: boxes, Korányi balls, unions and sheared translates.
pub fn region_suite() -> Result<Vec<Region>> {
    let n = HDim::new(1)?;
    let heis_box = Region::heis_box(n, 1.0)?;
    let flat = Region::centered_box(&[1.0, 0.5, 0.3])?.with_label("flat_box");
    let ball = Region::koranyi_ball(n, HPoint::identity(n), 1.0)?.with_label("koranyi_ball");
    let off_ball = Region::koranyi_ball(n, HPoint::new(vec![0.4, -0.3], 0.2)?, 0.8)?.with_label("koranyi_ball_offset");
    let pair = Region::union(
        &Region::axis_box(vec![-1.0, -1.0, -1.0], vec![0.0, 0.0, 0.0])?,
        &Region::axis_box(vec![0.2, 0.2, 0.0], vec![1.0, 1.0, 0.6])?,
    )?
    .with_label("two_boxes");
    let sheared = heis_box.left_translate(&HPoint::new(vec![0.7, -0.4], 0.3)?)?.with_label("sheared_box");
    Ok(vec![heis_box, flat, ball, off_ball, pair, sheared])
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub resolution: usize,
    pub rows: Vec<RatioReport>,
    /// Index of the row with the largest conservative value.
    pub argmax: usize,
    pub max_conservative: f64,
}

/// `lw_ratio` over a set of regions; the largest conservative value is the
/// empirical constant at this resolution.
pub fn suite_ratios(regions: &[Region], n: HDim, resolution: usize) -> Result<SuiteReport> {
    if regions.is_empty() {
        return Err(Error::InvalidParameter("empty region suite".into()));
    }
    let rows = regions.iter().map(|r| lw_ratio(r, n, resolution)).collect::<Result<Vec<_>>>()?;
    let (argmax, max_conservative) = rows
        .iter()
        .enumerate()
        .map(|(i, r)| (i, r.conservative))
        .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    Ok(SuiteReport { resolution, rows, argmax, max_conservative })
}

/// Exponent of the projection measures, as `f64`.
pub fn lw_exponent(n: HDim) -> Result<f64> {
    Ok(to_f64(exponent_table(n)?.lw_exponent))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_lambdas_are_exact() {
        let rep = euclidean_counterexample(0.01, 10.0).unwrap();
        assert!((rep.lambda_max - 0.5).abs() < 1e-12, "{rep:?}");
        assert!((rep.lambda_min - 0.75).abs() < 1e-12, "{rep:?}");
        for (c, o) in &rep.heisenberg_projections_over_r3 {
            assert!(*c <= rep.heisenberg_exact_over_r3 * 1.01 && *o >= rep.heisenberg_exact_over_r3, "{rep:?}");
        }
    }

    #[test]
    fn euclidean_rejects_bad_parameters() {
        assert!(euclidean_counterexample(1.5, 10.0).is_err());
        assert!(euclidean_counterexample(0.1, 0.5).is_err());
    }

    #[test]
    fn sweep_is_flat_in_r() {
        let t = sharpness_sweep(HDim::new(1).unwrap(), &[0.5, 1.0, 2.0], 48).unwrap();
        assert!(t.spread < 1e-9, "{t:?}");
    }

    #[test]
    fn identity_transforms_change_nothing() {
        let n = HDim::new(1).unwrap();
        let b = Region::heis_box(n, 1.0).unwrap();
        let rep = invariance_suite(&b, n, &[HPoint::identity(n)], &[1.0], 32, 0.0).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.entries.iter().all(|e| e.relative_change == 0.0));
    }

    #[test]
    fn suite_is_finite() {
        let n = HDim::new(1).unwrap();
        let s = suite_ratios(&region_suite().unwrap(), n, 32).unwrap();
        assert_eq!(s.rows.len(), 6);
        assert!(s.max_conservative.is_finite() && s.max_conservative > 0.0);
    }
}
