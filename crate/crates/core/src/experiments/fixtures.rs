//! Named inputs shared by the experiment runners and the acceptance suite.

use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridSpec, Region};
use crate::heis::{koranyi_norm_coords, HDim, HPoint};
use crate::lw::region_suite;
use crate::sobolev::SampledFunction;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Planar test inputs: `disk`, `gaussian` or `square`, with `cells` cells per axis.
pub fn planar_input(name: &str, cells: usize) -> Result<GridFunction> {
    let (ext, f): (f64, fn(f64, f64) -> f64) = match name {
        "disk" => (1.0, |x, y| indicator(x * x + y * y <= 1.0)),
        "gaussian" => (2.5, |x, y| (-std::f64::consts::PI * (x * x + y * y)).exp()),
        "square" => (1.0, |x, y| indicator(x.abs() < 1.0 && y.abs() < 1.0)),
        _ => return Err(Error::InvalidParameter(format!("unknown planar input {name:?}"))),
    };
    let spec = GridSpec::covering(&[-ext, -ext], &[ext, ext], &[cells, cells], 2)?;
    Ok(GridFunction::from_fn(spec, |p| f(p[0], p[1])))
}

/// Indicator of `[lo, hi]` sampled at `cells` cells per axis over that box.
pub fn planar_box(lo: [f64; 2], hi: [f64; 2], cells: usize) -> Result<GridFunction> {
    let spec = GridSpec::covering(&lo, &hi, &[cells, cells], 2)?;
    Ok(GridFunction::from_fn(spec, move |p| {
        indicator(p[0] >= lo[0] && p[0] < hi[0] && p[1] >= lo[1] && p[1] < hi[1])
    }))
}

/// `2n` functions on `ℝ^{2n}` for the strong and vertex ratios: box
/// indicators (`boxes`) or standard Gaussians (`gaussians`).
pub fn lw_inputs(n: HDim, kind: &str, cells: usize) -> Result<Vec<GridFunction>> {
    let d = n.horizontal();
    let (ext, f): (f64, fn(&[f64]) -> f64) = match kind {
        "boxes" => (1.0, |p| indicator(p.iter().all(|v| v.abs() < 1.0))),
        "gaussians" => (2.5, |p| (-std::f64::consts::PI * p.iter().map(|v| v * v).sum::<f64>()).exp()),
        _ => return Err(Error::InvalidParameter(format!("unknown input kind {kind:?}"))),
    };
    let spec = GridSpec::covering(&vec![-ext; d], &vec![ext; d], &vec![cells; d], 2)?;
    let g = GridFunction::from_fn(spec, f);
    Ok(vec![g; d])
}

/// `amplitude · (1 − ‖δ_{1/r}(c⁻¹ p)‖⁴)³`, a smooth bump supported on the
/// Korányi ball of radius `r` around `c`, sampled with two empty layers.
pub fn gauge_bump(n: HDim, center: &HPoint, r: f64, amplitude: f64, cells: usize) -> Result<SampledFunction> {
    let ball = Region::koranyi_ball(n, center.clone(), r)?;
    let h = n.horizontal();
    let inv = center.inverse();
    SampledFunction::from_fn(ball.lo(), ball.hi(), cells, 2, move |p| {
        let mut x = [0.0f64; 16];
        for i in 0..h {
            x[i] = (inv.x[i] + p[i]) / r;
        }
        let t = (inv.t + p[h] + 0.5 * crate::heis::symplectic(&inv.x, &p[..h])) / (r * r);
        let nn = koranyi_norm_coords(&x[..h], t);
        if nn < 1.0 {
            amplitude * (1.0 - nn.powi(4)).powi(3)
        } else {
            0.0
        }
    })
}

/// A region by name: `heis-box`, `koranyi-ball`, `euclidean-ball` (all with
/// radius `r`) or a label from the built-in `ℍ¹` suite.
pub fn named_region(n: HDim, name: &str, r: f64) -> Result<Region> {
    match name {
        "heis-box" => Region::heis_box(n, r),
        "koranyi-ball" => Region::koranyi_ball(n, HPoint::identity(n), r),
        "euclidean-ball" => Region::euclidean_ball(vec![0.0; n.ambient()], r),
        other if n.n() == 1 => region_suite()?
            .into_iter()
            .find(|reg| reg.label() == other)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown region {other:?}"))),
        other => Err(Error::InvalidParameter(format!("unknown region {other:?} for n = {}", n.n()))),
    }
}

/// `count` seeded left translations with every coordinate in `[−1, 1]`.
pub fn random_translations(n: HDim, count: usize, seed: u64) -> Result<Vec<HPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let x = (0..n.horizontal()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            HPoint::new(x, rng.gen_range(-1.0..1.0))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_peaks_at_center() {
        let n = HDim::new(1).unwrap();
        let c = HPoint::new(vec![0.5, -0.25], 0.3).unwrap();
        let u = gauge_bump(n, &c, 1.0, 2.0, 17).unwrap();
        let at = u.grid.spec.locate(&c.coords()).unwrap();
        assert!((u.grid.samples[at] - 2.0).abs() < 0.05, "{}", u.grid.samples[at]);
        assert!(u.grid.max_abs() <= 2.0);
    }

    #[test]
    fn named_regions_resolve() {
        let n = HDim::new(1).unwrap();
        for name in ["heis-box", "koranyi-ball", "euclidean-ball", "two_boxes"] {
            assert!(named_region(n, name, 1.0).is_ok(), "{name}");
        }
        assert!(named_region(n, "nope", 1.0).is_err());
        assert!(named_region(HDim::new(2).unwrap(), "two_boxes", 1.0).is_err());
    }

    #[test]
    fn translations_are_seeded_and_bounded() {
        let n = HDim::new(1).unwrap();
        let a = random_translations(n, 5, 3).unwrap();
        assert_eq!(a, random_translations(n, 5, 3).unwrap());
        assert!(a.iter().all(|p| p.x.iter().chain([&p.t]).all(|v| v.abs() <= 1.0)));
    }
}
