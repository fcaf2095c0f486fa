//! Midpoint quadrature of `∫_{ℍⁿ} ∏_j f_j(π_j(p)) dp`.

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::heis::{partner, project_coords};
use crate::numeric::{chunked_sum_ranges, unflatten, KahanSum};
use serde::Serialize;

/// Sample counts: per horizontal axis, and along `t` for each horizontal point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductQuadrature {
    pub horizontal: usize,
    pub vertical: usize,
}

impl ProductQuadrature {
    pub fn uniform(cells: usize) -> Self {
        Self { horizontal: cells, vertical: cells }
    }
}

/// Position of horizontal axis `i` (0-based) among the coordinates of `f_j`
/// (1-based `j`), or `None` when `π_j` drops it.
fn axis_in_plane(i: usize, j: usize) -> Option<usize> {
    match (i + 1).cmp(&j) {
        std::cmp::Ordering::Equal => None,
        std::cmp::Ordering::Less => Some(i),
        std::cmp::Ordering::Greater => Some(i - 1),
    }
}

/// `∫ ∏_{j=1}^{2n} f_j(π_j(x, t)) d(x, t)`.
///
/// Each horizontal coordinate ranges over the intersection of the supports
/// it meets; for each `x` the `t`-integral runs over the exact set where every
/// vertical argument lies inside its function's support.
pub fn projection_product_integral(fs: &[GridFunction], n: usize, q: ProductQuadrature) -> Result<f64> {
    let h = 2 * n;
    if n == 0 || fs.len() != h {
        return Err(Error::DimensionMismatch { expected: h, got: fs.len() });
    }
    if q.horizontal == 0 || q.vertical == 0 {
        return Err(Error::InvalidParameter("quadrature sample counts must be positive".into()));
    }
    for f in fs {
        if f.dim() != h {
            return Err(Error::DimensionMismatch { expected: h, got: f.dim() });
        }
    }
    let mut supports = Vec::with_capacity(h);
    for f in fs {
        match f.support_bounds() {
            Some(b) => supports.push(b),
            None => return Ok(0.0),
        }
    }
    let mut lo = vec![f64::NEG_INFINITY; h];
    let mut hi = vec![f64::INFINITY; h];
    for i in 0..h {
        for (j0, (slo, shi)) in supports.iter().enumerate() {
            if let Some(a) = axis_in_plane(i, j0 + 1) {
                lo[i] = lo[i].max(slo[a]);
                hi[i] = hi[i].min(shi[a]);
            }
        }
        if !(hi[i] > lo[i]) {
            return Ok(0.0);
        }
    }
    let dx: Vec<f64> = (0..h).map(|i| (hi[i] - lo[i]) / q.horizontal as f64).collect();
    let cell: f64 = dx.iter().product();
    let shape = vec![q.horizontal; h];
    let total = q.horizontal.pow(h as u32);
    let m = q.vertical;
    let sum = chunked_sum_ranges(total, 64, |r| {
        let mut idx = vec![0usize; h];
        let mut p = vec![0.0; h + 1];
        let mut w = vec![0.0; h];
        let mut acc = KahanSum::new();
        for flat in r {
            unflatten(flat, &shape, &mut idx);
            for i in 0..h {
                p[i] = lo[i] + (idx[i] as f64 + 0.5) * dx[i];
            }
            let (mut tlo, mut thi) = (f64::NEG_INFINITY, f64::INFINITY);
            for j in 1..=h {
                let s = 0.5 * p[j - 1] * p[partner(j, n) - 1];
                let s = if j <= n { s } else { -s };
                let (slo, shi) = &supports[j - 1];
                tlo = tlo.max(slo[h - 1] - s);
                thi = thi.min(shi[h - 1] - s);
            }
            if !(thi > tlo) {
                continue;
            }
            let dt = (thi - tlo) / m as f64;
            let mut line = KahanSum::new();
            for k in 0..m {
                p[h] = tlo + (k as f64 + 0.5) * dt;
                let mut prod = 1.0;
                for (j0, f) in fs.iter().enumerate() {
                    project_coords(&p, n, j0 + 1, &mut w);
                    prod *= f.interpolate(&w);
                    if prod == 0.0 {
                        break;
                    }
                }
                line.add(prod);
            }
            acc.add(line.value() * dt);
        }
        acc.value()
    });
    Ok(sum * cell)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn square(lo: [f64; 2], hi: [f64; 2], cells: usize) -> GridFunction {
        let spec = GridSpec::covering(&lo, &hi, &[cells, cells], 2).unwrap();
        GridFunction::from_fn(spec, move |p| {
            if p[0] >= lo[0] && p[0] < hi[0] && p[1] >= lo[1] && p[1] < hi[1] {
                1.0
            } else {
                0.0
            }
        })
    }

    #[test]
    fn axis_positions() {
        assert_eq!(axis_in_plane(0, 1), None);
        assert_eq!(axis_in_plane(1, 1), Some(0));
        assert_eq!(axis_in_plane(0, 2), Some(0));
        assert_eq!(axis_in_plane(3, 2), Some(2));
    }

    #[test]
    fn wide_horizontal_square_gives_product_of_widths() {
        // f_1 = χ over (x_2, s) ∈ [0,1] × [−10, 10] and f_2 = χ over (x_1, s) ∈ [0,1] × [0,1]:
        // the first constraint never binds, so the integral is |[0,1]²| = 1.
        let f1 = square([0.0, -10.0], [1.0, 10.0], 256);
        let f2 = square([0.0, 0.0], [1.0, 1.0], 128);
        let v = projection_product_integral(&[f1, f2], 1, ProductQuadrature::uniform(128)).unwrap();
        assert!((v - 1.0).abs() < 0.03, "{v}");
    }

    #[test]
    fn zero_factor_gives_zero() {
        let f1 = square([0.0, 0.0], [1.0, 1.0], 16);
        let f2 = GridFunction::zeros(f1.spec.clone());
        assert_eq!(projection_product_integral(&[f1, f2], 1, ProductQuadrature::uniform(16)).unwrap(), 0.0);
    }

    #[test]
    fn wrong_count_is_rejected() {
        let f1 = square([0.0, 0.0], [1.0, 1.0], 8);
        assert!(projection_product_integral(&[f1], 1, ProductQuadrature::uniform(8)).is_err());
    }
}
