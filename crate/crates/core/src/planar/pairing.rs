use super::ops::op_t;
use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridSpec};
use crate::numeric::chunked_sum;
use crate::quadrature::{projection_product_integral, ProductQuadrature};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairingReport {
    /// `∫_{ℍ¹} f₁(π₁ p) f₂(π₂ p) dp`.
    pub lhs: f64,
    /// `∫_{ℝ²} Tf₁ · f₂`.
    pub rhs: f64,
    pub relative_error: f64,
    pub resolution: usize,
}

/// Both sides of the identity `∫ f₁(π₁ p) f₂(π₂ p) dp = ∫ Tf₁ · f₂` at
/// `resolution` samples per axis.
pub fn pairing_check(f1: &GridFunction, f2: &GridFunction, resolution: usize) -> Result<PairingReport> {
    for f in [f1, f2] {
        if f.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: f.dim() });
        }
        if !f.is_nonnegative() {
            return Err(Error::InvalidParameter("pairing inputs must be nonnegative".into()));
        }
    }
    if resolution == 0 {
        return Err(Error::InvalidParameter("resolution must be positive".into()));
    }
    let (lo, hi) = match (f1.support_bounds(), f2.support_bounds()) {
        (Some(_), Some(b)) => b,
        _ => return Ok(PairingReport { lhs: 0.0, rhs: 0.0, relative_error: 0.0, resolution }),
    };
    let lhs = projection_product_integral(&[f1.clone(), f2.clone()], 1, ProductQuadrature::uniform(resolution))?;
    let out = GridSpec::covering(&lo, &hi, &[resolution, resolution], 0)?;
    let tf = op_t(f1, &out)?;
    let rhs = chunked_sum(out.len(), |flat| {
        let (mut c, mut p) = ([0usize; 2], [0.0; 2]);
        out.center_of(flat, &mut c, &mut p);
        tf.samples[flat] * f2.interpolate2(p[0], p[1])
    }) * out.cell_volume();
    let scale = lhs.abs().max(rhs.abs());
    let relative_error = if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale };
    Ok(PairingReport { lhs, rhs, relative_error, resolution })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn indicator(lo: [f64; 2], hi: [f64; 2], cells: usize) -> GridFunction {
        let spec = GridSpec::covering(&lo, &hi, &[cells, cells], 2).unwrap();
        GridFunction::from_fn(spec, move |p| {
            if p[0] >= lo[0] && p[0] < hi[0] && p[1] >= lo[1] && p[1] < hi[1] {
                1.0
            } else {
                0.0
            }
        })
    }

    fn bump(c: [f64; 2], cells: usize) -> GridFunction {
        let spec = GridSpec::covering(&[c[0] - 1.0, c[1] - 1.0], &[c[0] + 1.0, c[1] + 1.0], &[cells, cells], 2).unwrap();
        GridFunction::from_fn(spec, move |p| {
            let r2 = (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2);
            if r2 < 1.0 {
                (1.0 - r2).powi(3)
            } else {
                0.0
            }
        })
    }

    #[test]
    fn zero_second_factor() {
        let f1 = indicator([0.0, 0.0], [1.0, 1.0], 16);
        let f2 = GridFunction::zeros(f1.spec.clone());
        let r = pairing_check(&f1, &f2, 32).unwrap();
        assert_eq!((r.lhs, r.rhs, r.relative_error), (0.0, 0.0, 0.0));
    }

    // Exact value of both sides for the squares below.
    const OFFSET_SQUARES: f64 = 0.417_862_502_820_888_7;

    #[test]
    fn offset_squares_match_closed_form_and_halve() {
        let mut errs = Vec::new();
        for n in [32, 64, 128] {
            let f1 = indicator([0.0, 0.0], [1.0, 1.0], n);
            let f2 = indicator([0.3, 0.2], [1.3, 1.2], n);
            let r = pairing_check(&f1, &f2, n).unwrap();
            assert!(r.relative_error < 0.02, "{r:?}");
            assert!((r.lhs - OFFSET_SQUARES).abs() < 0.01 * OFFSET_SQUARES, "{r:?}");
            assert!((r.rhs - OFFSET_SQUARES).abs() < 0.01 * OFFSET_SQUARES, "{r:?}");
            errs.push(r.relative_error);
        }
        for w in errs.windows(2) {
            let q = w[1] / w[0];
            assert!((0.25..=0.75).contains(&q), "{errs:?}");
        }
    }

    #[test]
    fn smooth_bumps_at_least_halve() {
        let errs: Vec<f64> = [16, 32, 64]
            .iter()
            .map(|&n| pairing_check(&bump([0.0, 0.0], n), &bump([0.4, 0.3], n), n).unwrap().relative_error)
            .collect();
        assert!(errs[0] < 1e-3);
        for w in errs.windows(2) {
            assert!(w[1] <= 0.75 * w[0], "{errs:?}");
        }
    }
}
