use super::exponents::{exponent_table, to_f64};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::heis::HDim;
use crate::quadrature::{projection_product_integral, ProductQuadrature};
use crate::report::RatioReport;

fn check_inputs(fs: &[GridFunction], n: HDim) -> Result<()> {
    if fs.len() != n.horizontal() {
        return Err(Error::DimensionMismatch { expected: n.horizontal(), got: fs.len() });
    }
    for (j, f) in fs.iter().enumerate() {
        if f.dim() != n.horizontal() {
            return Err(Error::DimensionMismatch { expected: n.horizontal(), got: f.dim() });
        }
        if !f.is_nonnegative() {
            return Err(Error::InvalidParameter(format!("f_{} must be nonnegative", j + 1)));
        }
    }
    Ok(())
}

/// `∫ ∏_j f_j(π_j p) dp` at `resolution` and at half of it.
fn numerators(fs: &[GridFunction], n: HDim, resolution: usize) -> Result<(f64, f64)> {
    if resolution < 2 {
        return Err(Error::InvalidParameter(format!("resolution must be >= 2, got {resolution}")));
    }
    let fine = projection_product_integral(fs, n.n(), ProductQuadrature::uniform(resolution))?;
    let coarse = projection_product_integral(fs, n.n(), ProductQuadrature::uniform(resolution / 2))?;
    Ok((fine, coarse))
}

fn report(op: &str, n: HDim, params: String, resolution: usize, num: (f64, f64), denom: f64) -> RatioReport {
    let (fine, coarse) = (num.0 / denom, num.1 / denom);
    RatioReport::new(op, n.n(), params, resolution).with_values(fine, fine.min(coarse), fine.max(coarse))
}

fn norms(fs: &[GridFunction], p: impl Fn(usize) -> f64) -> Result<Vec<f64>> {
    fs.iter()
        .enumerate()
        .map(|(j, f)| {
            let v = f.lp_norm(p(j + 1))?;
            if v == 0.0 {
                return Err(Error::ZeroNorm(format!("f_{} vanishes", j + 1)));
            }
            Ok(v)
        })
        .collect()
}

/// `∫ ∏ f_j(π_j p) dp / ∏ ‖f_j‖_{n(2n+1)/(n+1)}`.
///
/// The bracket spans the quadrature at `resolution` and `resolution / 2`
/// samples per axis.
pub fn strong_ratio(fs: &[GridFunction], n: HDim, resolution: usize) -> Result<RatioReport> {
    check_inputs(fs, n)?;
    let p = to_f64(exponent_table(n)?.p_main);
    let denom: f64 = norms(fs, |_| p)?.iter().product();
    let num = numerators(fs, n, resolution)?;
    Ok(report("strong", n, format!("p={p}"), resolution, num, denom))
}

/// Ratio for vertex `k` of the exponent polytope: `f_k`, `f_{n+k}` in
/// `L^{(2n+1)/2}`, every other `f_j` in `L^{2n+1}`.
pub fn vertex_ratio(fs: &[GridFunction], n: HDim, k: usize, resolution: usize) -> Result<RatioReport> {
    check_inputs(fs, n)?;
    if k == 0 || k > n.n() {
        return Err(Error::IndexOutOfRange { index: k, max: n.n() });
    }
    let m = n.n();
    let low = (2 * m + 1) as f64 / 2.0;
    let high = (2 * m + 1) as f64;
    let denom: f64 = norms(fs, |j| if j == k || j == k + m { low } else { high })?.iter().product();
    let num = numerators(fs, n, resolution)?;
    Ok(report("vertex", n, format!("k={k}"), resolution, num, denom))
}
