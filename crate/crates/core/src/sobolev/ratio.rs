use super::function::{horizontal_gradient_step, SampledFunction};
use crate::error::{Error, Result};
use crate::heis::HDim;
use crate::report::RatioReport;

/// `‖u‖_{(2n+2)/(2n+1)} / ∏_j ‖X_j u‖₁^{1/(2n)}`.
///
/// `value` uses one-cell central differences; the bracket also includes the
/// two-cell stencil.
pub fn sobolev_ratio(u: &SampledFunction, n: HDim) -> Result<RatioReport> {
    if u.grid.dim() != n.ambient() {
        return Err(Error::DimensionMismatch { expected: n.ambient(), got: u.grid.dim() });
    }
    let m = n.n() as f64;
    let top = u.grid.lp_norm((2.0 * m + 2.0) / (2.0 * m + 1.0))?;
    if top == 0.0 {
        return Err(Error::ZeroNorm("u vanishes".into()));
    }
    let value_at = |step: usize| -> Result<f64> {
        let grads = horizontal_gradient_step(u, step)?;
        let mut denom = 1.0;
        for g in &grads {
            let l1 = g.lp_norm(1.0)?;
            if l1 == 0.0 {
                return Err(Error::UnderResolved("a horizontal derivative vanishes for nonzero u".into()));
            }
            denom *= l1.powf(1.0 / (2.0 * m));
        }
        Ok(top / denom)
    };
    let fine = value_at(1)?;
    let coarse = if u.support_margin >= 2 { value_at(2)? } else { fine };
    Ok(RatioReport::new("sobolev", n.n(), "", *u.grid.spec.shape.iter().max().unwrap_or(&0))
        .with_values(fine, fine.min(coarse), fine.max(coarse)))
}
