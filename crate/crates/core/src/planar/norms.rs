//! `L³` norms of operator outputs over the whole plane or a window in `x`.
//!
//! Outputs of `T`, `S`, `μ_α∗` and `T_k` are not compactly supported in `x`,
//! so rows are placed at `x = x_c + L sinh ξ` with `ξ` uniform: the spacing
//! grows with `|x|`, matching the slow `|x|^{-2}` decay of the row norms.
//! Along each row the exact `t`-support is known and sampled by the midpoint
//! rule.

use super::ops::{Curve, Kernel, PlanarOperator, Row};
use super::radon::radon_transform;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::numeric::{chunked_sum_ranges, rel_diff, KahanSum};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSettings {
    /// Row spacing in the `ξ` variable.
    pub d_xi: f64,
    /// Bounds on `t` samples per row; the target step is half a `v`-cell.
    pub min_t_samples: usize,
    pub max_t_samples: usize,
    /// Stop doubling the window once the norm changes by less than this.
    pub rel_tol: f64,
    pub max_doublings: usize,
    /// Initial window half-width in units of the row scale `L`.
    pub initial_half_width: f64,
}

impl Default for NormSettings {
    fn default() -> Self {
        Self {
            d_xi: 0.05,
            min_t_samples: 128,
            max_t_samples: 2048,
            rel_tol: 0.005,
            max_doublings: 20,
            initial_half_width: 16.0,
        }
    }
}

/// Row placement for an operator applied to a given input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RowLayout {
    pub center: f64,
    pub scale: f64,
}

fn layout(curve: &Curve<'_>, k: &Kernel<'_>) -> RowLayout {
    let (u0, u1) = (k.ulo, k.uhi);
    let uc = 0.5 * (u0 + u1);
    let p = &curve.phase;
    // Effective shear: mixed second difference of the phase.
    let beta = ((p(1.0, u1) - p(1.0, u0) - p(-1.0, u1) + p(-1.0, u0)) / (2.0 * (u1 - u0))).abs();
    let base = ((k.vhi - k.vlo) / (u1 - u0)).clamp(1e-3, 1e3);
    let scale = if beta > 1e-12 { base / beta } else { base };
    // Center where the curves are flattest at the middle of the support.
    let h = 1e-4 * (u1 - u0);
    let slope = |x: f64| (p(x, uc + h) - p(x, uc - h)) / (2.0 * h);
    let (s0, s1) = (slope(0.0), slope(1.0));
    let center = if (s1 - s0).abs() > 1e-12 { -s0 / (s1 - s0) } else { 0.0 };
    RowLayout { center, scale }
}

fn row_norm_cubed(row: &Row, k: &Kernel<'_>, s: &NormSettings) -> f64 {
    let (lo, hi) = row.t_range(k);
    if !(hi > lo) {
        return 0.0;
    }
    let m = ((2.0 * (hi - lo) / k.hv).ceil() as usize).clamp(s.min_t_samples, s.max_t_samples);
    let dt = (hi - lo) / m as f64;
    let mut acc = KahanSum::new();
    for i in 0..m {
        let v = row.value(k, lo + (i as f64 + 0.5) * dt);
        acc.add(v.abs().powi(3));
    }
    acc.value() * dt
}

fn check_input(f: &GridFunction) -> Result<()> {
    if f.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: f.dim() });
    }
    if !f.is_nonnegative() {
        return Err(Error::InvalidParameter("input must be nonnegative".into()));
    }
    if f.max_abs() == 0.0 {
        return Err(Error::ZeroNorm("input function vanishes".into()));
    }
    Ok(())
}

fn curve_of(op: &PlanarOperator) -> Result<Curve<'_>> {
    if let PlanarOperator::Parabola { alpha } = op {
        if *alpha == 0.0 {
            return Err(Error::InvalidParameter("parabola convolution needs alpha != 0".into()));
        }
    }
    op.curve()
        .ok_or_else(|| Error::InvalidParameter("windowed norms need a curve-average operator".into()))
}

/// The row layout used for `op` applied to `f`.
pub fn row_layout(op: &PlanarOperator, f: &GridFunction) -> Result<RowLayout> {
    let curve = curve_of(op)?;
    Ok(layout(&curve, &Kernel::new(f)?))
}

fn windowed_cubed(curve: &Curve<'_>, k: &Kernel<'_>, lay: RowLayout, w: f64, s: &NormSettings) -> f64 {
    let xi_max = (w / lay.scale).asinh();
    let rows = ((2.0 * xi_max / s.d_xi).ceil() as usize).max(2);
    let dxi = 2.0 * xi_max / rows as f64;
    chunked_sum_ranges(rows, 1, |r| {
        r.map(|i| {
            let xi = -xi_max + (i as f64 + 0.5) * dxi;
            let x = lay.center + lay.scale * xi.sinh();
            let row = Row::build(k, curve, x);
            row_norm_cubed(&row, k, s) * lay.scale * xi.cosh() * dxi
        })
        .sum()
    })
}

/// `‖op f‖_{L³([x_c − W, x_c + W] × ℝ)}` around the operator's row center.
pub fn windowed_l3_norm(
    op: &PlanarOperator,
    f: &GridFunction,
    half_width: f64,
    settings: &NormSettings,
) -> Result<f64> {
    check_input(f)?;
    if !(half_width > 0.0) {
        return Err(Error::InvalidParameter(format!("window half-width must be > 0, got {half_width}")));
    }
    let curve = curve_of(op)?;
    let k = Kernel::new(f)?;
    let lay = layout(&curve, &k);
    Ok(windowed_cubed(&curve, &k, lay, half_width, settings).cbrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    /// Final window half-width (infinite for Radon outputs).
    pub half_width: f64,
    pub doublings: usize,
}

/// Whole-plane `L³` norm of `op f`, doubling the window until stable.
pub fn output_l3_norm(op: &PlanarOperator, f: &GridFunction, settings: &NormSettings) -> Result<NormEstimate> {
    check_input(f)?;
    if let PlanarOperator::Radon { n_angles, n_offsets } = op {
        let sino = radon_transform(f, *n_angles, *n_offsets)?;
        return Ok(NormEstimate { value: sino.lp_norm(3.0)?, half_width: f64::INFINITY, doublings: 0 });
    }
    let curve = curve_of(op)?;
    let k = Kernel::new(f)?;
    let lay = layout(&curve, &k);
    let mut w = settings.initial_half_width * lay.scale;
    let mut prev = windowed_cubed(&curve, &k, lay, w, settings).cbrt();
    for d in 1..=settings.max_doublings {
        w *= 2.0;
        let cur = windowed_cubed(&curve, &k, lay, w, settings).cbrt();
        if rel_diff(cur, prev) < settings.rel_tol {
            return Ok(NormEstimate { value: cur, half_width: w, doublings: d });
        }
        prev = cur;
    }
    Err(Error::NotStabilized { doublings: settings.max_doublings, last: prev })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioEstimate {
    pub ratio: f64,
    pub output_norm: f64,
    pub input_norm: f64,
    pub half_width: f64,
}

/// `‖op f‖₃ / ‖f‖_{3/2}` with default settings.
pub fn improving_ratio(op: &PlanarOperator, f: &GridFunction) -> Result<f64> {
    improving_ratio_with(op, f, &NormSettings::default()).map(|r| r.ratio)
}

pub fn improving_ratio_with(
    op: &PlanarOperator,
    f: &GridFunction,
    settings: &NormSettings,
) -> Result<RatioEstimate> {
    let out = output_l3_norm(op, f, settings)?;
    let input = f.lp_norm(1.5)?;
    Ok(RatioEstimate {
        ratio: out.value / input,
        output_norm: out.value,
        input_norm: input,
        half_width: out.half_width,
    })
}
