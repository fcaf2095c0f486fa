use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridSpec};
use crate::heis::HDim;
use crate::numeric::unflatten;
use rayon::prelude::*;

/// Samples of a compactly supported function on `ℝ^{2n+1}` whose outer
/// `support_margin` cell layers vanish.
#[derive(Debug, Clone)]
pub struct SampledFunction {
    pub grid: GridFunction,
    pub support_margin: usize,
}

impl SampledFunction {
    pub fn new(grid: GridFunction, support_margin: usize) -> Result<Self> {
        let d = grid.dim();
        if d < 3 || d % 2 == 0 {
            return Err(Error::InvalidParameter(format!("sampled functions live on R^(2n+1), got dim {d}")));
        }
        let shape = &grid.spec.shape;
        if shape.iter().any(|&s| s <= 2 * support_margin) {
            return Err(Error::MarginViolation { margin: support_margin });
        }
        let mut idx = vec![0usize; d];
        for (flat, v) in grid.samples.iter().enumerate() {
            if *v != 0.0 {
                unflatten(flat, shape, &mut idx);
                if idx.iter().zip(shape).any(|(&i, &s)| i < support_margin || i + support_margin >= s) {
                    return Err(Error::MarginViolation { margin: support_margin });
                }
            }
        }
        Ok(Self { grid, support_margin })
    }

    /// Sample `f` at the centers of `cells` cells per axis tiling `[lo, hi]`,
    /// surrounded by `margin` extra layers.
    pub fn from_fn(lo: &[f64], hi: &[f64], cells: usize, margin: usize, f: impl Fn(&[f64]) -> f64 + Sync) -> Result<Self> {
        let spec = GridSpec::covering(lo, hi, &vec![cells; lo.len()], margin)?;
        Self::new(GridFunction::from_fn(spec, f), margin)
    }

    pub fn dim(&self) -> HDim {
        HDim::new((self.grid.dim() - 1) / 2).expect("odd dimension >= 3")
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { grid: self.grid.scaled(c), support_margin: self.support_margin }
    }
}

/// Central differences of `u` along each axis at one cell, with spacing
/// `step` cells and zero extension outside the grid.
fn partials(u: &GridFunction, strides: &[usize], idx: &[usize], flat: usize, step: usize, out: &mut [f64]) {
    let s = &u.samples;
    for a in 0..idx.len() {
        let (i, n, st) = (idx[a], u.spec.shape[a], strides[a]);
        let plus = if i + step < n { s[flat + step * st] } else { 0.0 };
        let minus = if i >= step { s[flat - step * st] } else { 0.0 };
        out[a] = (plus - minus) / (2.0 * step as f64 * u.spec.spacing[a]);
    }
}

/// `X_j u` for `j = 1..2n` by central differences with `step` cells.
pub(crate) fn horizontal_gradient_step(u: &SampledFunction, step: usize) -> Result<Vec<GridFunction>> {
    if u.support_margin < step {
        return Err(Error::MarginViolation { margin: u.support_margin });
    }
    let g = &u.grid;
    let d = g.dim();
    let h = d - 1;
    let n = h / 2;
    let strides = g.spec.strides();
    let rows: Vec<Vec<f64>> = (0..g.spec.len())
        .into_par_iter()
        .map(|flat| {
            let mut idx = [0usize; 16];
            let mut p = [0.0f64; 16];
            let mut du = [0.0f64; 16];
            g.spec.center_of(flat, &mut idx[..d], &mut p[..d]);
            partials(g, &strides, &idx[..d], flat, step, &mut du[..d]);
            let dt = du[h];
            (0..h)
                .map(|j| if j < n { du[j] - 0.5 * p[j + n] * dt } else { du[j] + 0.5 * p[j - n] * dt })
                .collect()
        })
        .collect();
    (0..h)
        .map(|j| GridFunction::new(g.spec.clone(), rows.iter().map(|r| r[j]).collect()))
        .collect()
}

/// The left-invariant horizontal derivatives `X_1 u, …, X_{2n} u`:
/// `X_j = ∂_{x_j} − (x_{n+j}/2) ∂_t` and `X_{n+j} = ∂_{x_{n+j}} + (x_j/2) ∂_t`.
pub fn horizontal_gradient(u: &SampledFunction, n: HDim) -> Result<Vec<GridFunction>> {
    if u.grid.dim() != n.ambient() {
        return Err(Error::DimensionMismatch { expected: n.ambient(), got: u.grid.dim() });
    }
    if u.support_margin < 1 {
        return Err(Error::MarginViolation { margin: u.support_margin });
    }
    horizontal_gradient_step(u, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window(lo: f64, hi: f64) -> impl Fn(f64) -> bool {
        move |v| v > lo && v < hi
    }

    fn h1() -> HDim {
        HDim::new(1).unwrap()
    }

    // A polynomial cut off to the interior box, so the margin stays empty.
    fn windowed(f: impl Fn(&[f64]) -> f64 + Sync) -> SampledFunction {
        let w = window(-1.0, 1.0);
        SampledFunction::from_fn(&[-1.0; 3], &[1.0; 3], 32, 2, move |p| {
            if p.iter().all(|&v| w(v)) {
                f(p)
            } else {
                0.0
            }
        })
        .unwrap()
    }

    fn interior(u: &SampledFunction, flat: usize) -> Option<Vec<f64>> {
        let mut idx = vec![0; 3];
        let mut p = vec![0.0; 3];
        u.grid.spec.center_of(flat, &mut idx, &mut p);
        p.iter().all(|v| v.abs() < 0.85).then_some(p)
    }

    #[test]
    fn vertical_coordinate() {
        let u = windowed(|p| p[2]);
        let g = horizontal_gradient(&u, h1()).unwrap();
        for flat in 0..u.grid.spec.len() {
            if let Some(p) = interior(&u, flat) {
                assert!((g[0].samples[flat] + p[1] / 2.0).abs() < 1e-10);
                assert!((g[1].samples[flat] - p[0] / 2.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn horizontal_coordinate() {
        let u = windowed(|p| p[0]);
        let g = horizontal_gradient(&u, h1()).unwrap();
        for flat in 0..u.grid.spec.len() {
            if interior(&u, flat).is_some() {
                assert!((g[0].samples[flat] - 1.0).abs() < 1e-10);
                assert!(g[1].samples[flat].abs() < 1e-10);
            }
        }
    }

    #[test]
    fn quadratics_are_exact() {
        let f = |p: &[f64]| 0.3 * p[0] * p[0] - p[0] * p[2] + 2.0 * p[1] * p[2] + p[2] * p[2] - 0.5 * p[1];
        let u = windowed(f);
        let g = horizontal_gradient(&u, h1()).unwrap();
        for flat in 0..u.grid.spec.len() {
            if let Some(p) = interior(&u, flat) {
                let (x, y, t) = (p[0], p[1], p[2]);
                let ft = -x + 2.0 * y + 2.0 * t;
                let x1 = 0.6 * x - t - 0.5 * y * ft;
                let x2 = 2.0 * t - 0.5 + 0.5 * x * ft;
                assert!((g[0].samples[flat] - x1).abs() < 1e-10);
                assert!((g[1].samples[flat] - x2).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn commutator_is_vertical_derivative() {
        let u = SampledFunction::from_fn(&[-2.0; 3], &[2.0; 3], 64, 2, |p| {
            (-(p[0] * p[0] + p[1] * p[1] + 2.0 * p[2] * p[2])).exp() * (p.iter().all(|v| v.abs() < 1.9) as u8 as f64)
        });
        let u = u.unwrap();
        let g = horizontal_gradient(&u, h1()).unwrap();
        let x1 = SampledFunction { grid: g[0].clone(), support_margin: 2 };
        let x2 = SampledFunction { grid: g[1].clone(), support_margin: 2 };
        let x2x1 = &horizontal_gradient(&x1, h1()).unwrap()[1];
        let x1x2 = &horizontal_gradient(&x2, h1()).unwrap()[0];
        let mut idx = vec![0; 3];
        let mut p = vec![0.0; 3];
        let mut worst: f64 = 0.0;
        for flat in 0..u.grid.spec.len() {
            u.grid.spec.center_of(flat, &mut idx, &mut p);
            if p.iter().all(|v| v.abs() < 1.0) {
                let dt = -4.0 * p[2] * (-(p[0] * p[0] + p[1] * p[1] + 2.0 * p[2] * p[2])).exp();
                worst = worst.max((x1x2.samples[flat] - x2x1.samples[flat] - dt).abs());
            }
        }
        assert!(worst < 0.05, "{worst}");
    }

    #[test]
    fn margin_is_enforced() {
        let spec = GridSpec::covering(&[0.0; 3], &[1.0; 3], &[4; 3], 0).unwrap();
        let g = GridFunction::from_fn(spec, |_| 1.0);
        assert!(matches!(SampledFunction::new(g, 1), Err(Error::MarginViolation { .. })));
    }
}
