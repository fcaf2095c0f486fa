//! Averages of planar functions over families of curves.
//!
//! `T`, `S`, the parabola convolution and the slice operators `T_k` all have
//! the form `Of(x, t) = w ∫ f(u, t + Δ(x, u)) du`; they differ only in the
//! phase `Δ` and the weight `w`. Quadrature is the midpoint rule in `u` with
//! bilinear interpolation of `f`; the `u` step is fine enough that the
//! sampled curve moves by at most half a cell in `v` between nodes.

use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridSpec};
use crate::heis::HeightFamily;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Coefficients of `Δ(x, y) = αy² + βxy + γx² + δx + εy + κ`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SCoeffs {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub kappa: f64,
}

impl SCoeffs {
    /// Pure shear `Δ = βxy`.
    pub fn shear(beta: f64) -> Self {
        Self { beta, ..Self::default() }
    }

    #[inline]
    pub fn phase(&self, x: f64, y: f64) -> f64 {
        self.alpha * y * y
            + self.beta * x * y
            + self.gamma * x * x
            + self.delta * x
            + self.epsilon * y
            + self.kappa
    }

    /// `Φ` with `Sf = |α|^{-1/3} (μ_{-α} ∗ f) ∘ Φ` (requires `α ≠ 0`).
    pub fn parabola_reduction(&self, x: f64, t: f64) -> (f64, f64) {
        let s = self.beta * x / self.alpha + self.epsilon / self.alpha;
        let u = -0.5 * s;
        let v = -self.alpha / 4.0 * s * s
            + self.gamma * x * x
            + self.delta * x
            + self.kappa
            + t;
        (u, v)
    }
}

/// `T_k` at a frozen slice: phase `h_k − h_{n+k}` with `x_k = x`, `x_{n+k} = u`.
#[derive(Debug, Clone)]
pub struct SliceOperator {
    family: HeightFamily,
    k: usize,
    slice: Vec<f64>,
}

impl SliceOperator {
    pub fn family(&self) -> &HeightFamily {
        &self.family
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn slice(&self) -> &[f64] {
        &self.slice
    }

    #[inline]
    pub fn phase(&self, x: f64, u: f64) -> f64 {
        let n = self.family.dim().n();
        let mut buf = [0.0f64; 16];
        let mut s = 0;
        for (i, slot) in buf.iter_mut().enumerate().take(2 * n) {
            *slot = if i + 1 == self.k {
                x
            } else if i + 1 == self.k + n {
                u
            } else {
                s += 1;
                self.slice[s - 1]
            };
        }
        let p = &buf[..2 * n];
        self.family.height(self.k, p) - self.family.height(self.k + n, p)
    }
}

/// The planar operators whose `L^{3/2} → L^3` behaviour is studied.
#[derive(Debug, Clone)]
pub enum PlanarOperator {
    /// Radon transform onto `S¹ × ℝ`.
    Radon { n_angles: usize, n_offsets: usize },
    /// `Tf(x,t) = ∫ f(y, t + xy) dy`.
    T,
    /// `Sf(x,t) = ∫ f(y, t + Δ(x,y)) dy`.
    S(SCoeffs),
    /// `(μ_α ∗ f)(x,t) = |α|^{1/3} ∫ f(x − y, t − αy²) dy`.
    Parabola { alpha: f64 },
    Tk(SliceOperator),
}

/// Build `T_k` for a height family. For `n = 1` the slice must be empty.
pub fn op_tk(family: &HeightFamily, k: usize, slice: &[f64]) -> Result<PlanarOperator> {
    let n = family.dim().n();
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { index: k, max: n });
    }
    if slice.len() != 2 * n - 2 {
        return Err(Error::DimensionMismatch { expected: 2 * n - 2, got: slice.len() });
    }
    if n > 8 {
        return Err(Error::InvalidParameter(format!("slice operators support n <= 8, got {n}")));
    }
    Ok(PlanarOperator::Tk(SliceOperator { family: family.clone(), k, slice: slice.to_vec() }))
}

pub(crate) type PhaseFn<'a> = Box<dyn Fn(f64, f64) -> f64 + Sync + 'a>;

/// Weight and phase of a curve-average operator.
pub(crate) struct Curve<'a> {
    pub weight: f64,
    pub phase: PhaseFn<'a>,
}

impl PlanarOperator {
    pub fn name(&self) -> String {
        match self {
            Self::Radon { .. } => "radon".into(),
            Self::T => "T".into(),
            Self::S(c) => format!(
                "S(a={},b={},g={},d={},e={},k={})",
                c.alpha, c.beta, c.gamma, c.delta, c.epsilon, c.kappa
            ),
            Self::Parabola { alpha } => format!("parabola(a={alpha})"),
            Self::Tk(s) => format!("T_{}[{}]{:?}", s.k, s.family.label(), s.slice),
        }
    }

    pub(crate) fn curve(&self) -> Option<Curve<'_>> {
        match self {
            Self::Radon { .. } => None,
            Self::T => Some(Curve { weight: 1.0, phase: Box::new(|x, u| x * u) }),
            Self::S(c) => Some(Curve { weight: 1.0, phase: Box::new(move |x, u| c.phase(x, u)) }),
            Self::Parabola { alpha } => {
                let a = *alpha;
                Some(Curve {
                    weight: a.abs().cbrt(),
                    phase: Box::new(move |x, u| -a * (x - u) * (x - u)),
                })
            }
            Self::Tk(s) => Some(Curve { weight: 1.0, phase: Box::new(move |x, u| s.phase(x, u)) }),
        }
    }

    fn validate(&self) -> Result<()> {
        if let Self::Parabola { alpha } = self {
            if *alpha == 0.0 || !alpha.is_finite() {
                return Err(Error::InvalidParameter("parabola convolution needs alpha != 0".into()));
            }
        }
        Ok(())
    }

    /// Evaluate the operator at the cell centers of `out`.
    pub fn apply(&self, f: &GridFunction, out: &GridSpec) -> Result<GridFunction> {
        self.validate()?;
        if out.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: out.dim() });
        }
        let curve = self.curve().ok_or_else(|| {
            Error::InvalidParameter("the Radon transform is evaluated with radon_transform".into())
        })?;
        let kernel = Kernel::new(f)?;
        let ts: Vec<f64> = (0..out.shape[1]).map(|j| out.center_axis(1, j)).collect();
        let rows: Vec<Vec<f64>> = (0..out.shape[0])
            .into_par_iter()
            .map(|i| {
                let row = Row::build(&kernel, &curve, out.center_axis(0, i));
                ts.iter().map(|&t| row.value(&kernel, t)).collect()
            })
            .collect();
        GridFunction::new(out.clone(), rows.concat())
    }

    /// Evaluate at one point.
    pub fn evaluate(&self, f: &GridFunction, x: f64, t: f64) -> Result<f64> {
        self.validate()?;
        let curve = self.curve().ok_or_else(|| {
            Error::InvalidParameter("the Radon transform is evaluated with radon_transform".into())
        })?;
        let kernel = Kernel::new(f)?;
        Ok(Row::build(&kernel, &curve, x).value(&kernel, t))
    }
}

pub fn op_t(f: &GridFunction, out: &GridSpec) -> Result<GridFunction> {
    PlanarOperator::T.apply(f, out)
}

pub fn op_s(f: &GridFunction, c: SCoeffs, out: &GridSpec) -> Result<GridFunction> {
    PlanarOperator::S(c).apply(f, out)
}

pub fn parabola_convolution(f: &GridFunction, alpha: f64, out: &GridSpec) -> Result<GridFunction> {
    PlanarOperator::Parabola { alpha }.apply(f, out)
}

/// Sampling geometry of a planar input function.
pub(crate) struct Kernel<'a> {
    f: &'a GridFunction,
    ou: f64,
    ov: f64,
    pub hu: f64,
    pub hv: f64,
    nu: usize,
    nv: usize,
    /// Support of the interpolant: the grid box widened by half a cell.
    pub ulo: f64,
    pub uhi: f64,
    pub vlo: f64,
    pub vhi: f64,
}

impl<'a> Kernel<'a> {
    pub fn new(f: &'a GridFunction) -> Result<Self> {
        if f.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: f.dim() });
        }
        let s = &f.spec;
        let up = s.upper();
        Ok(Self {
            f,
            ou: s.origin[0],
            ov: s.origin[1],
            hu: s.spacing[0],
            hv: s.spacing[1],
            nu: s.shape[0],
            nv: s.shape[1],
            ulo: s.origin[0] - 0.5 * s.spacing[0],
            uhi: up[0] + 0.5 * s.spacing[0],
            vlo: s.origin[1] - 0.5 * s.spacing[1],
            vhi: up[1] + 0.5 * s.spacing[1],
        })
    }
}

/// Quadrature nodes for one output row, sorted by phase.
pub(crate) struct Row {
    du: f64,
    weight: f64,
    delta: Vec<f64>,
    /// Per node: flat offsets of the two bracketing sample columns and their
    /// interpolation weights (zero for columns outside the grid).
    cols: Vec<(usize, f64, usize, f64)>,
}

impl Row {
    pub fn build(k: &Kernel<'_>, curve: &Curve<'_>, x: f64) -> Self {
        let phase = &curve.phase;
        let probe_step = 0.5 * k.hu;
        let probes = ((k.uhi - k.ulo) / probe_step).ceil().max(1.0) as usize;
        let probe_du = (k.uhi - k.ulo) / probes as f64;
        let mut slope: f64 = 0.0;
        let mut prev = phase(x, k.ulo);
        for i in 1..=probes {
            let cur = phase(x, k.ulo + i as f64 * probe_du);
            slope = slope.max((cur - prev).abs() / probe_du);
            prev = cur;
        }
        let dy = if slope > 0.0 { k.hu.min(k.hv / slope) } else { k.hu } / 2.0;
        let n = ((k.uhi - k.ulo) / dy).ceil().max(1.0) as usize;
        let du = (k.uhi - k.ulo) / n as f64;

        let mut nodes: Vec<(f64, (usize, f64, usize, f64))> = (0..n)
            .map(|i| {
                let u = k.ulo + (i as f64 + 0.5) * du;
                let su = (u - k.ou) / k.hu - 0.5;
                let fu = su.floor();
                let au = su - fu;
                let iu = fu as isize;
                let col = |c: isize, w: f64| {
                    if c >= 0 && (c as usize) < k.nu {
                        (c as usize * k.nv, w)
                    } else {
                        (0, 0.0)
                    }
                };
                let (b0, w0) = col(iu, 1.0 - au);
                let (b1, w1) = col(iu + 1, au);
                (phase(x, u), (b0, w0, b1, w1))
            })
            .collect();
        nodes.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let (delta, cols) = nodes.into_iter().unzip();
        Self { du, weight: curve.weight, delta, cols }
    }

    /// Range of `t` outside of which the row vanishes.
    pub fn t_range(&self, k: &Kernel<'_>) -> (f64, f64) {
        let lo = k.vlo - self.delta.last().copied().unwrap_or(0.0);
        let hi = k.vhi - self.delta.first().copied().unwrap_or(0.0);
        (lo, hi)
    }

    #[inline]
    pub fn value(&self, k: &Kernel<'_>, t: f64) -> f64 {
        let first = self.delta.partition_point(|d| *d <= k.vlo - t);
        let last = self.delta.partition_point(|d| *d < k.vhi - t);
        let s = &k.f.samples;
        let nv = k.nv as isize;
        let mut acc = 0.0;
        for i in first..last {
            let sv = (t + self.delta[i] - k.ov) / k.hv - 0.5;
            let fv = sv.floor();
            let av = sv - fv;
            let iv = fv as isize;
            let (b0, w0, b1, w1) = self.cols[i];
            let mut val = 0.0;
            if (0..nv).contains(&iv) {
                let j = iv as usize;
                val += (1.0 - av) * (w0 * s[b0 + j] + w1 * s[b1 + j]);
            }
            if (0..nv).contains(&(iv + 1)) {
                let j = (iv + 1) as usize;
                val += av * (w0 * s[b0 + j] + w1 * s[b1 + j]);
            }
            acc += val;
        }
        acc * self.du * self.weight
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heis::{poly_height_family, HDim, PolyHeightSpec};

    fn indicator(lo: [f64; 2], hi: [f64; 2], cells: usize) -> GridFunction {
        let spec = GridSpec::covering(&lo, &hi, &[cells, cells], 0).unwrap();
        GridFunction::from_fn(spec, |_| 1.0)
    }

    fn bump(cells: usize) -> GridFunction {
        let spec = GridSpec::covering(&[-1.0, -1.0], &[1.0, 1.0], &[cells, cells], 2).unwrap();
        GridFunction::from_fn(spec, |p| {
            let r2 = p[0] * p[0] + p[1] * p[1];
            if r2 < 1.0 {
                (1.0 - r2).powi(3)
            } else {
                0.0
            }
        })
    }

    fn out_grid() -> GridSpec {
        GridSpec::covering(&[-2.0, -3.0], &[2.0, 3.0], &[17, 23], 0).unwrap()
    }

    #[test]
    fn t_of_unit_square_at_half() {
        let f = indicator([0.0, 0.0], [1.0, 1.0], 64);
        let v = PlanarOperator::T.evaluate(&f, 0.0, 0.5).unwrap();
        // The interpolant ramps over half a cell at each edge.
        assert!((v - 1.0).abs() < 2.0 / 64.0, "{v}");
    }

    #[test]
    fn zero_input_gives_zero() {
        let f = GridFunction::zeros(GridSpec::covering(&[0.0, 0.0], &[1.0, 1.0], &[8, 8], 0).unwrap());
        let g = op_t(&f, &out_grid()).unwrap();
        assert!(g.samples.iter().all(|v| *v == 0.0));
        let g = parabola_convolution(&f, 1.0, &out_grid()).unwrap();
        assert!(g.samples.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn s_with_unit_shear_is_t() {
        let f = bump(32);
        let a = op_t(&f, &out_grid()).unwrap();
        let b = op_s(&f, SCoeffs::shear(1.0), &out_grid()).unwrap();
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn parabola_at_origin() {
        let f = indicator([-1.0, -1.0], [1.0, 1.0], 128);
        let v = PlanarOperator::Parabola { alpha: 1.0 }.evaluate(&f, 0.0, 0.0).unwrap();
        assert!((v - 2.0).abs() < 0.02, "{v}");
        assert!(parabola_convolution(&f, 0.0, &out_grid()).is_err());
    }

    #[test]
    fn s_matches_parabola_reduction() {
        let f = bump(64);
        let c = SCoeffs { alpha: 1.0, beta: 1.5, gamma: 0.3, delta: -0.2, epsilon: 0.4, kappa: 0.1 };
        let s = PlanarOperator::S(c);
        let mu = PlanarOperator::Parabola { alpha: -c.alpha };
        for &(x, t) in &[(0.1, 0.2), (-0.4, 0.5), (0.3, -0.6), (0.0, 0.0)] {
            let lhs = s.evaluate(&f, x, t).unwrap();
            let (u, v) = c.parabola_reduction(x, t);
            let rhs = c.alpha.abs().powf(-1.0 / 3.0) * mu.evaluate(&f, u, v).unwrap();
            assert!((lhs - rhs).abs() < 1e-3 * (1.0 + lhs.abs()), "{x} {t}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn tk_standard_n1_is_t() {
        let n = HDim::new(1).unwrap();
        let op = op_tk(&HeightFamily::standard(n), 1, &[]).unwrap();
        let f = bump(32);
        let a = op.apply(&f, &out_grid()).unwrap();
        let b = op_t(&f, &out_grid()).unwrap();
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn tk_poly_gap_two_is_s_beta_two() {
        let n = HDim::new(2).unwrap();
        let fam = poly_height_family(&PolyHeightSpec::bilinear(n, vec![1.5, 0.0, -0.5, 0.0])).unwrap();
        let f = bump(32);
        for slice in [[0.0, 0.0], [0.7, -1.3]] {
            let a = op_tk(&fam, 1, &slice).unwrap().apply(&f, &out_grid()).unwrap();
            let b = op_s(&f, SCoeffs::shear(2.0), &out_grid()).unwrap();
            for (x, y) in a.samples.iter().zip(&b.samples) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tk_validates_arguments() {
        let n = HDim::new(2).unwrap();
        let fam = HeightFamily::standard(n);
        assert!(matches!(op_tk(&fam, 3, &[0.0, 0.0]), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(op_tk(&fam, 1, &[0.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn mass_identity_for_t() {
        // ∫ Tf(x, t) dt = ∫ f for every x.
        let f = bump(48);
        let kernel = Kernel::new(&f).unwrap();
        let curve = PlanarOperator::T.curve().unwrap();
        for x in [-3.0, 0.0, 0.5, 7.0] {
            let row = Row::build(&kernel, &curve, x);
            let (lo, hi) = row.t_range(&kernel);
            let m = 4000;
            let dt = (hi - lo) / m as f64;
            let mass: f64 = (0..m).map(|i| row.value(&kernel, lo + (i as f64 + 0.5) * dt)).sum::<f64>() * dt;
            let total = f.integral();
            assert!((mass - total).abs() < 0.02 * total, "x={x}: {mass} vs {total}");
        }
    }
}
