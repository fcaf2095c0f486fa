//! Heisenberg group algebra.
//!
//! Points of ℍⁿ are stored as `(x, t)` with `x ∈ ℝ^{2n}`. Indices of vertical
//! projections are 1-based (`1..=2n`) throughout the public API; a plane point
//! stores the remaining `2n - 1` horizontal coordinates in ascending order
//! followed by the plane's vertical coordinate.
//!
//! Hot loops elsewhere in the crate call the slice-level helpers
//! ([`project_coords`], [`PlaneProjection::apply`]) on flat coordinate slices
//! `[x_1, .., x_2n, t]` to avoid allocating an [`HPoint`] per sample.

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// The Heisenberg index `n` of ℍⁿ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HDim(usize);

impl HDim {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("Heisenberg index n must be >= 1".into()));
        }
        Ok(Self(n))
    }

    pub fn n(self) -> usize {
        self.0
    }

    /// Horizontal dimension `2n`.
    pub fn horizontal(self) -> usize {
        2 * self.0
    }

    /// Topological dimension `2n + 1`.
    pub fn ambient(self) -> usize {
        2 * self.0 + 1
    }

    /// Homogeneous dimension `2n + 2`.
    pub fn homogeneous(self) -> usize {
        2 * self.0 + 2
    }

    pub(crate) fn check_index(self, j: usize) -> Result<()> {
        if j == 0 || j > 2 * self.0 {
            Err(Error::IndexOutOfRange { index: j, max: 2 * self.0 })
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for HDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A point `(x, t)` of ℍⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct HPoint {
    pub x: Vec<f64>,
    pub t: f64,
}

impl HPoint {
    pub fn new(x: Vec<f64>, t: f64) -> Result<Self> {
        if x.is_empty() || x.len() % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "horizontal part must have even positive length, got {}",
                x.len()
            )));
        }
        Ok(Self { x, t })
    }

    pub fn identity(n: HDim) -> Self {
        Self { x: vec![0.0; n.horizontal()], t: 0.0 }
    }

    /// Build from a flat slice `[x_1, .., x_2n, t]`.
    pub fn from_coords(coords: &[f64]) -> Result<Self> {
        let (t, x) = coords
            .split_last()
            .ok_or_else(|| Error::InvalidParameter("empty coordinate slice".into()))?;
        Self::new(x.to_vec(), *t)
    }

    pub fn coords(&self) -> Vec<f64> {
        let mut c = self.x.clone();
        c.push(self.t);
        c
    }

    pub fn dim(&self) -> HDim {
        HDim(self.x.len() / 2)
    }

    /// Group inverse `(-x, -t)`.
    pub fn inverse(&self) -> Self {
        Self { x: self.x.iter().map(|v| -v).collect(), t: -self.t }
    }

    fn check(&self, n: HDim) -> Result<()> {
        if self.x.len() != n.horizontal() {
            Err(Error::DimensionMismatch { expected: n.horizontal(), got: self.x.len() })
        } else {
            Ok(())
        }
    }
}

/// A point of a vertical plane `W_j`, identified with ℝ^{2n}.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanePoint {
    pub coords: Vec<f64>,
}

impl PlanePoint {
    /// The plane's vertical coordinate.
    pub fn s(&self) -> f64 {
        *self.coords.last().expect("plane point is never empty")
    }
}

/// Symplectic form `Σ_{i<=n} (x_i y_{n+i} - x_{n+i} y_i)`.
#[inline]
pub fn symplectic(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() / 2;
    (0..n).map(|i| x[i] * y[n + i] - x[n + i] * y[i]).sum()
}

pub fn group_product(p: &HPoint, q: &HPoint, n: HDim) -> Result<HPoint> {
    p.check(n)?;
    q.check(n)?;
    let x = p.x.iter().zip(&q.x).map(|(a, b)| a + b).collect();
    let t = p.t + q.t + 0.5 * symplectic(&p.x, &q.x);
    Ok(HPoint { x, t })
}

/// Heisenberg dilation `(r x, r² t)`.
pub fn dilate(p: &HPoint, r: f64) -> Result<HPoint> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("dilation factor must be > 0, got {r}")));
    }
    Ok(HPoint { x: p.x.iter().map(|v| r * v).collect(), t: r * r * p.t })
}

/// Korányi gauge `(|x|⁴ + 16 t²)^{1/4}`.
pub fn koranyi_norm(p: &HPoint) -> f64 {
    koranyi_norm_coords(&p.x, p.t)
}

#[inline]
pub fn koranyi_norm_coords(x: &[f64], t: f64) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    (r2 * r2 + 16.0 * t * t).sqrt().sqrt()
}

/// Left-invariant distance `‖q⁻¹ · p‖`.
pub fn koranyi_distance(p: &HPoint, q: &HPoint, n: HDim) -> Result<f64> {
    Ok(koranyi_norm(&group_product(&q.inverse(), p, n)?))
}

/// Partner index of `j` (1-based): `j + n` for `j <= n`, `j - n` otherwise.
#[inline]
pub fn partner(j: usize, n: usize) -> usize {
    if j <= n {
        j + n
    } else {
        j - n
    }
}

/// Vertical projection on flat coordinates. `p = [x_1, .., x_2n, t]`,
/// `out` receives `2n` values. `j` is 1-based.
#[inline]
pub fn project_coords(p: &[f64], n: usize, j: usize, out: &mut [f64]) {
    let h = 2 * n;
    let xj = p[j - 1];
    let xm = p[partner(j, n) - 1];
    let shift = if j <= n { 0.5 * xj * xm } else { -0.5 * xj * xm };
    write_hat(p, h, j, p[h] + shift, out);
}

#[inline]
fn write_hat(p: &[f64], h: usize, j: usize, s: f64, out: &mut [f64]) {
    let mut o = 0;
    for (i, &v) in p[..h].iter().enumerate() {
        if i + 1 != j {
            out[o] = v;
            o += 1;
        }
    }
    out[o] = s;
}

pub fn vertical_projection(p: &HPoint, j: usize, n: HDim) -> Result<PlanePoint> {
    p.check(n)?;
    n.check_index(j)?;
    let mut out = vec![0.0; n.horizontal()];
    project_coords(&p.coords(), n.n(), j, &mut out);
    Ok(PlanePoint { coords: out })
}

/// The point of `W_j` (with `x_j = 0`) whose projection is `w`.
pub fn embed_plane_point(w: &PlanePoint, j: usize, n: HDim) -> Result<HPoint> {
    n.check_index(j)?;
    if w.coords.len() != n.horizontal() {
        return Err(Error::DimensionMismatch { expected: n.horizontal(), got: w.coords.len() });
    }
    let mut x = Vec::with_capacity(n.horizontal());
    x.extend_from_slice(&w.coords[..j - 1]);
    x.push(0.0);
    x.extend_from_slice(&w.coords[j - 1..n.horizontal() - 1]);
    Ok(HPoint { x, t: w.s() })
}

/// A real function on ℝ^{2n} (or a coefficient function on ℝ^{2n-2}).
pub type RealFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A family `h_1, .., h_2n` defining `ρ_j(x, t) = (x̂_j, t + h_j(x))`.
#[derive(Clone)]
pub struct HeightFamily {
    n: HDim,
    h: Vec<RealFn>,
    /// Analytic `∂h_j/∂x_j`, the only derivative the rank condition needs.
    partial: Option<Vec<RealFn>>,
    degeneracy_flags: Vec<bool>,
    label: String,
}

impl fmt::Debug for HeightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HeightFamily")
            .field("n", &self.n)
            .field("label", &self.label)
            .field("analytic_partials", &self.partial.is_some())
            .field("degeneracy_flags", &self.degeneracy_flags)
            .finish()
    }
}

impl HeightFamily {
    pub fn new(
        n: HDim,
        h: Vec<RealFn>,
        partial: Option<Vec<RealFn>>,
        degeneracy_flags: Vec<bool>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let m = n.horizontal();
        if h.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: h.len() });
        }
        if let Some(p) = &partial {
            if p.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: p.len() });
            }
        }
        if degeneracy_flags.len() != n.n() {
            return Err(Error::DimensionMismatch { expected: n.n(), got: degeneracy_flags.len() });
        }
        Ok(Self { n, h, partial, degeneracy_flags, label: label.into() })
    }

    /// `h_j = x_j x_{n+j} / 2` for `j <= n`, `-x_{j-n} x_j / 2` otherwise.
    pub fn standard(n: HDim) -> Self {
        let nn = n.n();
        let mut h: Vec<RealFn> = Vec::new();
        let mut partial: Vec<RealFn> = Vec::new();
        for j in 1..=2 * nn {
            let m = partner(j, nn);
            let sign = if j <= nn { 0.5 } else { -0.5 };
            h.push(Arc::new(move |x: &[f64]| sign * x[j - 1] * x[m - 1]));
            partial.push(Arc::new(move |x: &[f64]| sign * x[m - 1]));
        }
        Self {
            n,
            h,
            partial: Some(partial),
            degeneracy_flags: vec![false; nn],
            label: "standard".into(),
        }
    }

    /// `h ≡ 0`: the Euclidean coordinate projections.
    pub fn zero(n: HDim) -> Self {
        let zero: RealFn = Arc::new(|_: &[f64]| 0.0);
        Self {
            n,
            h: vec![zero.clone(); n.horizontal()],
            partial: Some(vec![zero; n.horizontal()]),
            degeneracy_flags: vec![true; n.n()],
            label: "zero".into(),
        }
    }

    pub fn dim(&self) -> HDim {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn degeneracy_flags(&self) -> &[bool] {
        &self.degeneracy_flags
    }

    pub fn has_analytic_partials(&self) -> bool {
        self.partial.is_some()
    }

    /// `h_j(x)`, `j` 1-based.
    #[inline]
    pub fn height(&self, j: usize, x: &[f64]) -> f64 {
        (self.h[j - 1])(x)
    }

    /// Analytic `∂h_j/∂x_j` when available.
    pub fn own_partial(&self, j: usize, x: &[f64]) -> Option<f64> {
        self.partial.as_ref().map(|p| (p[j - 1])(x))
    }
}

/// `ρ_j` on flat coordinates. Writes NaN coordinates through if `h_j` fails.
#[inline]
pub fn rho_coords(p: &[f64], family: &HeightFamily, j: usize, out: &mut [f64]) {
    let h = family.n.horizontal();
    let s = p[h] + family.height(j, &p[..h]);
    write_hat(p, h, j, s, out);
}

pub fn rho_projection(p: &HPoint, j: usize, family: &HeightFamily) -> Result<PlanePoint> {
    let n = family.dim();
    p.check(n)?;
    n.check_index(j)?;
    let hv = family.height(j, &p.x);
    if !hv.is_finite() {
        return Err(Error::HeightEvaluation { index: j, at: p.x.clone() });
    }
    let mut out = vec![0.0; n.horizontal()];
    write_hat(&p.coords(), n.horizontal(), j, p.t + hv, &mut out);
    Ok(PlanePoint { coords: out })
}

/// Multi-index `(a_1, a_2)` of the monomial `x_k^{a_1} x_{n+k}^{a_2}`.
pub type MultiIndex = (u8, u8);

/// The five monomials allowed in a polynomial height family.
pub const POLY_MULTI_INDICES: [MultiIndex; 5] = [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2)];

/// Coefficients of a polynomial height family:
/// `h_j(x) = b_j x_k x_{n+k} + Σ_a c_{j,a}(x̂_{k,n+k}) x_k^{a_1} x_{n+k}^{a_2}`
/// where `k = j` or `k = j - n`.
#[derive(Clone)]
pub struct PolyHeightSpec {
    pub n: HDim,
    pub b: Vec<f64>,
    pub c: BTreeMap<(usize, MultiIndex), RealFn>,
}

impl PolyHeightSpec {
    /// Spec with every coefficient function constant, given by `coef(j, a)`.
    pub fn with_constant_coefficients(
        n: HDim,
        b: Vec<f64>,
        coef: impl Fn(usize, MultiIndex) -> f64,
    ) -> Self {
        let mut c = BTreeMap::new();
        for j in 1..=n.horizontal() {
            for a in POLY_MULTI_INDICES {
                let v = coef(j, a);
                let f: RealFn = Arc::new(move |_: &[f64]| v);
                c.insert((j, a), f);
            }
        }
        Self { n, b, c }
    }

    /// All `c ≡ 0`.
    pub fn bilinear(n: HDim, b: Vec<f64>) -> Self {
        Self::with_constant_coefficients(n, b, |_, _| 0.0)
    }
}

/// Remove coordinates `k` and `n+k` (1-based `k <= n`) from `x`.
pub fn hat_pair(x: &[f64], k: usize, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; x.len() - 2];
    hat_pair_into(x, k, n, &mut out);
    out
}

#[inline]
fn hat_pair_into(x: &[f64], k: usize, n: usize, out: &mut [f64]) {
    let mut o = 0;
    for (i, v) in x.iter().enumerate() {
        if i + 1 != k && i + 1 != k + n {
            out[o] = *v;
            o += 1;
        }
    }
}

#[inline]
fn powi(v: f64, e: u8) -> f64 {
    match e {
        0 => 1.0,
        1 => v,
        _ => v * v,
    }
}

pub fn poly_height_family(spec: &PolyHeightSpec) -> Result<HeightFamily> {
    let n = spec.n;
    let nn = n.n();
    if nn > 8 {
        return Err(Error::InvalidParameter(format!("polynomial families support n <= 8, got {nn}")));
    }
    if spec.b.len() != n.horizontal() {
        return Err(Error::DimensionMismatch { expected: n.horizontal(), got: spec.b.len() });
    }
    let mut h: Vec<RealFn> = Vec::with_capacity(2 * nn);
    let mut partial: Vec<RealFn> = Vec::with_capacity(2 * nn);
    for j in 1..=2 * nn {
        let k = if j <= nn { j } else { j - nn };
        let mut coefs: Vec<(MultiIndex, RealFn)> = Vec::with_capacity(5);
        for a in POLY_MULTI_INDICES {
            let f = spec
                .c
                .get(&(j, a))
                .ok_or(Error::MissingCoefficient { index: j, multi_index: a })?;
            coefs.push((a, f.clone()));
        }
        let coefs = Arc::new(coefs);
        let bj = spec.b[j - 1];
        let own_is_first = j <= nn;
        {
            let coefs = coefs.clone();
            h.push(Arc::new(move |x: &[f64]| {
                let (xk, xm) = (x[k - 1], x[k + nn - 1]);
                let mut buf = [0.0f64; 16];
                let rest = &mut buf[..2 * nn - 2];
                hat_pair_into(x, k, nn, rest);
                let mut v = bj * xk * xm;
                for (a, c) in coefs.iter() {
                    v += c(rest) * powi(xk, a.0) * powi(xm, a.1);
                }
                v
            }));
        }
        // c_{j,a} does not depend on x_k or x_{n+k}, so ∂h_j/∂x_j needs no
        // derivative of the coefficient functions.
        partial.push(Arc::new(move |x: &[f64]| {
            let (xk, xm) = (x[k - 1], x[k + nn - 1]);
            let mut buf = [0.0f64; 16];
            let rest = &mut buf[..2 * nn - 2];
            hat_pair_into(x, k, nn, rest);
            if own_is_first {
                let mut v = bj * xm;
                for (a, c) in coefs.iter() {
                    if a.0 > 0 {
                        v += c(rest) * f64::from(a.0) * powi(xk, a.0 - 1) * powi(xm, a.1);
                    }
                }
                v
            } else {
                let mut v = bj * xk;
                for (a, c) in coefs.iter() {
                    if a.1 > 0 {
                        v += c(rest) * powi(xk, a.0) * f64::from(a.1) * powi(xm, a.1 - 1);
                    }
                }
                v
            }
        }));
    }
    let flags = (1..=nn).map(|k| spec.b[k - 1] == spec.b[k + nn - 1]).collect();
    HeightFamily::new(n, h, Some(partial), flags, "polynomial")
}

/// Both evaluations of `det(Dρ_j Dρ_jᵀ) = 1 + (∂_{x_j} h_j)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankCertificate {
    pub analytic: Option<f64>,
    pub finite_difference: f64,
}

pub fn rank_certificate(family: &HeightFamily, j: usize, p: &HPoint) -> Result<RankCertificate> {
    let n = family.dim();
    p.check(n)?;
    n.check_index(j)?;
    let analytic = family.own_partial(j, &p.x).map(|d| 1.0 + d * d);
    let xj = p.x[j - 1];
    let step = 1e-5 * (1.0 + xj.abs());
    let mut xp = p.x.clone();
    let mut xm = p.x.clone();
    xp[j - 1] = xj + step;
    xm[j - 1] = xj - step;
    let d = (family.height(j, &xp) - family.height(j, &xm)) / (xp[j - 1] - xm[j - 1]);
    if !d.is_finite() {
        return Err(Error::HeightEvaluation { index: j, at: p.x.clone() });
    }
    Ok(RankCertificate { analytic, finite_difference: 1.0 + d * d })
}

/// Affine self-map of ℝ^{2n}: `w ↦ L w + b` with `L` stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePlaneMap {
    pub linear: Vec<f64>,
    pub offset: Vec<f64>,
}

impl AffinePlaneMap {
    pub fn identity(dim: usize) -> Self {
        let mut linear = vec![0.0; dim * dim];
        for i in 0..dim {
            linear[i * dim + i] = 1.0;
        }
        Self { linear, offset: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn apply(&self, w: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d)
            .map(|r| self.offset[r] + (0..d).map(|c| self.linear[r * d + c] * w[c]).sum::<f64>())
            .collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffinePlaneMap) -> AffinePlaneMap {
        let d = self.dim();
        let mut linear = vec![0.0; d * d];
        for r in 0..d {
            for c in 0..d {
                linear[r * d + c] = (0..d).map(|k| self.linear[r * d + k] * other.linear[k * d + c]).sum();
            }
        }
        let offset = self.apply(&other.offset);
        AffinePlaneMap { linear, offset }
    }

    /// Determinant of the linear part by partial-pivot elimination.
    pub fn determinant(&self) -> f64 {
        let d = self.dim();
        let mut a = self.linear.clone();
        let mut det = 1.0;
        for col in 0..d {
            let piv = (col..d)
                .max_by(|&i, &k| a[i * d + col].abs().total_cmp(&a[k * d + col].abs()))
                .unwrap();
            if a[piv * d + col] == 0.0 {
                return 0.0;
            }
            if piv != col {
                for c in 0..d {
                    a.swap(piv * d + c, col * d + c);
                }
                det = -det;
            }
            let pv = a[col * d + col];
            det *= pv;
            for r in col + 1..d {
                let f = a[r * d + col] / pv;
                for c in col..d {
                    a[r * d + c] -= f * a[col * d + c];
                }
            }
        }
        det
    }
}

/// The affine map `A` with `π_j(p · q) = A(π_j(q))` for all `q`.
///
/// Built by evaluating `w ↦ π_j(p · ι(w))` on the basis, where `ι` embeds
/// `W_j`; the map is exactly affine because `(p · ι(w))_j = p_j`.
pub fn translation_action_on_plane(p: &HPoint, j: usize, n: HDim) -> Result<AffinePlaneMap> {
    p.check(n)?;
    n.check_index(j)?;
    let d = n.horizontal();
    let image = |w: Vec<f64>| -> Result<Vec<f64>> {
        let q = embed_plane_point(&PlanePoint { coords: w }, j, n)?;
        Ok(vertical_projection(&group_product(p, &q, n)?, j, n)?.coords)
    };
    let offset = image(vec![0.0; d])?;
    let mut linear = vec![0.0; d * d];
    for c in 0..d {
        let mut e = vec![0.0; d];
        e[c] = 1.0;
        let col = image(e)?;
        for r in 0..d {
            linear[r * d + c] = col[r] - offset[r];
        }
    }
    Ok(AffinePlaneMap { linear, offset })
}

/// A map ℝ^{2n+1} → ℝ^{2n} used to project voxel sets and functions.
#[derive(Debug, Clone)]
pub enum PlaneProjection {
    /// Heisenberg vertical projection `π_j`.
    Vertical { n: HDim, j: usize },
    /// Generalized projection `ρ_j` for a height family.
    Rho { j: usize, family: HeightFamily },
    /// Euclidean coordinate projection deleting `x_j` (or `t` when `j = 2n+1`).
    Coordinate { n: HDim, j: usize },
}

impl PlaneProjection {
    pub fn vertical(n: HDim, j: usize) -> Result<Self> {
        n.check_index(j)?;
        Ok(Self::Vertical { n, j })
    }

    pub fn rho(family: HeightFamily, j: usize) -> Result<Self> {
        family.dim().check_index(j)?;
        Ok(Self::Rho { j, family })
    }

    pub fn coordinate(n: HDim, j: usize) -> Result<Self> {
        if j == 0 || j > n.ambient() {
            return Err(Error::IndexOutOfRange { index: j, max: n.ambient() });
        }
        Ok(Self::Coordinate { n, j })
    }

    pub fn dim(&self) -> HDim {
        match self {
            Self::Vertical { n, .. } | Self::Coordinate { n, .. } => *n,
            Self::Rho { family, .. } => family.dim(),
        }
    }

    /// Index of the deleted coordinate (1-based).
    pub fn index(&self) -> usize {
        match self {
            Self::Vertical { j, .. } | Self::Rho { j, .. } | Self::Coordinate { j, .. } => *j,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Vertical { j, .. } => format!("pi_{j}"),
            Self::Rho { j, family } => format!("rho_{j}[{}]", family.label()),
            Self::Coordinate { j, .. } => format!("euclid_{j}"),
        }
    }

    /// Apply to flat coordinates `p` (length `2n+1`), writing `2n` values.
    #[inline]
    pub fn apply(&self, p: &[f64], out: &mut [f64]) {
        match self {
            Self::Vertical { n, j } => project_coords(p, n.n(), *j, out),
            Self::Rho { j, family } => rho_coords(p, family, *j, out),
            Self::Coordinate { j, .. } => {
                let mut o = 0;
                for (i, &v) in p.iter().enumerate() {
                    if i + 1 != *j {
                        out[o] = v;
                        o += 1;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn h1() -> HDim {
        HDim::new(1).unwrap()
    }

    fn pt(c: &[f64]) -> HPoint {
        HPoint::from_coords(c).unwrap()
    }

    #[test]
    fn product_examples() {
        let n = h1();
        let p = pt(&[1.0, 0.0, 0.0]);
        let q = pt(&[0.0, 1.0, 0.0]);
        assert_eq!(group_product(&p, &q, n).unwrap(), pt(&[1.0, 1.0, 0.5]));
        let a = pt(&[0.3, -1.2, 2.5]);
        assert_eq!(group_product(&a, &HPoint::identity(n), n).unwrap(), a);
        assert_eq!(group_product(&a, &a.inverse(), n).unwrap(), HPoint::identity(n));
    }

    #[test]
    fn product_dimension_mismatch() {
        let n = HDim::new(2).unwrap();
        let p = pt(&[1.0, 0.0, 0.0]);
        assert!(matches!(group_product(&p, &p, n), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn dilation_examples() {
        let p = pt(&[1.0, 1.0, 1.0]);
        assert_eq!(dilate(&p, 2.0).unwrap(), pt(&[2.0, 2.0, 4.0]));
        assert_eq!(dilate(&p, 1.0).unwrap(), p);
        assert!(dilate(&p, 0.0).is_err());
        assert!(dilate(&p, -1.0).is_err());
    }

    #[test]
    fn koranyi_examples() {
        assert_eq!(koranyi_norm(&HPoint::identity(h1())), 0.0);
        assert!((koranyi_norm(&pt(&[3.0, 4.0, 0.0])) - 5.0).abs() < 1e-12);
        let p = pt(&[0.4, -0.7, 1.3]);
        let d = dilate(&p, 2.5).unwrap();
        assert!((koranyi_norm(&d) - 2.5 * koranyi_norm(&p)).abs() < 1e-12);
    }

    #[test]
    fn koranyi_distance_is_symmetric_and_left_invariant() {
        let n = h1();
        let p = pt(&[0.4, -0.7, 1.3]);
        let q = pt(&[-1.1, 0.2, 0.5]);
        let g = pt(&[2.0, 3.0, -1.0]);
        let d = koranyi_distance(&p, &q, n).unwrap();
        assert!((d - koranyi_distance(&q, &p, n).unwrap()).abs() < 1e-12);
        let gp = group_product(&g, &p, n).unwrap();
        let gq = group_product(&g, &q, n).unwrap();
        assert!((d - koranyi_distance(&gp, &gq, n).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn vertical_projection_examples() {
        let n = h1();
        let p = pt(&[2.0, 3.0, 1.0]);
        assert_eq!(vertical_projection(&p, 1, n).unwrap().coords, vec![3.0, 4.0]);
        assert_eq!(vertical_projection(&p, 2, n).unwrap().coords, vec![2.0, -2.0]);
        let w = pt(&[0.0, 3.0, 1.0]);
        assert_eq!(vertical_projection(&w, 1, n).unwrap().coords, vec![3.0, 1.0]);
        assert!(matches!(
            vertical_projection(&p, 3, n),
            Err(Error::IndexOutOfRange { index: 3, max: 2 })
        ));
    }

    #[test]
    fn rho_examples() {
        let n = h1();
        let std = HeightFamily::standard(n);
        let p = pt(&[2.0, 3.0, 1.0]);
        for j in 1..=2 {
            assert_eq!(rho_projection(&p, j, &std).unwrap(), vertical_projection(&p, j, n).unwrap());
        }
        let zero = HeightFamily::zero(n);
        assert_eq!(rho_projection(&p, 1, &zero).unwrap().coords, vec![3.0, 1.0]);

        let prod: RealFn = Arc::new(|x: &[f64]| x[0] * x[1]);
        let fam = HeightFamily::new(n, vec![prod.clone(), prod], None, vec![true], "xy").unwrap();
        assert_eq!(rho_projection(&pt(&[1.0, 2.0, 0.0]), 1, &fam).unwrap().coords, vec![2.0, 2.0]);

        let bad: RealFn = Arc::new(|_: &[f64]| f64::NAN);
        let fam = HeightFamily::new(n, vec![bad.clone(), bad], None, vec![false], "nan").unwrap();
        assert!(matches!(rho_projection(&p, 1, &fam), Err(Error::HeightEvaluation { .. })));
    }

    #[test]
    fn poly_family_examples() {
        let n = h1();
        let zero = poly_height_family(&PolyHeightSpec::bilinear(n, vec![0.0, 0.0])).unwrap();
        assert_eq!(zero.degeneracy_flags(), &[true]);
        assert_eq!(zero.height(1, &[1.3, 2.0]), 0.0);

        let std = poly_height_family(&PolyHeightSpec::bilinear(n, vec![0.5, -0.5])).unwrap();
        let reference = HeightFamily::standard(n);
        for x in [[1.0, 2.0], [-0.3, 0.7], [4.0, -5.0]] {
            for j in 1..=2 {
                assert_eq!(std.height(j, &x), reference.height(j, &x));
            }
        }
        assert_eq!(std.degeneracy_flags(), &[false]);

        let same = poly_height_family(&PolyHeightSpec::bilinear(n, vec![1.0, 1.0])).unwrap();
        assert_eq!(same.degeneracy_flags(), &[true]);

        let mut spec = PolyHeightSpec::bilinear(n, vec![1.0, 0.0]);
        spec.c.remove(&(2, (2, 0)));
        assert!(matches!(
            poly_height_family(&spec),
            Err(Error::MissingCoefficient { index: 2, multi_index: (2, 0) })
        ));
    }

    #[test]
    fn poly_family_with_coefficient_functions() {
        // n = 2, k = 1 uses (x_1, x_3); coefficients see (x_2, x_4).
        let n = HDim::new(2).unwrap();
        let mut spec = PolyHeightSpec::bilinear(n, vec![1.0, 2.0, -1.0, 0.5]);
        spec.c.insert((1, (2, 0)), Arc::new(|r: &[f64]| r[0] + 2.0 * r[1]));
        spec.c.insert((3, (0, 1)), Arc::new(|r: &[f64]| r[1]));
        let fam = poly_height_family(&spec).unwrap();
        let x = [0.5, -1.0, 2.0, 3.0];
        // h_1 = 1 * x1 x3 + (x2 + 2 x4) x1²
        assert!((fam.height(1, &x) - (0.5 * 2.0 + 5.0 * 0.25)).abs() < 1e-14);
        // h_3 = -1 * x1 x3 + x4 * x3
        assert!((fam.height(3, &x) - (-1.0 + 6.0)).abs() < 1e-14);
    }

    #[test]
    fn rank_certificate_examples() {
        let n = h1();
        let std = HeightFamily::standard(n);
        let c = rank_certificate(&std, 1, &HPoint::identity(n)).unwrap();
        assert_eq!(c.analytic, Some(1.0));
        assert!((c.finite_difference - 1.0).abs() < 1e-12);
        let c = rank_certificate(&std, 1, &pt(&[0.0, 2.0, 0.0])).unwrap();
        assert_eq!(c.analytic, Some(2.0));
    }

    #[test]
    fn translation_action_example() {
        let n = h1();
        let (a, b, c) = (0.7, -1.3, 0.4);
        let p = pt(&[a, b, c]);
        let map = translation_action_on_plane(&p, 2, n).unwrap();
        let (x, s) = (0.25, -2.0);
        let got = map.apply(&[x, s]);
        assert!((got[0] - (x + a)).abs() < 1e-14);
        assert!((got[1] - (s + c - a * b / 2.0 - b * x)).abs() < 1e-14);
        let id = translation_action_on_plane(&HPoint::identity(n), 1, n).unwrap();
        assert_eq!(id, AffinePlaneMap::identity(2));
    }

    #[test]
    fn determinant_of_known_matrix() {
        let m = AffinePlaneMap { linear: vec![2.0, 1.0, 1.0, 3.0], offset: vec![0.0, 0.0] };
        assert!((m.determinant() - 5.0).abs() < 1e-14);
    }

    fn arb_point(n: usize) -> impl Strategy<Value = HPoint> {
        (prop::collection::vec(-3.0f64..3.0, 2 * n), -3.0f64..3.0)
            .prop_map(|(x, t)| HPoint { x, t })
    }

    fn arb_n_point() -> impl Strategy<Value = (usize, HPoint, HPoint, HPoint)> {
        (1usize..=3).prop_flat_map(|n| (Just(n), arb_point(n), arb_point(n), arb_point(n)))
    }

    proptest! {
        #[test]
        fn associativity((n, p, q, r) in arb_n_point()) {
            let n = HDim::new(n).unwrap();
            let lhs = group_product(&group_product(&p, &q, n).unwrap(), &r, n).unwrap();
            let rhs = group_product(&p, &group_product(&q, &r, n).unwrap(), n).unwrap();
            for (a, b) in lhs.coords().iter().zip(rhs.coords()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn fibre_property((n, p, _q, _r) in arb_n_point(), s in -4.0f64..4.0, jsel in 0usize..6) {
            let nd = HDim::new(n).unwrap();
            let j = 1 + jsel % (2 * n);
            let w = vertical_projection(&p, j, nd).unwrap();
            let base = embed_plane_point(&w, j, nd).unwrap();
            let mut e = vec![0.0; 2 * n];
            e[j - 1] = s;
            let line = HPoint { x: e, t: 0.0 };
            let back = vertical_projection(&group_product(&base, &line, nd).unwrap(), j, nd).unwrap();
            for (a, b) in back.coords.iter().zip(&w.coords) {
                prop_assert!((a - b).abs() <= 1e-14 * (1.0 + b.abs()));
            }
        }

        #[test]
        fn projection_dilation_covariance((n, p, _q, _r) in arb_n_point(), r in 0.1f64..4.0, jsel in 0usize..6) {
            let nd = HDim::new(n).unwrap();
            let j = 1 + jsel % (2 * n);
            let w = vertical_projection(&p, j, nd).unwrap();
            let wd = vertical_projection(&dilate(&p, r).unwrap(), j, nd).unwrap();
            let m = wd.coords.len();
            for i in 0..m - 1 {
                prop_assert!((wd.coords[i] - r * w.coords[i]).abs() <= 1e-12 * (1.0 + wd.coords[i].abs()));
            }
            prop_assert!((wd.coords[m - 1] - r * r * w.coords[m - 1]).abs() <= 1e-12 * (1.0 + wd.coords[m - 1].abs()));
        }

        #[test]
        fn translation_action_matches_projection((n, p, q, p2) in arb_n_point(), jsel in 0usize..6) {
            let nd = HDim::new(n).unwrap();
            let j = 1 + jsel % (2 * n);
            let a = translation_action_on_plane(&p, j, nd).unwrap();
            let lhs = vertical_projection(&group_product(&p, &q, nd).unwrap(), j, nd).unwrap().coords;
            let rhs = a.apply(&vertical_projection(&q, j, nd).unwrap().coords);
            for (x, y) in lhs.iter().zip(&rhs) {
                prop_assert!((x - y).abs() < 1e-10);
            }
            prop_assert!((a.determinant() - 1.0).abs() < 1e-10);
            // homomorphism: A_p ∘ A_p2 = A_{p·p2}
            let a2 = translation_action_on_plane(&p2, j, nd).unwrap();
            let prod = translation_action_on_plane(&group_product(&p, &p2, nd).unwrap(), j, nd).unwrap();
            let comp = a.compose(&a2);
            for (x, y) in comp.linear.iter().chain(&comp.offset).zip(prod.linear.iter().chain(&prod.offset)) {
                prop_assert!((x - y).abs() < 1e-12 * (1.0 + x.abs()) * 10.0);
            }
        }

        #[test]
        fn rank_certificate_paths_agree(x in prop::collection::vec(-3.0f64..3.0, 4), t in -1.0f64..1.0,
                                        b in prop::collection::vec(-2.0f64..2.0, 4), cv in -1.0f64..1.0, j in 1usize..=4) {
            let n = HDim::new(2).unwrap();
            let spec = PolyHeightSpec::with_constant_coefficients(n, b, |jj, a| cv * (jj as f64) * f64::from(a.0 + 2 * a.1));
            let fam = poly_height_family(&spec).unwrap();
            let c = rank_certificate(&fam, j, &HPoint { x, t }).unwrap();
            let an = c.analytic.unwrap();
            prop_assert!(an >= 1.0 - 1e-9);
            prop_assert!(c.finite_difference >= 1.0 - 1e-9);
            prop_assert!((an - c.finite_difference).abs() < 1e-6);
        }
    }

    #[test]
    fn translation_action_determinant_sweep() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for nn in 1..=2 {
            let n = HDim::new(nn).unwrap();
            for _ in 0..100 {
                let x = (0..2 * nn).map(|_| rng.gen_range(-5.0..5.0)).collect();
                let p = HPoint { x, t: rng.gen_range(-5.0..5.0) };
                for j in 1..=2 * nn {
                    let d = translation_action_on_plane(&p, j, n).unwrap().determinant();
                    assert!((d - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}
