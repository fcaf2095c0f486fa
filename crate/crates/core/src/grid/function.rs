use super::spec::GridSpec;
use crate::error::{Error, Result};
use crate::numeric::chunked_sum;
use rayon::prelude::*;

/// Real samples at the cell centers of a uniform grid.
///
/// Off-grid values use multilinear interpolation between cell centers, with
/// the function taken to be zero outside the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub spec: GridSpec,
    pub samples: Vec<f64>,
}

impl GridFunction {
    pub fn new(spec: GridSpec, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != spec.len() {
            return Err(Error::DimensionMismatch { expected: spec.len(), got: samples.len() });
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("samples must be finite".into()));
        }
        Ok(Self { spec, samples })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        let len = spec.len();
        Self { spec, samples: vec![0.0; len] }
    }

    /// Sample `f` at every cell center.
    pub fn from_fn(spec: GridSpec, f: impl Fn(&[f64]) -> f64 + Sync) -> Self {
        let d = spec.dim();
        let samples = (0..spec.len())
            .into_par_iter()
            .map_init(
                || (vec![0usize; d], vec![0.0; d]),
                |(idx, p), flat| {
                    spec.center_of(flat, idx, p);
                    f(p)
                },
            )
            .collect();
        Self { spec, samples }
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { spec: self.spec.clone(), samples: self.samples.iter().map(|v| c * v).collect() }
    }

    /// `a·self + b·other` on a shared grid.
    pub fn combine(&self, a: f64, other: &GridFunction, b: f64) -> Result<Self> {
        if self.spec != other.spec {
            return Err(Error::InvalidParameter("grids differ in geometry".into()));
        }
        let samples = self.samples.iter().zip(&other.samples).map(|(x, y)| a * x + b * y).collect();
        Ok(Self { spec: self.spec.clone(), samples })
    }

    pub fn is_nonnegative(&self) -> bool {
        self.samples.iter().all(|v| *v >= 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `∫ f` by the midpoint rule.
    pub fn integral(&self) -> f64 {
        chunked_sum(self.samples.len(), |i| self.samples[i]) * self.spec.cell_volume()
    }

    /// `(Σ |s|^p · cell volume)^{1/p}`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm(self, p)
    }

    /// Bounding box of the interpolant's support: nonzero cell centers
    /// widened by one spacing. `None` when identically zero.
    pub fn support_bounds(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let d = self.dim();
        let mut lo_i = vec![usize::MAX; d];
        let mut hi_i = vec![0usize; d];
        let mut idx = vec![0usize; d];
        let mut any = false;
        for (flat, v) in self.samples.iter().enumerate() {
            if *v != 0.0 {
                any = true;
                crate::numeric::unflatten(flat, &self.spec.shape, &mut idx);
                for a in 0..d {
                    lo_i[a] = lo_i[a].min(idx[a]);
                    hi_i[a] = hi_i[a].max(idx[a]);
                }
            }
        }
        if !any {
            return None;
        }
        let lo = (0..d).map(|a| self.spec.center_axis(a, lo_i[a]) - self.spec.spacing[a]).collect();
        let hi = (0..d).map(|a| self.spec.center_axis(a, hi_i[a]) + self.spec.spacing[a]).collect();
        Some((lo, hi))
    }

    /// Multilinear interpolation, zero outside the grid.
    pub fn interpolate(&self, p: &[f64]) -> f64 {
        let d = self.dim();
        if d == 2 {
            return self.interpolate2(p[0], p[1]);
        }
        let mut base = [0isize; 16];
        let mut frac = [0.0f64; 16];
        for a in 0..d {
            let s = (p[a] - self.spec.origin[a]) / self.spec.spacing[a] - 0.5;
            let f = s.floor();
            if !(f >= -1.0 && f < self.spec.shape[a] as f64) {
                return 0.0;
            }
            base[a] = f as isize;
            frac[a] = s - f;
        }
        let mut acc = 0.0;
        'corner: for mask in 0..(1usize << d) {
            let mut w = 1.0;
            let mut flat = 0usize;
            for a in 0..d {
                let bit = mask >> a & 1;
                let i = base[a] + bit as isize;
                if i < 0 || i as usize >= self.spec.shape[a] {
                    continue 'corner;
                }
                w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
                flat = flat * self.spec.shape[a] + i as usize;
            }
            acc += w * self.samples[flat];
        }
        acc
    }

    /// Bilinear interpolation for planar functions.
    #[inline]
    pub fn interpolate2(&self, u: f64, v: f64) -> f64 {
        let (nu, nv) = (self.spec.shape[0], self.spec.shape[1]);
        let su = (u - self.spec.origin[0]) / self.spec.spacing[0] - 0.5;
        let sv = (v - self.spec.origin[1]) / self.spec.spacing[1] - 0.5;
        let fu = su.floor();
        let fv = sv.floor();
        if !(fu >= -1.0 && fu < nu as f64 && fv >= -1.0 && fv < nv as f64) {
            return 0.0;
        }
        let (iu, iv) = (fu as isize, fv as isize);
        let (au, av) = (su - fu, sv - fv);
        let at = |i: isize, j: isize| -> f64 {
            if i < 0 || j < 0 || i as usize >= nu || j as usize >= nv {
                0.0
            } else {
                self.samples[i as usize * nv + j as usize]
            }
        };
        (1.0 - au) * ((1.0 - av) * at(iu, iv) + av * at(iu, iv + 1))
            + au * ((1.0 - av) * at(iu + 1, iv) + av * at(iu + 1, iv + 1))
    }
}

pub fn lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p must be >= 1, got {p}")));
    }
    let s = chunked_sum(f.samples.len(), |i| f.samples[i].abs().powf(p));
    Ok((s * f.spec.cell_volume()).powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(res: usize) -> GridFunction {
        let spec = GridSpec::covering(&[-1.0, -1.0], &[2.0, 2.0], &[3 * res, 3 * res], 0).unwrap();
        GridFunction::from_fn(spec, |p| if (0.0..1.0).contains(&p[0]) && (0.0..1.0).contains(&p[1]) { 1.0 } else { 0.0 })
    }

    #[test]
    fn unit_square_norms() {
        let f = square(16);
        for p in [1.0, 1.5, 3.0] {
            assert!((f.lp_norm(p).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(f.lp_norm(0.5).is_err());
    }

    #[test]
    fn norm_is_homogeneous() {
        let f = square(8);
        let g = f.scaled(-2.5);
        let (a, b) = (g.lp_norm(1.5).unwrap(), 2.5 * f.lp_norm(1.5).unwrap());
        assert!((a - b).abs() <= 1e-14 * b);
    }

    #[test]
    fn gaussian_l2_norm() {
        let spec = GridSpec::covering(&[-4.0, -4.0], &[4.0, 4.0], &[256, 256], 0).unwrap();
        let g = GridFunction::from_fn(spec, |p| (-std::f64::consts::PI * (p[0] * p[0] + p[1] * p[1])).exp());
        assert!((g.lp_norm(2.0).unwrap() - 0.5f64.sqrt()).abs() < 0.01 * 0.5f64.sqrt());
    }

    #[test]
    fn interpolation_reproduces_samples_and_vanishes_outside() {
        let spec = GridSpec::covering(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0], &[4, 4, 4], 0).unwrap();
        let f = GridFunction::from_fn(spec.clone(), |p| p[0] + 2.0 * p[1] - p[2]);
        let mut idx = [0; 3];
        let mut c = [0.0; 3];
        spec.center_of(17, &mut idx, &mut c);
        assert!((f.interpolate(&c) - f.samples[17]).abs() < 1e-14);
        // Linear functions are reproduced between centers.
        let q = [0.4, 0.55, 0.3];
        assert!((f.interpolate(&q) - (0.4 + 1.1 - 0.3)).abs() < 1e-12);
        assert_eq!(f.interpolate(&[2.0, 0.5, 0.5]), 0.0);
    }

    #[test]
    fn bilinear_between_centers_and_toward_zero_halo() {
        let spec = GridSpec::covering(&[0.0, 0.0], &[2.0, 2.0], &[2, 2], 0).unwrap();
        let f = GridFunction::new(spec, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((f.interpolate2(1.0, 1.0) - 2.5).abs() < 1e-15);
        assert!((f.interpolate2(0.0, 0.5) - 0.5).abs() < 1e-15);
        assert_eq!(f.interpolate2(-0.5, 0.5), 0.0);
        assert_eq!(f.interpolate(&[1.0, 1.0]), f.interpolate2(1.0, 1.0));
    }

    #[test]
    fn support_bounds_of_square() {
        let f = square(8);
        let (lo, hi) = f.support_bounds().unwrap();
        let h = 1.0 / 8.0;
        assert!((lo[0] - (h / 2.0 - h)).abs() < 1e-12);
        assert!((hi[1] - (1.0 - h / 2.0 + h)).abs() < 1e-12);
        assert!(GridFunction::zeros(f.spec.clone()).support_bounds().is_none());
    }
}
