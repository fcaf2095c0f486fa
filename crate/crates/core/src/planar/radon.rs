use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::numeric::chunked_sum_ranges;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::io::Write;

/// Samples of `Rf(σ, s)` with `σ = (cos θ, sin θ)`.
///
/// Angles cover `[0, 2π)`: the computed half `[0, π)` is completed by
/// `Rf(θ + π, s) = Rf(θ, −s)`. Offsets are cell-centered and symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    pub angles: Vec<f64>,
    pub offsets: Vec<f64>,
    /// Row-major `angles × offsets`.
    pub samples: Vec<f64>,
}

impl Sinogram {
    pub fn d_angle(&self) -> f64 {
        2.0 * PI / self.angles.len() as f64
    }

    pub fn d_offset(&self) -> f64 {
        self.offsets[1] - self.offsets[0]
    }

    pub fn at(&self, angle: usize, offset: usize) -> f64 {
        self.samples[angle * self.offsets.len() + offset]
    }

    /// `‖Rf‖_{L^p(S¹ × ℝ)}`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("p must be >= 1, got {p}")));
        }
        let s = chunked_sum_ranges(self.samples.len(), 4096, |r| {
            self.samples[r].iter().map(|v| v.abs().powf(p)).sum()
        });
        Ok((s * self.d_angle() * self.d_offset()).powf(1.0 / p))
    }

    /// CSV: header `# 2 n_angles n_offsets θ_0 s_0 dθ ds`, one sample per line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# 2 {} {} {} {} {} {}",
            self.angles.len(),
            self.offsets.len(),
            self.angles[0],
            self.offsets[0],
            self.d_angle(),
            self.d_offset()
        )?;
        for v in &self.samples {
            writeln!(out, "{v}")?;
        }
        Ok(())
    }
}

/// Offsets and line sampling used by [`radon_transform_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadonSampling {
    /// Half-width of the offset range; `None` uses the support circumradius.
    pub radius: Option<f64>,
    /// Samples per line; `None` uses a step of half the smallest spacing.
    pub line_samples: Option<usize>,
}

/// Radius of the smallest origin-centered disk containing the support of `f`.
pub fn support_circumradius(f: &GridFunction) -> f64 {
    let up = f.spec.upper();
    let lo: Vec<f64> = (0..2).map(|a| f.spec.origin[a] - 0.5 * f.spec.spacing[a]).collect();
    let hi: Vec<f64> = (0..2).map(|a| up[a] + 0.5 * f.spec.spacing[a]).collect();
    let mut r: f64 = 0.0;
    for x in [lo[0], hi[0]] {
        for y in [lo[1], hi[1]] {
            r = r.max(x.hypot(y));
        }
    }
    r
}

pub fn radon_transform(f: &GridFunction, n_angles: usize, n_offsets: usize) -> Result<Sinogram> {
    radon_transform_with(f, n_angles, n_offsets, RadonSampling { radius: None, line_samples: None })
}

pub fn radon_transform_with(
    f: &GridFunction,
    n_angles: usize,
    n_offsets: usize,
    sampling: RadonSampling,
) -> Result<Sinogram> {
    if f.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: f.dim() });
    }
    if n_angles == 0 || n_offsets < 2 {
        return Err(Error::InvalidParameter("need n_angles >= 1 and n_offsets >= 2".into()));
    }
    let support = support_circumradius(f);
    let rho = sampling.radius.unwrap_or(support);
    if rho < support * (1.0 - 1e-12) {
        return Err(Error::SupportExceedsOffsets);
    }
    let line_n = sampling.line_samples.unwrap_or_else(|| {
        let step = 0.5 * f.spec.spacing[0].min(f.spec.spacing[1]);
        (2.0 * rho / step).ceil() as usize
    });
    if line_n == 0 {
        return Err(Error::InvalidParameter("line_samples must be positive".into()));
    }
    let ds = 2.0 * rho / n_offsets as f64;
    let offsets: Vec<f64> = (0..n_offsets).map(|k| -rho + (k as f64 + 0.5) * ds).collect();
    let dtau = 2.0 * rho / line_n as f64;
    let half: Vec<f64> = (0..n_angles * n_offsets)
        .into_par_iter()
        .map(|flat| {
            let theta = PI * (flat / n_offsets) as f64 / n_angles as f64;
            let s = offsets[flat % n_offsets];
            let (sn, cs) = theta.sin_cos();
            let mut acc = 0.0;
            for i in 0..line_n {
                let tau = -rho + (i as f64 + 0.5) * dtau;
                acc += f.interpolate2(s * cs - tau * sn, s * sn + tau * cs);
            }
            acc * dtau
        })
        .collect();
    let mut samples = half.clone();
    for a in 0..n_angles {
        for k in 0..n_offsets {
            samples.push(half[a * n_offsets + (n_offsets - 1 - k)]);
        }
    }
    let angles = (0..2 * n_angles).map(|a| PI * a as f64 / n_angles as f64).collect();
    Ok(Sinogram { angles, offsets, samples })
}
