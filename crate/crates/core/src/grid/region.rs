use crate::error::{Error, Result};
use crate::heis::{group_product, koranyi_norm_coords, HDim, HPoint};
use std::fmt;
use std::sync::Arc;

pub type Membership = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// A compact set given by a membership predicate and a bounding box.
#[derive(Clone)]
pub struct Region {
    dim: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    membership: Membership,
    label: String,
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Region")
            .field("label", &self.label)
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .finish()
    }
}

impl Region {
    pub fn new(
        lo: Vec<f64>,
        hi: Vec<f64>,
        label: impl Into<String>,
        membership: impl Fn(&[f64]) -> bool + Send + Sync + 'static,
    ) -> Result<Self> {
        let dim = lo.len();
        if dim == 0 {
            return Err(Error::InvalidParameter("region dimension must be positive".into()));
        }
        if hi.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: hi.len() });
        }
        for a in 0..dim {
            if !(hi[a] > lo[a]) || !lo[a].is_finite() || !hi[a].is_finite() {
                return Err(Error::DegenerateBounds { axis: a, lo: lo[a], hi: hi[a] });
            }
        }
        Ok(Self { dim, lo, hi, membership: Arc::new(membership), label: label.into() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Membership, always false outside the bounding box.
    #[inline]
    pub fn contains(&self, p: &[f64]) -> bool {
        (0..self.dim).all(|a| p[a] >= self.lo[a] && p[a] <= self.hi[a]) && (self.membership)(p)
    }

    pub fn empty(dim: usize) -> Self {
        Self::new(vec![-1.0; dim], vec![1.0; dim], "empty", |_| false).expect("valid bounds")
    }

    /// Closed axis-aligned box.
    pub fn axis_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        Self::new(lo, hi, "box", |_| true)
    }

    /// `[-r, r]^{2n} × [-r², r²]`.
    pub fn heis_box(n: HDim, r: f64) -> Result<Self> {
        let mut half = vec![r; n.horizontal()];
        half.push(r * r);
        Self::centered_box(&half).map(|b| b.with_label(format!("heis_box(r={r})")))
    }

    /// `∏ [-w_a, w_a]`.
    pub fn centered_box(half_widths: &[f64]) -> Result<Self> {
        let lo = half_widths.iter().map(|w| -w).collect();
        Self::axis_box(lo, half_widths.to_vec())
    }

    pub fn euclidean_ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!("radius must be > 0, got {radius}")));
        }
        let lo = center.iter().map(|c| c - radius).collect();
        let hi = center.iter().map(|c| c + radius).collect();
        let r2 = radius * radius;
        Self::new(lo, hi, format!("ball(r={radius})"), move |p| {
            p.iter().zip(&center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() <= r2
        })
    }

    /// Korányi ball `{q : ‖center⁻¹ · q‖ <= radius}`.
    pub fn koranyi_ball(n: HDim, center: HPoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!("radius must be > 0, got {radius}")));
        }
        let mut lo = vec![-radius; n.horizontal()];
        lo.push(-radius * radius / 4.0);
        let hi: Vec<f64> = lo.iter().map(|v| -v).collect();
        let h = n.horizontal();
        let origin_ball = Self::new(lo, hi, "koranyi_ball", move |p| {
            koranyi_norm_coords(&p[..h], p[h]) <= radius
        })?;
        Ok(origin_ball.left_translate(&center)?.with_label(format!("koranyi_ball(r={radius})")))
    }

    pub fn union(a: &Region, b: &Region) -> Result<Self> {
        if a.dim != b.dim {
            return Err(Error::DimensionMismatch { expected: a.dim, got: b.dim });
        }
        let lo = (0..a.dim).map(|i| a.lo[i].min(b.lo[i])).collect();
        let hi = (0..a.dim).map(|i| a.hi[i].max(b.hi[i])).collect();
        let (a2, b2) = (a.clone(), b.clone());
        Self::new(lo, hi, format!("{}+{}", a.label, b.label), move |p| {
            a2.contains(p) || b2.contains(p)
        })
    }

    /// `a \ b`, bounded by `a`'s box.
    pub fn minus(a: &Region, b: &Region) -> Result<Self> {
        if a.dim != b.dim {
            return Err(Error::DimensionMismatch { expected: a.dim, got: b.dim });
        }
        let (a2, b2) = (a.clone(), b.clone());
        Self::new(a.lo.clone(), a.hi.clone(), format!("{}-{}", a.label, b.label), move |p| {
            a2.contains(p) && !b2.contains(p)
        })
    }

    fn heis_dim(&self) -> Result<HDim> {
        if self.dim < 3 || self.dim % 2 == 0 || self.dim > 15 {
            return Err(Error::InvalidParameter(format!(
                "region of dimension {} is not a subset of a Heisenberg group",
                self.dim
            )));
        }
        HDim::new((self.dim - 1) / 2)
    }

    /// The left translate `p · self`.
    pub fn left_translate(&self, p: &HPoint) -> Result<Self> {
        let n = self.heis_dim()?;
        if p.x.len() != n.horizontal() {
            return Err(Error::DimensionMismatch { expected: n.horizontal(), got: p.x.len() });
        }
        // Left translation is affine, so the image box is spanned by corner images.
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for mask in 0..(1usize << self.dim) {
            let c: Vec<f64> = (0..self.dim)
                .map(|a| if mask >> a & 1 == 1 { self.hi[a] } else { self.lo[a] })
                .collect();
            let img = group_product(p, &HPoint::from_coords(&c)?, n)?.coords();
            for a in 0..self.dim {
                lo[a] = lo[a].min(img[a]);
                hi[a] = hi[a].max(img[a]);
            }
        }
        let inner = self.clone();
        let pinv = p.inverse();
        let h = n.horizontal();
        Self::new(lo, hi, format!("{}@translated", self.label), move |q| {
            let mut back = [0.0f64; 16];
            let x = &q[..h];
            for i in 0..h {
                back[i] = pinv.x[i] + x[i];
            }
            back[h] = pinv.t + q[h] + 0.5 * crate::heis::symplectic(&pinv.x, x);
            inner.contains(&back[..=h])
        })
    }

    /// The Heisenberg dilate `δ_r(self)`.
    pub fn dilate(&self, r: f64) -> Result<Self> {
        let n = self.heis_dim()?;
        if !(r > 0.0) {
            return Err(Error::InvalidParameter(format!("dilation factor must be > 0, got {r}")));
        }
        let h = n.horizontal();
        let scale = |a: usize| if a < h { r } else { r * r };
        let lo = (0..self.dim).map(|a| scale(a) * self.lo[a]).collect();
        let hi = (0..self.dim).map(|a| scale(a) * self.hi[a]).collect();
        let inner = self.clone();
        Self::new(lo, hi, format!("{}@dilated({r})", self.label), move |q| {
            let mut back = [0.0f64; 16];
            for i in 0..h {
                back[i] = q[i] / r;
            }
            back[h] = q[h] / (r * r);
            inner.contains(&back[..=h])
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heis_box_membership() {
        let b = Region::heis_box(HDim::new(1).unwrap(), 2.0).unwrap();
        assert!(b.contains(&[2.0, -2.0, 4.0]));
        assert!(!b.contains(&[2.0, -2.0, 4.1]));
        assert_eq!(b.hi(), &[2.0, 2.0, 4.0]);
    }

    #[test]
    fn translate_then_back_is_identity() {
        let n = HDim::new(1).unwrap();
        let b = Region::heis_box(n, 1.0).unwrap();
        let p = HPoint::new(vec![0.3, -0.8], 0.2).unwrap();
        let t = b.left_translate(&p).unwrap();
        let q = HPoint::new(vec![0.5, 0.5], 0.9).unwrap();
        let pq = group_product(&p, &q, n).unwrap().coords();
        assert_eq!(b.contains(&q.coords()), t.contains(&pq));
        for a in 0..3 {
            assert!(t.lo()[a] <= pq[a] && pq[a] <= t.hi()[a]);
        }
    }

    #[test]
    fn koranyi_ball_contains_center_and_excludes_far_points() {
        let n = HDim::new(1).unwrap();
        let c = HPoint::new(vec![1.0, 2.0], 0.5).unwrap();
        let ball = Region::koranyi_ball(n, c.clone(), 0.5).unwrap();
        assert!(ball.contains(&c.coords()));
        assert!(!ball.contains(&[0.0, 0.0, 0.0]));
    }

    #[test]
    fn dilated_box_bounds() {
        let b = Region::heis_box(HDim::new(1).unwrap(), 1.0).unwrap().dilate(3.0).unwrap();
        assert_eq!(b.hi(), &[3.0, 3.0, 9.0]);
        assert!(b.contains(&[2.9, -2.9, 8.9]));
    }
}
