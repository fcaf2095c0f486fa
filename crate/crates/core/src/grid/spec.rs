use crate::error::{Error, Result};
use crate::numeric::{strides, unflatten};

/// Geometry of a uniform cell-centered grid: cell `i` along axis `a` spans
/// `[origin[a] + i·spacing[a], origin[a] + (i+1)·spacing[a])`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
    pub shape: Vec<usize>,
}

impl GridSpec {
    pub fn new(origin: Vec<f64>, spacing: Vec<f64>, shape: Vec<usize>) -> Result<Self> {
        let d = origin.len();
        if d == 0 {
            return Err(Error::InvalidParameter("grid dimension must be positive".into()));
        }
        if spacing.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: spacing.len() });
        }
        if shape.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: shape.len() });
        }
        for a in 0..d {
            if !(spacing[a] > 0.0) || !spacing[a].is_finite() || !origin[a].is_finite() {
                return Err(Error::DegenerateBounds {
                    axis: a,
                    lo: origin[a],
                    hi: origin[a] + spacing[a] * shape[a] as f64,
                });
            }
            if shape[a] == 0 {
                return Err(Error::InvalidParameter(format!("axis {a} has zero cells")));
            }
        }
        Ok(Self { origin, spacing, shape })
    }

    /// Grid whose `cells[a]` interior cells tile `[lo[a], hi[a]]` exactly,
    /// surrounded by `pad` extra cells on each side.
    pub fn covering(lo: &[f64], hi: &[f64], cells: &[usize], pad: usize) -> Result<Self> {
        let d = lo.len();
        if hi.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: hi.len() });
        }
        if cells.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: cells.len() });
        }
        let mut origin = Vec::with_capacity(d);
        let mut spacing = Vec::with_capacity(d);
        let mut shape = Vec::with_capacity(d);
        for a in 0..d {
            let ext = hi[a] - lo[a];
            if !(ext > 0.0) || !ext.is_finite() {
                return Err(Error::DegenerateBounds { axis: a, lo: lo[a], hi: hi[a] });
            }
            if cells[a] == 0 {
                return Err(Error::InvalidParameter(format!("axis {a} has zero cells")));
            }
            let h = ext / cells[a] as f64;
            origin.push(lo[a] - pad as f64 * h);
            spacing.push(h);
            shape.push(cells[a] + 2 * pad);
        }
        Ok(Self { origin, spacing, shape })
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn strides(&self) -> Vec<usize> {
        strides(&self.shape)
    }

    pub fn upper(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|a| self.origin[a] + self.spacing[a] * self.shape[a] as f64)
            .collect()
    }

    #[inline]
    pub fn center_axis(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + (i as f64 + 0.5) * self.spacing[axis]
    }

    /// Cell center of a flat index; `idx` is scratch space of length `dim`.
    #[inline]
    pub fn center_of(&self, flat: usize, idx: &mut [usize], out: &mut [f64]) {
        unflatten(flat, &self.shape, idx);
        for a in 0..self.dim() {
            out[a] = self.center_axis(a, idx[a]);
        }
    }

    /// Signed cell index containing coordinate `v` on `axis` (half-open cells).
    #[inline]
    pub fn cell_index(&self, axis: usize, v: f64) -> isize {
        ((v - self.origin[axis]) / self.spacing[axis]).floor() as isize
    }

    /// Flat index of the cell containing `p`, if inside the grid.
    pub fn locate(&self, p: &[f64]) -> Option<usize> {
        let mut flat = 0usize;
        for a in 0..self.dim() {
            let i = self.cell_index(a, p[a]);
            if i < 0 || i as usize >= self.shape[a] {
                return None;
            }
            flat = flat * self.shape[a] + i as usize;
        }
        Some(flat)
    }

    /// Same geometry with every axis refined by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            origin: self.origin.clone(),
            spacing: self.spacing.iter().map(|h| h / factor as f64).collect(),
            shape: self.shape.iter().map(|s| s * factor).collect(),
        }
    }
}

/// Visit every multi-index in the box `lo[a] ..= hi[a]`.
pub(crate) fn for_each_in_box(lo: &[usize], hi: &[usize], mut visit: impl FnMut(&[usize])) {
    let d = lo.len();
    if (0..d).any(|a| lo[a] > hi[a]) {
        return;
    }
    let mut idx = lo.to_vec();
    loop {
        visit(&idx);
        let mut a = d;
        loop {
            if a == 0 {
                return;
            }
            a -= 1;
            if idx[a] < hi[a] {
                idx[a] += 1;
                break;
            }
            idx[a] = lo[a];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covering_tiles_the_box() {
        let g = GridSpec::covering(&[-1.0, 0.0], &[1.0, 4.0], &[4, 8], 2).unwrap();
        assert_eq!(g.shape, vec![8, 12]);
        assert!((g.origin[0] + 2.0).abs() < 1e-15);
        assert!((g.spacing[1] - 0.5).abs() < 1e-15);
        assert!((g.center_axis(0, 2) + 0.75).abs() < 1e-15);
    }

    #[test]
    fn degenerate_bounds_rejected() {
        assert!(matches!(
            GridSpec::covering(&[0.0, 1.0], &[1.0, 1.0], &[4, 4], 0),
            Err(Error::DegenerateBounds { axis: 1, .. })
        ));
    }

    #[test]
    fn locate_uses_half_open_cells() {
        let g = GridSpec::covering(&[0.0], &[4.0], &[4], 0).unwrap();
        assert_eq!(g.locate(&[1.0]), Some(1));
        assert_eq!(g.locate(&[0.999]), Some(0));
        assert_eq!(g.locate(&[4.0]), None);
    }

    #[test]
    fn box_iteration_is_row_major() {
        let mut seen = Vec::new();
        for_each_in_box(&[1, 0], &[2, 1], |i| seen.push(i.to_vec()));
        assert_eq!(seen, vec![vec![1, 0], vec![1, 1], vec![2, 0], vec![2, 1]]);
    }
}
