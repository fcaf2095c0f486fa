use super::region::Region;
use super::spec::GridSpec;
use crate::error::{Error, Result};
use bitvec::prelude::*;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Extra empty cells added on every side of a rasterized region.
pub const RASTER_PAD: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RasterMode {
    /// Mark cells whose center lies in the set.
    Center,
    /// Mark cells with any member corner, then dilate by one cell.
    Cover,
}

/// Uniform occupancy grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelGrid {
    pub spec: GridSpec,
    pub occupancy: BitVec<u64, Lsb0>,
}

impl VoxelGrid {
    pub fn empty(spec: GridSpec) -> Self {
        let len = spec.len();
        Self { spec, occupancy: bitvec![u64, Lsb0; 0; len] }
    }

    pub fn from_bools(spec: GridSpec, cells: &[bool]) -> Result<Self> {
        if cells.len() != spec.len() {
            return Err(Error::DimensionMismatch { expected: spec.len(), got: cells.len() });
        }
        let occupancy = cells.iter().copied().collect();
        Ok(Self { spec, occupancy })
    }

    pub(crate) fn from_words(spec: GridSpec, words: Vec<u64>) -> Self {
        let len = spec.len();
        let mut occupancy = BitVec::<u64, Lsb0>::from_vec(words);
        occupancy.truncate(len);
        Self { spec, occupancy }
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn count(&self) -> usize {
        self.occupancy.count_ones()
    }

    pub fn is_occupied(&self, flat: usize) -> bool {
        self.occupancy[flat]
    }

    pub fn to_bools(&self) -> Vec<bool> {
        self.occupancy.iter().by_vals().collect()
    }

    /// Chebyshev dilation by `cells`.
    pub fn dilated(&self, cells: usize) -> Self {
        let mut b = self.to_bools();
        for _ in 0..cells {
            for a in 0..self.dim() {
                b = dilate_axis(&b, &self.spec.shape, a);
            }
        }
        Self::from_bools(self.spec.clone(), &b).expect("same shape")
    }

    /// Chebyshev erosion by `cells`; cells outside the grid count as empty.
    pub fn eroded(&self, cells: usize) -> Self {
        let mut b: Vec<bool> = self.occupancy.iter().by_vals().map(|v| !v).collect();
        for _ in 0..cells {
            for a in 0..self.dim() {
                b = dilate_axis_open(&b, &self.spec.shape, a);
            }
        }
        let inv: Vec<bool> = b.into_iter().map(|v| !v).collect();
        Self::from_bools(self.spec.clone(), &inv).expect("same shape")
    }

    /// Cells occupied here but not in `other` (same geometry required).
    pub fn minus(&self, other: &VoxelGrid) -> Result<Self> {
        if self.spec != other.spec {
            return Err(Error::InvalidParameter("grids differ in geometry".into()));
        }
        let mut occupancy = self.occupancy.clone();
        let mut not_other = other.occupancy.clone();
        not_other = !not_other;
        occupancy &= not_other;
        Ok(Self { spec: self.spec.clone(), occupancy })
    }
}

/// Occupied cell count times cell volume.
pub fn volume(grid: &VoxelGrid) -> f64 {
    grid.count() as f64 * grid.spec.cell_volume()
}

/// `out[i] = in[i-1] | in[i] | in[i+1]` along `axis`.
fn dilate_axis(b: &[bool], shape: &[usize], axis: usize) -> Vec<bool> {
    let stride: usize = shape[axis + 1..].iter().product();
    let len = shape[axis];
    let mut out = b.to_vec();
    out.par_chunks_mut(stride * len).enumerate().for_each(|(blk, chunk)| {
        let base = blk * stride * len;
        for i in 0..len {
            for s in 0..stride {
                let at = |k: usize| b[base + k * stride + s];
                let mut v = at(i);
                if i > 0 {
                    v |= at(i - 1);
                }
                if i + 1 < len {
                    v |= at(i + 1);
                }
                chunk[i * stride + s] = v;
            }
        }
    });
    out
}

/// Like [`dilate_axis`] but treats everything beyond the grid as set.
fn dilate_axis_open(b: &[bool], shape: &[usize], axis: usize) -> Vec<bool> {
    let stride: usize = shape[axis + 1..].iter().product();
    let len = shape[axis];
    let mut out = b.to_vec();
    out.par_chunks_mut(stride * len).enumerate().for_each(|(blk, chunk)| {
        let base = blk * stride * len;
        for i in 0..len {
            for s in 0..stride {
                let at = |k: usize| b[base + k * stride + s];
                let v = at(i) || i == 0 || i + 1 == len || at(i - 1) || at(i + 1);
                chunk[i * stride + s] = v;
            }
        }
    });
    out
}

/// `out[i] = in[i] | in[i+1]` along `axis`, shrinking that axis by one.
fn pair_or_axis(b: &[bool], shape: &[usize], axis: usize) -> (Vec<bool>, Vec<usize>) {
    let stride: usize = shape[axis + 1..].iter().product();
    let len = shape[axis];
    let mut new_shape = shape.to_vec();
    new_shape[axis] = len - 1;
    let blocks = b.len() / (stride * len);
    let mut out = vec![false; blocks * stride * (len - 1)];
    out.par_chunks_mut(stride * (len - 1)).enumerate().for_each(|(blk, chunk)| {
        let base = blk * stride * len;
        for i in 0..len - 1 {
            for s in 0..stride {
                chunk[i * stride + s] = b[base + i * stride + s] || b[base + (i + 1) * stride + s];
            }
        }
    });
    (out, new_shape)
}

/// Evaluate `pred` on every flat index, producing packed occupancy words.
pub(crate) fn par_bits(len: usize, pred: impl Fn(usize) -> bool + Sync) -> Vec<u64> {
    (0..len.div_ceil(64))
        .into_par_iter()
        .map(|w| {
            let mut word = 0u64;
            for b in 0..64 {
                let i = w * 64 + b;
                if i < len && pred(i) {
                    word |= 1 << b;
                }
            }
            word
        })
        .collect()
}

/// Grid geometry used by [`rasterize`]: `cells_per_axis` cells tile the
/// region's bounding box, plus [`RASTER_PAD`] empty cells on each side.
pub fn raster_spec(region: &Region, cells_per_axis: usize) -> Result<GridSpec> {
    if cells_per_axis < 2 {
        return Err(Error::InvalidParameter(format!(
            "cells_per_axis must be >= 2, got {cells_per_axis}"
        )));
    }
    GridSpec::covering(region.lo(), region.hi(), &vec![cells_per_axis; region.dim()], RASTER_PAD)
}

pub fn rasterize(region: &Region, cells_per_axis: usize, mode: RasterMode) -> Result<VoxelGrid> {
    let spec = raster_spec(region, cells_per_axis)?;
    rasterize_on(region, &spec, mode)
}

/// Rasterize onto an explicit grid.
pub fn rasterize_on(region: &Region, spec: &GridSpec, mode: RasterMode) -> Result<VoxelGrid> {
    let d = spec.dim();
    if d != region.dim() {
        return Err(Error::DimensionMismatch { expected: region.dim(), got: d });
    }
    if d > 15 {
        return Err(Error::InvalidParameter(format!("dense grids support dim <= 15, got {d}")));
    }
    match mode {
        RasterMode::Center => {
            let words = par_bits(spec.len(), |flat| {
                let mut idx = [0usize; 16];
                let mut p = [0.0f64; 16];
                spec.center_of(flat, &mut idx[..d], &mut p[..d]);
                region.contains(&p[..d])
            });
            Ok(VoxelGrid::from_words(spec.clone(), words))
        }
        RasterMode::Cover => {
            let lattice_shape: Vec<usize> = spec.shape.iter().map(|s| s + 1).collect();
            let lattice_len: usize = lattice_shape.iter().product();
            let mut corners: Vec<bool> = (0..lattice_len)
                .into_par_iter()
                .map(|flat| {
                    let mut idx = [0usize; 16];
                    crate::numeric::unflatten(flat, &lattice_shape, &mut idx[..d]);
                    let mut p = [0.0f64; 16];
                    for a in 0..d {
                        p[a] = spec.origin[a] + idx[a] as f64 * spec.spacing[a];
                    }
                    region.contains(&p[..d])
                })
                .collect();
            let mut shape = lattice_shape;
            for a in 0..d {
                let (c, s) = pair_or_axis(&corners, &shape, a);
                corners = c;
                shape = s;
            }
            for a in 0..d {
                corners = dilate_axis(&corners, &shape, a);
            }
            VoxelGrid::from_bools(spec.clone(), &corners)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_cube_two_cells_center() {
        let cube = Region::axis_box(vec![0.0; 3], vec![1.0; 3]).unwrap();
        let g = rasterize(&cube, 2, RasterMode::Center).unwrap();
        assert_eq!(g.count(), 8);
        assert!((volume(&g) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_region_is_empty() {
        let e = Region::empty(3);
        assert_eq!(rasterize(&e, 8, RasterMode::Center).unwrap().count(), 0);
        assert_eq!(rasterize(&e, 8, RasterMode::Cover).unwrap().count(), 0);
        assert_eq!(volume(&VoxelGrid::empty(raster_spec(&e, 4).unwrap())), 0.0);
    }

    #[test]
    fn heis_box_volume_is_exact_when_cells_tile() {
        let b = Region::heis_box(crate::heis::HDim::new(1).unwrap(), 1.0).unwrap();
        for c in [2, 7, 32] {
            let g = rasterize(&b, c, RasterMode::Center).unwrap();
            assert!((volume(&g) - 8.0).abs() < 1e-9, "c={c}");
        }
    }

    #[test]
    fn full_grid_volume_is_box_volume() {
        let spec = GridSpec::covering(&[0.0, -1.0], &[2.0, 2.0], &[5, 6], 0).unwrap();
        let g = VoxelGrid::from_bools(spec, &[true; 30]).unwrap();
        assert!((volume(&g) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn cover_contains_center() {
        let ball = Region::euclidean_ball(vec![0.1, -0.2, 0.05], 0.7).unwrap();
        let c = rasterize(&ball, 24, RasterMode::Center).unwrap();
        let o = rasterize(&ball, 24, RasterMode::Cover).unwrap();
        assert_eq!(c.minus(&o).unwrap().count(), 0);
        assert!(volume(&c) <= volume(&o));
    }

    #[test]
    fn cover_of_single_interior_corner_is_dilated_block() {
        // One lattice point inside: its 2^d incident cells, dilated once.
        let spec = GridSpec::covering(&[0.0, 0.0], &[8.0, 8.0], &[8, 8], 0).unwrap();
        let r = Region::new(vec![0.0, 0.0], vec![8.0, 8.0], "pt", |p| {
            (p[0] - 4.0).abs() < 1e-9 && (p[1] - 4.0).abs() < 1e-9
        })
        .unwrap();
        let g = rasterize_on(&r, &spec, RasterMode::Cover).unwrap();
        assert_eq!(g.count(), 16);
    }

    #[test]
    fn erosion_undoes_dilation_of_interior_block() {
        let spec = GridSpec::covering(&[0.0, 0.0], &[10.0, 10.0], &[10, 10], 0).unwrap();
        let mut b = vec![false; 100];
        for i in 3..6 {
            for j in 3..6 {
                b[i * 10 + j] = true;
            }
        }
        let g = VoxelGrid::from_bools(spec, &b).unwrap();
        assert_eq!(g.dilated(1).count(), 25);
        assert_eq!(g.dilated(1).eroded(1), g);
        assert_eq!(g.eroded(1).count(), 1);
    }

    #[test]
    fn ball_volume_at_128() {
        let ball = Region::euclidean_ball(vec![0.0; 3], 1.0).unwrap();
        let v = volume(&rasterize(&ball, 128, RasterMode::Center).unwrap());
        let exact = 4.0 * std::f64::consts::PI / 3.0;
        assert!((v - exact).abs() / exact < 0.02, "{v}");
    }
}
