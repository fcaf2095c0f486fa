use super::function::{horizontal_gradient, SampledFunction};
use crate::error::{Error, Result};
use crate::grid::{project_voxels, volume, GridFunction, RasterMode, TargetGrid, VoxelGrid};
use crate::heis::{HDim, PlaneProjection};
use crate::numeric::chunked_sum;
use serde::Serialize;

/// Dyadic level sets `F_k = {2^{k−1} ≤ |u| ≤ 2^k}` at cell centers.
#[derive(Debug, Clone)]
pub struct LevelSetDecomposition {
    /// Inclusive range of `k` with nonempty `F_k`; `None` when `u ≡ 0`.
    pub k_range: Option<(i32, i32)>,
    /// `sets[i]` is `F_{k_min + i}`.
    pub sets: Vec<VoxelGrid>,
}

impl LevelSetDecomposition {
    pub fn get(&self, k: i32) -> Option<&VoxelGrid> {
        let (lo, hi) = self.k_range?;
        (lo..=hi).contains(&k).then(|| &self.sets[(k - lo) as usize])
    }

    /// Rows `(k, cell_count, measure)`.
    pub fn table(&self) -> Vec<(i32, usize, f64)> {
        match self.k_range {
            None => Vec::new(),
            Some((lo, _)) => self.sets.iter().enumerate().map(|(i, s)| (lo + i as i32, s.count(), volume(s))).collect(),
        }
    }

    /// `Σ_k 2^{qk} |F_k|`, comparable to `∫ |u|^q` within a factor `2^q`.
    pub fn dyadic_sum(&self, q: f64) -> f64 {
        self.table().iter().map(|&(k, _, m)| 2f64.powf(q * k as f64) * m).sum()
    }
}

/// Levels `k` with `2^{k−1} ≤ v ≤ 2^k`; two of them when `v` is a power of two.
fn levels_of(v: f64) -> (i32, i32) {
    let k = v.log2().ceil() as i32;
    if 2f64.powi(k) == v {
        (k, k + 1)
    } else {
        (k, k)
    }
}

pub fn level_decomposition(u: &SampledFunction) -> LevelSetDecomposition {
    let g = &u.grid;
    let mut range: Option<(i32, i32)> = None;
    for &v in &g.samples {
        if v != 0.0 {
            let (a, b) = levels_of(v.abs());
            range = Some(range.map_or((a, b), |(lo, hi)| (lo.min(a), hi.max(b))));
        }
    }
    let Some((lo, hi)) = range else {
        return LevelSetDecomposition { k_range: None, sets: Vec::new() };
    };
    let mut bits = vec![vec![false; g.samples.len()]; (hi - lo + 1) as usize];
    for (flat, &v) in g.samples.iter().enumerate() {
        if v != 0.0 {
            let (a, b) = levels_of(v.abs());
            for k in a..=b {
                bits[(k - lo) as usize][flat] = true;
            }
        }
    }
    let sets = bits
        .iter()
        .map(|b| VoxelGrid::from_bools(g.spec.clone(), b).expect("matching length"))
        .collect();
    LevelSetDecomposition { k_range: Some((lo, hi)), sets }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelsetCheck {
    pub j: usize,
    pub k: i32,
    /// Cover-mode `|π_j(F_k)|`.
    pub lhs: f64,
    /// `2^{−k+2} ∫_{F_{k−1}} |X_j u|`.
    pub rhs: f64,
    /// `rhs / lhs`; infinite when `F_k` is empty.
    pub slack: f64,
    pub empty: bool,
}

/// Cells whose closed neighborhood takes values on both sides of, or inside,
/// the band `[lo, hi]`: the cells through which a fibre crossing the band passes.
fn band_crossing(g: &GridFunction, lo: f64, hi: f64) -> Vec<bool> {
    let d = g.dim();
    let strides = g.spec.strides();
    let shape = &g.spec.shape;
    let mut idx = vec![0usize; d];
    (0..g.samples.len())
        .map(|flat| {
            crate::numeric::unflatten(flat, shape, &mut idx);
            let v = g.samples[flat].abs();
            let (mut mn, mut mx) = (v, v);
            for a in 0..d {
                for (ok, off) in [(idx[a] + 1 < shape[a], strides[a] as isize), (idx[a] > 0, -(strides[a] as isize))] {
                    let w = if ok { g.samples[(flat as isize + off) as usize].abs() } else { 0.0 };
                    let mid = 0.5 * (v + w);
                    mn = mn.min(mid);
                    mx = mx.max(mid);
                }
            }
            mx >= lo && mn <= hi
        })
        .collect()
}

/// Which cells stand in for `F_{k−1}` in the lemma's right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BandCells {
    /// Cells whose center value lies in the band.
    Centers,
    /// Cells whose value range, extended halfway to each neighbor, meets the band.
    Crossing,
}

/// `|π_j(F_k)| ≤ 2^{−k+2} ∫_{F_{k−1}} |X_j u|` at grid scale.
pub fn levelset_lemma_check(u: &SampledFunction, j: usize, k: i32, n: HDim) -> Result<LevelsetCheck> {
    let dec = level_decomposition(u);
    let grads = horizontal_gradient(u, n)?;
    levelset_lemma_with(u, &dec, &grads, j, k, n, BandCells::Crossing)
}

pub(crate) fn levelset_lemma_with(
    u: &SampledFunction,
    dec: &LevelSetDecomposition,
    grads: &[GridFunction],
    j: usize,
    k: i32,
    n: HDim,
    band: BandCells,
) -> Result<LevelsetCheck> {
    if j == 0 || j > n.horizontal() {
        return Err(Error::IndexOutOfRange { index: j, max: n.horizontal() });
    }
    let g = &u.grid;
    let lo = 2f64.powi(k - 2);
    let hi = 2f64.powi(k - 1);
    let cells: Vec<bool> = match band {
        BandCells::Centers => g.samples.iter().map(|v| (lo..=hi).contains(&v.abs())).collect(),
        BandCells::Crossing => band_crossing(g, lo, hi),
    };
    let xj = &grads[j - 1];
    let rhs = 2f64.powi(2 - k)
        * chunked_sum(cells.len(), |i| if cells[i] { xj.samples[i].abs() } else { 0.0 })
        * g.spec.cell_volume();
    let lhs = match dec.get(k) {
        Some(fk) if fk.count() > 0 => {
            let cells_per_axis = *g.spec.shape.iter().max().expect("nonempty shape");
            let proj = PlaneProjection::vertical(n, j)?;
            volume(&project_voxels(fk, &proj, &TargetGrid::Cells(cells_per_axis), RasterMode::Cover)?)
        }
        _ => return Ok(LevelsetCheck { j, k, lhs: 0.0, rhs, slack: f64::INFINITY, empty: true }),
    };
    Ok(LevelsetCheck { j, k, lhs, rhs, slack: rhs / lhs, empty: false })
}

/// The lemma for every `j` and every nonempty `F_k`.
pub fn levelset_table(u: &SampledFunction, n: HDim, band: BandCells) -> Result<Vec<LevelsetCheck>> {
    let dec = level_decomposition(u);
    let grads = horizontal_gradient(u, n)?;
    let Some((lo, hi)) = dec.k_range else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for k in lo..=hi {
        for j in 1..=n.horizontal() {
            out.push(levelset_lemma_with(u, &dec, &grads, j, k, n, band)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers_of_two_sit_in_two_levels() {
        assert_eq!(levels_of(0.75), (0, 0));
        assert_eq!(levels_of(1.0), (0, 1));
        assert_eq!(levels_of(0.3), (-1, -1));
    }

    #[test]
    fn zero_function_is_empty() {
        let u = SampledFunction::from_fn(&[-1.0; 3], &[1.0; 3], 8, 1, |_| 0.0).unwrap();
        let d = level_decomposition(&u);
        assert!(d.k_range.is_none() && d.sets.is_empty());
    }

    #[test]
    fn plateau_lands_in_level_zero() {
        let u = SampledFunction::from_fn(&[-1.0; 3], &[1.0; 3], 16, 1, |p| {
            if p.iter().all(|v| v.abs() < 0.9) {
                0.75
            } else {
                0.0
            }
        })
        .unwrap();
        let d = level_decomposition(&u);
        assert_eq!(d.k_range, Some((0, 0)));
    }

    fn gauge_bump(cells: usize, amplitude: f64) -> SampledFunction {
        SampledFunction::from_fn(&[-1.2; 3], &[1.2, 1.2, 1.2], cells, 2, move |p| {
            let nn = crate::heis::koranyi_norm_coords(&p[..2], p[2]);
            if nn < 1.0 {
                amplitude * (1.0 - nn.powi(4)).powi(3)
            } else {
                0.0
            }
        })
        .unwrap()
    }

    #[test]
    fn lemma_holds_on_smooth_bump() {
        let u = gauge_bump(48, 3.0);
        let tab = levelset_table(&u, HDim::new(1).unwrap(), BandCells::Crossing).unwrap();
        assert!(!tab.is_empty());
        for c in tab.iter().filter(|c| !c.empty) {
            assert!(c.lhs <= 1.1 * c.rhs, "{c:?}");
        }
    }

    #[test]
    fn doubling_shifts_levels() {
        let n = HDim::new(1).unwrap();
        let u = gauge_bump(32, 3.0);
        let a = levelset_table(&u, n, BandCells::Crossing).unwrap();
        let b = levelset_table(&u.scaled(2.0), n, BandCells::Crossing).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.k + 1, y.k);
            assert_eq!(x.j, y.j);
            if !x.empty {
                assert!((x.slack - y.slack).abs() <= 1e-9 * x.slack, "{x:?} {y:?}");
            }
        }
    }

    #[test]
    fn dyadic_sum_brackets_lq_norm() {
        let u = gauge_bump(32, 3.0);
        let q = 4.0 / 3.0;
        let integral = u.grid.lp_norm(q).unwrap().powf(q);
        let d = level_decomposition(&u).dyadic_sum(q);
        assert!(d >= integral && d <= 2f64.powf(q) * integral, "{d} {integral}");
    }

    #[test]
    fn empty_level_is_flagged() {
        let n = HDim::new(1).unwrap();
        let u = gauge_bump(16, 3.0);
        let c = levelset_lemma_check(&u, 1, 40, n).unwrap();
        assert!(c.empty && c.lhs == 0.0 && c.slack.is_infinite());
    }
}
