use super::bank::BankMember;
use super::norms::{windowed_l3_norm, NormSettings};
use super::ops::op_tk;
use crate::error::{Error, Result};
use crate::heis::HeightFamily;
use serde::Serialize;

/// Growth factor per window doubling at or above which a slice operator is
/// declared unbounded.
pub const DEGENERATE_GROWTH: f64 = 1.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Bounded,
    Degenerate,
}

#[derive(Debug, Clone, Serialize)]
pub struct SliceCertificate {
    pub k: usize,
    pub slice: Vec<f64>,
    /// Max ratio over the bank, per window.
    pub ratios: Vec<f64>,
    /// Label of the maximizing bank member, per window.
    pub witnesses: Vec<String>,
    /// Growth per doubling between the last two windows.
    pub growth: f64,
    /// `log₂` of the growth per doubling: `1/3` for `x`-independent outputs.
    pub exponent: f64,
    pub verdict: Verdict,
    /// Ratio at the largest window.
    pub constant: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub family: String,
    pub windows: Vec<f64>,
    pub entries: Vec<SliceCertificate>,
    pub verdict: Verdict,
    /// Largest constant over all entries; a lower bound for the true one.
    pub constant: f64,
}

impl CertificateReport {
    pub fn entries_for(&self, k: usize) -> impl Iterator<Item = &SliceCertificate> {
        self.entries.iter().filter(move |e| e.k == k)
    }
}

/// Empirical `L^{3/2} → L³` certificate for the slice operators of `family`.
///
/// For every `k` and slice, the largest windowed improving ratio over the
/// bank is recorded per window half-width. Windows must increase.
pub fn l32l3_certificate(
    family: &HeightFamily,
    slices: &[Vec<f64>],
    bank: &[BankMember],
    windows: &[f64],
    settings: &NormSettings,
) -> Result<CertificateReport> {
    if bank.is_empty() {
        return Err(Error::InvalidParameter("test bank is empty".into()));
    }
    if windows.len() < 2 || windows.windows(2).any(|w| !(w[1] > w[0])) || !(windows[0] > 0.0) {
        return Err(Error::InvalidParameter("need at least two increasing positive windows".into()));
    }
    let n = family.dim().n();
    let default_slice = [Vec::new()];
    let slices = if slices.is_empty() && n == 1 { &default_slice[..] } else { slices };
    if slices.is_empty() {
        return Err(Error::InvalidParameter("no slices given".into()));
    }
    let inputs: Vec<f64> = bank.iter().map(|m| m.function.lp_norm(1.5)).collect::<Result<_>>()?;
    let mut entries = Vec::new();
    for k in 1..=n {
        for slice in slices {
            let op = op_tk(family, k, slice)?;
            let mut ratios = vec![0.0; windows.len()];
            let mut witnesses = vec![String::new(); windows.len()];
            for (m, input) in bank.iter().zip(&inputs) {
                for (w, &width) in windows.iter().enumerate() {
                    let r = windowed_l3_norm(&op, &m.function, width, settings)? / input;
                    if r > ratios[w] {
                        ratios[w] = r;
                        witnesses[w] = m.label.clone();
                    }
                }
            }
            let l = windows.len();
            let growth = (ratios[l - 1] / ratios[l - 2]).powf(1.0 / (windows[l - 1] / windows[l - 2]).log2());
            let verdict = if growth >= DEGENERATE_GROWTH { Verdict::Degenerate } else { Verdict::Bounded };
            entries.push(SliceCertificate {
                k,
                slice: slice.clone(),
                constant: ratios[l - 1],
                exponent: growth.log2(),
                growth,
                verdict,
                ratios,
                witnesses,
            });
        }
    }
    let verdict = if entries.iter().any(|e| e.verdict == Verdict::Degenerate) {
        Verdict::Degenerate
    } else {
        Verdict::Bounded
    };
    let constant = entries.iter().map(|e| e.constant).fold(0.0, f64::max);
    Ok(CertificateReport { family: family.label().to_string(), windows: windows.to_vec(), entries, verdict, constant })
}

/// A `side × side` grid of slice points in `[-extent, extent]^{2n-2}`.
pub fn slice_grid(n: usize, side: usize, extent: f64) -> Vec<Vec<f64>> {
    let d = 2 * n - 2;
    if d == 0 {
        return vec![Vec::new()];
    }
    let coord = |i: usize| {
        if side <= 1 {
            0.0
        } else {
            -extent + 2.0 * extent * i as f64 / (side - 1) as f64
        }
    };
    let total = side.pow(d as u32);
    let mut idx = vec![0usize; d];
    (0..total)
        .map(|flat| {
            crate::numeric::unflatten(flat, &vec![side; d], &mut idx);
            idx.iter().map(|&i| coord(i)).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heis::{poly_height_family, HDim, PolyHeightSpec};
    use crate::planar::test_bank;

    const WINDOWS: [f64; 3] = [16.0, 32.0, 64.0];

    fn bilinear(b: Vec<f64>) -> HeightFamily {
        poly_height_family(&PolyHeightSpec::bilinear(HDim::new(b.len() / 2).unwrap(), b)).unwrap()
    }

    #[test]
    fn slice_grid_shape() {
        assert_eq!(slice_grid(1, 5, 1.0), vec![Vec::<f64>::new()]);
        let g = slice_grid(2, 5, 1.0);
        assert_eq!(g.len(), 25);
        assert_eq!(g[0], vec![-1.0, -1.0]);
        assert_eq!(g[24], vec![1.0, 1.0]);
    }

    #[test]
    fn degenerate_pair_grows_like_cube_root() {
        let bank = test_bank(24, 1, 3).unwrap();
        let fam = bilinear(vec![1.0, 2.0, 1.0, 0.0]);
        let rep = l32l3_certificate(&fam, &[vec![0.3, -0.2]], &bank, &WINDOWS, &NormSettings::default()).unwrap();
        let k1 = rep.entries_for(1).next().unwrap();
        assert_eq!(k1.verdict, Verdict::Degenerate);
        assert!((k1.exponent - 1.0 / 3.0).abs() < 1e-3, "{k1:?}");
        let k2 = rep.entries_for(2).next().unwrap();
        assert_eq!(k2.verdict, Verdict::Bounded);
        assert_eq!(rep.verdict, Verdict::Degenerate);
    }

    #[test]
    fn constants_scale_with_gap() {
        let bank = test_bank(24, 1, 3).unwrap();
        let one = l32l3_certificate(&bilinear(vec![1.0, 0.0]), &[], &bank, &WINDOWS, &NormSettings::default()).unwrap();
        let eight = l32l3_certificate(&bilinear(vec![8.0, 0.0]), &[], &bank, &WINDOWS, &NormSettings::default()).unwrap();
        assert_eq!(one.verdict, Verdict::Bounded);
        assert_eq!(eight.verdict, Verdict::Bounded);
        let q = eight.constant / one.constant;
        assert!((q / 0.5 - 1.0).abs() < 0.25, "{q}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let fam = HeightFamily::standard(HDim::new(1).unwrap());
        let bank = test_bank(8, 0, 0).unwrap();
        let s = NormSettings::default();
        assert!(l32l3_certificate(&fam, &[], &[], &WINDOWS, &s).is_err());
        assert!(l32l3_certificate(&fam, &[], &bank, &[4.0], &s).is_err());
        assert!(l32l3_certificate(&fam, &[], &bank, &[4.0, 2.0], &s).is_err());
    }
}
