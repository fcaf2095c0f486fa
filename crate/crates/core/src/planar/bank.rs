//! Nonnegative planar inputs used as witnesses for operator-norm lower bounds.

use crate::error::Result;
use crate::grid::{GridFunction, GridSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct BankMember {
    pub label: String,
    pub function: GridFunction,
}

fn member(label: &str, lo: [f64; 2], hi: [f64; 2], cells: [usize; 2], f: impl Fn(f64, f64) -> f64 + Sync) -> Result<BankMember> {
    let spec = GridSpec::covering(&lo, &hi, &cells, 2)?;
    Ok(BankMember { label: label.into(), function: GridFunction::from_fn(spec, |p| f(p[0], p[1])) })
}

fn ind(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Indicators, a Gaussian, stretched and parabolic-sheared indicators and
/// `random` seeded sums of smooth bumps, each with about `cells` cells along
/// its longer axis.
pub fn test_bank(cells: usize, random: usize, seed: u64) -> Result<Vec<BankMember>> {
    let c = cells.max(4);
    let q = (c / 4).max(4);
    let mut bank = vec![
        member("square", [-1.0, -1.0], [1.0, 1.0], [c, c], |x, y| ind(x.abs() < 1.0 && y.abs() < 1.0))?,
        member("disk", [-1.0, -1.0], [1.0, 1.0], [c, c], |x, y| ind(x * x + y * y <= 1.0))?,
        member("gaussian", [-2.5, -2.5], [2.5, 2.5], [c, c], |x, y| (-std::f64::consts::PI * (x * x + y * y)).exp())?,
        member("wide", [-2.0, -0.25], [2.0, 0.25], [c, q], |x, y| ind(x.abs() < 2.0 && y.abs() < 0.25))?,
        member("tall", [-0.25, -2.0], [0.25, 2.0], [q, c], |x, y| ind(x.abs() < 0.25 && y.abs() < 2.0))?,
        member("parabolic", [-1.0, -0.15], [1.0, 1.15], [c, c], |x, y| ind(x.abs() < 1.0 && (y - x * x).abs() < 0.15))?,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for r in 0..random {
        let bumps: Vec<(f64, f64, f64, f64)> = (0..4)
            .map(|_| {
                (
                    rng.gen_range(-0.6..0.6),
                    rng.gen_range(-0.6..0.6),
                    rng.gen_range(0.2..0.5),
                    rng.gen_range(0.3..1.0),
                )
            })
            .collect();
        bank.push(member(&format!("bumps{r}"), [-1.2, -1.2], [1.2, 1.2], [c, c], move |x, y| {
            bumps
                .iter()
                .map(|&(cx, cy, w, a)| {
                    let r2 = ((x - cx).powi(2) + (y - cy).powi(2)) / (w * w);
                    if r2 < 1.0 {
                        a * (1.0 - r2).powi(2)
                    } else {
                        0.0
                    }
                })
                .sum()
        })?);
    }
    Ok(bank)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn members_are_nonnegative_and_nonzero() {
        let bank = test_bank(32, 3, 1).unwrap();
        assert_eq!(bank.len(), 9);
        for m in &bank {
            assert!(m.function.is_nonnegative(), "{}", m.label);
            assert!(m.function.max_abs() > 0.0, "{}", m.label);
        }
    }

    #[test]
    fn seeded() {
        let a = test_bank(16, 2, 5).unwrap();
        let b = test_bank(16, 2, 5).unwrap();
        let c = test_bank(16, 2, 6).unwrap();
        assert_eq!(a[7].function.samples, b[7].function.samples);
        assert_ne!(a[7].function.samples, c[7].function.samples);
    }
}
