//! Summation helpers.
//!
//! Every reduction in the crate goes through [`chunked_sum`], which splits the
//! index range into fixed-size chunks, accumulates each chunk with Kahan
//! compensation, and merges the partial sums in chunk order. The result is
//! bit-identical for any number of worker threads.

use rayon::prelude::*;
use std::ops::Range;

/// Chunk length used by [`chunked_sum`]. Changing it changes low-order bits.
pub const SUM_CHUNK: usize = 4096;

/// Kahan compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Sum of `term(i)` over `0..len`, deterministic across thread counts.
pub fn chunked_sum<F>(len: usize, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    chunked_sum_ranges(len, SUM_CHUNK, |r| {
        let mut acc = KahanSum::new();
        for i in r {
            acc.add(term(i));
        }
        acc.value()
    })
}

/// Like [`chunked_sum`], but the closure reduces a whole chunk at once.
pub fn chunked_sum_ranges<F>(len: usize, chunk: usize, partial: F) -> f64
where
    F: Fn(Range<usize>) -> f64 + Sync,
{
    let chunk = chunk.max(1);
    let n_chunks = len.div_ceil(chunk);
    let partials: Vec<f64> = (0..n_chunks)
        .into_par_iter()
        .map(|c| partial(c * chunk..((c + 1) * chunk).min(len)))
        .collect();
    partials.into_iter().collect::<KahanSum>().value()
}

/// Row-major strides for `shape` (last axis fastest).
pub fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; shape.len()];
    for a in (0..shape.len().saturating_sub(1)).rev() {
        s[a] = s[a + 1] * shape[a + 1];
    }
    s
}

/// Decode a flat row-major index into a multi-index.
#[inline]
pub fn unflatten(mut flat: usize, shape: &[usize], out: &mut [usize]) {
    for a in (0..shape.len()).rev() {
        out[a] = flat % shape[a];
        flat /= shape[a];
    }
}

/// Relative difference `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
