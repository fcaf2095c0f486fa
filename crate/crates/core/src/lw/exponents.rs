use crate::error::{Error, Result};
use crate::heis::HDim;
use num_rational::Rational64;
use serde::Serialize;

/// Exact exponents of the Loomis–Whitney inequalities in `ℍⁿ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentTable {
    pub n: HDim,
    /// `n(2n+1)/(n+1)`, the Lebesgue exponent of the strong inequality.
    pub p_main: Rational64,
    /// `n(2n+1)/(2n²−1)`, the exponent dual to `p_main`.
    pub q_dual: Rational64,
    /// `q_k` for `k = 1..n`.
    pub q_k: Vec<Rational64>,
    /// `p_{j,k}` for `j = 1..2n−1` (outer) and `k = 1..n` (inner).
    pub p_jk: Vec<Vec<Rational64>>,
    /// `(n+1)/(n(2n+1))`, the power of each projection measure.
    pub lw_exponent: Rational64,
}

/// One exact identity of an [`ExponentTable`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

fn r(a: i64, b: i64) -> Rational64 {
    Rational64::new(a, b)
}

impl ExponentTable {
    pub fn p_jk(&self, j: usize, k: usize) -> Rational64 {
        self.p_jk[j - 1][k - 1]
    }

    /// Every identity the table must satisfy, evaluated exactly.
    pub fn identities(&self) -> Vec<IdentityCheck> {
        let n = self.n.n() as i64;
        let one = Rational64::from_integer(1);
        let mut out = Vec::new();
        let mut push = |name: String, lhs: Rational64, rhs: Rational64| {
            out.push(IdentityCheck { name, lhs: lhs.to_string(), rhs: rhs.to_string(), holds: lhs == rhs });
        };
        let inv_q: Rational64 = self.q_k.iter().map(|q| q.recip()).sum::<Rational64>() / n;
        push("1/q = mean_k 1/q_k".into(), self.q_dual.recip(), inv_q);
        push("1/p + 1/q = 1".into(), self.p_main.recip() + self.q_dual.recip(), one);
        push("lw exponent = 1/p".into(), self.lw_exponent, self.p_main.recip());
        for (j, row) in self.p_jk.iter().enumerate() {
            let mean: Rational64 = row.iter().map(|p| p.recip()).sum::<Rational64>() / n;
            push(format!("1/p = mean_k 1/p_{{{},k}}", j + 1), self.p_main.recip(), mean);
        }
        for (k, q) in self.q_k.iter().enumerate() {
            let expected = if (k as i64) + 1 < n { r(2 * n + 1, 2 * n) } else { r(2 * n + 1, 2 * n - 1) };
            push(format!("q_{}", k + 1), *q, expected);
        }
        out
    }

    pub fn all_identities_hold(&self) -> bool {
        self.identities().iter().all(|c| c.holds)
    }
}

pub fn exponent_table(n: HDim) -> Result<ExponentTable> {
    let m = n.n() as i64;
    let p_main = r(m * (2 * m + 1), m + 1);
    let q_dual = r(m * (2 * m + 1), 2 * m * m - 1);
    let q_k = (1..=m)
        .map(|k| if k < m { r(2 * m + 1, 2 * m) } else { r(2 * m + 1, 2 * m - 1) })
        .collect();
    let p_jk = (1..=2 * m - 1)
        .map(|j| {
            (1..=m)
                .map(|k| {
                    if k == j || k == j + m || k == j - m {
                        r(2 * m + 1, 2)
                    } else {
                        Rational64::from_integer(2 * m + 1)
                    }
                })
                .collect()
        })
        .collect();
    let table = ExponentTable { n, p_main, q_dual, q_k, p_jk, lw_exponent: r(m + 1, m * (2 * m + 1)) };
    if let Some(bad) = table.identities().into_iter().find(|c| !c.holds) {
        return Err(Error::InvalidParameter(format!("exponent identity {} fails: {} != {}", bad.name, bad.lhs, bad.rhs)));
    }
    Ok(table)
}

/// `f64` value of a rational.
pub fn to_f64(q: Rational64) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n1() {
        let t = exponent_table(HDim::new(1).unwrap()).unwrap();
        assert_eq!(t.p_main, r(3, 2));
        assert_eq!(t.q_dual, r(3, 1));
        assert_eq!(t.lw_exponent, r(2, 3));
    }

    #[test]
    fn n2() {
        let t = exponent_table(HDim::new(2).unwrap()).unwrap();
        assert_eq!(t.p_main, r(10, 3));
        assert_eq!(t.q_dual, r(10, 7));
        assert_eq!(t.q_k, vec![r(5, 4), r(5, 3)]);
        for row in &t.p_jk {
            for p in row {
                assert!(*p == r(5, 1) || *p == r(5, 2));
            }
        }
        assert_eq!(t.p_jk(1, 1), r(5, 2));
        assert_eq!(t.p_jk(1, 2), r(5, 1));
        assert_eq!(t.p_jk(3, 1), r(5, 2));
    }

    #[test]
    fn identities_hold_up_to_six() {
        for n in 1..=6 {
            let t = exponent_table(HDim::new(n).unwrap()).unwrap();
            assert!(t.all_identities_hold());
            assert_eq!(t.identities().len(), 3 + (2 * n - 1) + n);
        }
    }
}
