//! Dyadic level sets of a bump and the projection bound |π_j F_k| ≤ 2^{2−k} ∫_{F_{k−1}} |X_j u|.

use hlw::experiments::fixtures::gauge_bump;
use hlw::heis::{HDim, HPoint};
use hlw::sobolev::{level_decomposition, levelset_table, BandCells};

fn main() -> hlw::Result<()> {
    let n = HDim::new(1)?;
    let u = gauge_bump(n, &HPoint::identity(n), 1.0, 3.0, 48)?;
    for (k, cells, measure) in level_decomposition(&u).table() {
        println!("F_{k:<3} {cells:>6} cells  measure {measure:.5}");
    }
    let checks = levelset_table(&u, n, BandCells::Crossing)?;
    let worst = checks.iter().filter(|c| !c.empty).min_by(|a, b| a.slack.total_cmp(&b.slack));
    if let Some(c) = worst {
        println!("tightest: j={} k={} lhs {:.4} rhs {:.4} slack {:.3}", c.j, c.k, c.lhs, c.rhs, c.slack);
    }
    Ok(())
}
