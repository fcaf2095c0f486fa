//! ‖u‖_{L^{Q/(Q−1)}} against ∏‖X_j u‖₁^{1/2n} for a gauge bump, under rescaling.

use hlw::experiments::fixtures::gauge_bump;
use hlw::heis::{HDim, HPoint};
use hlw::sobolev::sobolev_ratio;

fn main() -> hlw::Result<()> {
    let n = HDim::new(1)?;
    for r in [0.5, 1.0, 2.0] {
        let u = gauge_bump(n, &HPoint::identity(n), r, 1.0, 64)?;
        let row = sobolev_ratio(&u, n)?;
        println!("radius {r}: {:.5} in [{:.5}, {:.5}]", row.value, row.conservative, row.optimistic);
    }
    Ok(())
}
