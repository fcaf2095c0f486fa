//! The set inequality |K| ≤ C ∏|π_j K|^{e} on Heisenberg boxes and the built-in suite.

use hlw::grid::Region;
use hlw::heis::HDim;
use hlw::lw::{h1_box_ratio, lw_exponent, lw_ratio, region_suite, sharpness_sweep};

fn main() -> hlw::Result<()> {
    let n = HDim::new(1)?;
    println!("exponent {:.4}, exact box ratio {:.5}", lw_exponent(n)?, h1_box_ratio());
    let table = sharpness_sweep(n, &[0.5, 1.0, 2.0], 96)?;
    for (r, row) in &table.rows {
        println!("box r = {r}: {:.5} in [{:.5}, {:.5}]", row.value, row.conservative, row.optimistic);
    }
    for region in region_suite()? {
        let row = lw_ratio(&region, n, 48)?;
        println!("{:<22} {:.4}", region.label(), row.value);
    }
    let h2 = HDim::new(2)?;
    let row = lw_ratio(&Region::heis_box(h2, 1.0)?, h2, 12)?;
    println!("ℍ² box at 12 cells: {:.4}", row.value);
    Ok(())
}
