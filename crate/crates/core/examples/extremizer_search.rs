//! Compass search for sets with a large Loomis–Whitney ratio.

use hlw::heis::HDim;
use hlw::lw::{extremizer_search, h1_box_ratio, SearchConfig, SearchFamily};

fn main() -> hlw::Result<()> {
    let n = HDim::new(1)?;
    let config = SearchConfig { iterations: 15, restarts: 2, resolution: 24, ..SearchConfig::default() };
    let family = SearchFamily::parse("boxes")?;
    let r = extremizer_search(family, n, &config)?;
    println!("best {:.4} at {:?} after {} evaluations", r.best_ratio, r.best_params, r.trace.len());
    let b = &r.best_report;
    println!("bracket at {} cells: [{:.4}, {:.4}]", b.resolution, b.conservative, b.optimistic);
    println!("Heisenberg box ratio for comparison: {:.4}", h1_box_ratio());
    Ok(())
}
