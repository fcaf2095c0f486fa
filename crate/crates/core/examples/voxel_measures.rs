//! Rasterizing a region and measuring its vertical projections with brackets.

use hlw::grid::{measure_bracket, rasterize, volume, RasterMode, Region};
use hlw::heis::{HDim, HPoint, PlaneProjection};

fn main() -> hlw::Result<()> {
    let n = HDim::new(1)?;
    let ball = Region::koranyi_ball(n, HPoint::identity(n), 1.0)?;
    for res in [32, 64, 128] {
        let inner = volume(&rasterize(&ball, res, RasterMode::Center)?);
        let outer = volume(&rasterize(&ball, res, RasterMode::Cover)?);
        println!("res {res:>3}: |B| in [{inner:.4}, {outer:.4}]");
    }
    for j in 1..=2 {
        for b in measure_bracket(&ball, &PlaneProjection::vertical(n, j)?, &[32, 64, 128])? {
            println!("|π_{j} B| at {:>3}: [{:.4}, {:.4}]", b.resolution, b.lower, b.upper);
        }
    }
    Ok(())
}
