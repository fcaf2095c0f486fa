//! Horizontal perimeter by mollification, the isoperimetric ratio and the boundary projection check.

use hlw::grid::Region;
use hlw::heis::{HDim, HPoint};
use hlw::sobolev::{boundary_containment_check, isoperimetric_ratio, perimeter_estimate, PERIMETER_LADDER};

fn main() -> hlw::Result<()> {
    let n = HDim::new(1)?;
    let ball = Region::euclidean_ball(vec![0.0; 3], 1.0)?;
    let p = perimeter_estimate(&ball, n, PERIMETER_LADDER, 48)?;
    println!("P_H(ball) ≈ {:.4} at width {} cells; ladder {:?}", p.value, p.width, p.ladder);
    for region in [ball, Region::koranyi_ball(n, HPoint::identity(n), 1.0)?] {
        let row = isoperimetric_ratio(&region, n, 32)?;
        let c = boundary_containment_check(&region, n, 32)?;
        println!("{:<16} ratio {:.4}  boundary violations {}", region.label(), row.value, c.violations);
    }
    Ok(())
}
