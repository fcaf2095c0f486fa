//! ∫ f₁(π₁p) f₂(π₂p) dp against ∫ Tf₁ · f₂ for two offset squares.

use hlw::experiments::fixtures::planar_box;
use hlw::planar::pairing_check;

fn main() -> hlw::Result<()> {
    let f1 = planar_box([-1.0, -1.0], [0.5, 0.5], 64)?;
    let f2 = planar_box([-0.5, -0.25], [1.0, 1.0], 64)?;
    for res in [16, 32, 64] {
        let r = pairing_check(&f1, &f2, res)?;
        println!("res {res:>2}: lhs {:.5} rhs {:.5} rel err {:.3e}", r.lhs, r.rhs, r.relative_error);
    }
    Ok(())
}
