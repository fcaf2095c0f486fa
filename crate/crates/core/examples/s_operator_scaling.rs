//! ‖S_β f‖₃ · β^{1/3} does not depend on the shear β.

use hlw::experiments::fixtures::planar_input;
use hlw::planar::{output_l3_norm, NormSettings, PlanarOperator, SCoeffs};

fn main() -> hlw::Result<()> {
    let f = planar_input("gaussian", 48)?;
    for beta in [0.5, 1.0, 2.0, 4.0] {
        let op = PlanarOperator::S(SCoeffs::shear(beta));
        let v = output_l3_norm(&op, &f, &NormSettings::default())?.value;
        println!("β = {beta}: ‖S f‖₃ = {v:.5}, times β^(1/3) = {:.5}", v * beta.cbrt());
    }
    Ok(())
}
