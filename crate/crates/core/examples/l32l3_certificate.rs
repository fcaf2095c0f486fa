//! Empirical L^{3/2} → L³ certificates: the standard family against a degenerate bilinear one.

use hlw::heis::{poly_height_family, HDim, HeightFamily, PolyHeightSpec};
use hlw::planar::{l32l3_certificate, slice_grid, test_bank, NormSettings};

fn main() -> hlw::Result<()> {
    let n = HDim::new(2)?;
    let bank = test_bank(16, 1, 3)?;
    let windows = [16.0, 32.0, 64.0];
    let settings = NormSettings::default();

    let standard = l32l3_certificate(&HeightFamily::standard(n), &slice_grid(2, 2, 1.0), &bank, &windows, &settings)?;
    println!("{}: {:?}, constant ≥ {:.4}", standard.family, standard.verdict, standard.constant);

    let bilinear = poly_height_family(&PolyHeightSpec::bilinear(n, vec![1.0, 2.0, 1.0, 0.0]))?;
    let rep = l32l3_certificate(&bilinear, &[vec![0.3, -0.2]], &bank, &windows, &settings)?;
    for e in &rep.entries {
        println!("k = {}: {:?}, growth exponent {:.4}, ratios {:?}", e.k, e.verdict, e.exponent, e.ratios);
    }
    Ok(())
}
