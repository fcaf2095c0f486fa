//! The Radon transform of a disk against its chord lengths, and ‖Tf‖₃ ≤ ‖Rf‖₃.

use hlw::experiments::fixtures::planar_input;
use hlw::planar::{output_l3_norm, radon_transform, NormSettings, PlanarOperator};

fn main() -> hlw::Result<()> {
    let disk = planar_input("disk", 128)?;
    let sino = radon_transform(&disk, 8, 129)?;
    let mid = sino.offsets.len() / 2;
    for i in [mid, mid + 32, mid + 56] {
        let s: f64 = sino.offsets[i];
        let chord = 2.0 * (1.0 - s * s).max(0.0).sqrt();
        println!("s = {s:+.3}: Rf = {:.4}, chord = {chord:.4}", sino.at(0, i));
    }
    let settings = NormSettings::default();
    for name in ["disk", "gaussian"] {
        let f = planar_input(name, 96)?;
        let t = output_l3_norm(&PlanarOperator::T, &f, &settings)?.value;
        let r = output_l3_norm(&PlanarOperator::Radon { n_angles: 128, n_offsets: 128 }, &f, &settings)?.value;
        println!("{name}: ‖Tf‖₃ = {t:.4}, ‖Rf‖₃ = {r:.4}");
    }
    Ok(())
}
