//! Strong and vertex-type ratios for box indicators and Gaussians.

use hlw::experiments::fixtures::lw_inputs;
use hlw::heis::HDim;
use hlw::lw::{strong_ratio, vertex_ratio};

fn main() -> hlw::Result<()> {
    let n = HDim::new(1)?;
    for kind in ["boxes", "gaussians"] {
        let fs = lw_inputs(n, kind, 32)?;
        let s = strong_ratio(&fs, n, 48)?;
        let v = vertex_ratio(&fs, n, 1, 48)?;
        println!("{kind:<9} strong {:.4}  vertex {:.4}", s.value, v.value);
    }
    Ok(())
}
