//! Thin slabs and large cubes force the Euclidean exponent; Heisenberg projections of a cube grow like R³/4.

use hlw::lw::euclidean_counterexample;

fn main() -> hlw::Result<()> {
    let r = euclidean_counterexample(0.01, 10.0)?;
    println!("λ ≤ {:.4} from the slab, λ ≥ {:.4} from the cube", r.lambda_max, r.lambda_min);
    for (j, (c, o)) in r.heisenberg_projections_over_r3.iter().enumerate() {
        println!("|π_{} K_R|/R³ in [{c:.4}, {o:.4}], exact {:.4}", j + 1, r.heisenberg_exact_over_r3);
    }
    Ok(())
}
