//! Group law, dilations, the Korányi gauge and vertical projections in ℍ¹.

use hlw::heis::{
    dilate, group_product, koranyi_norm, translation_action_on_plane, vertical_projection, HDim, HPoint,
};

fn main() -> hlw::Result<()> {
    let n = HDim::new(1)?;
    let p = HPoint::new(vec![1.0, 0.0], 0.0)?;
    let q = HPoint::new(vec![0.0, 1.0], 0.0)?;
    let pq = group_product(&p, &q, n)?;
    let qp = group_product(&q, &p, n)?;
    println!("p·q = {:?}, q·p = {:?}", pq.coords(), qp.coords());
    println!("p·p⁻¹ = {:?}", group_product(&p, &p.inverse(), n)?.coords());

    let r = HPoint::new(vec![0.3, -0.7], 0.4)?;
    for s in [0.5, 1.0, 2.0] {
        println!("‖δ_{s} r‖ = {:.6}  s‖r‖ = {:.6}", koranyi_norm(&dilate(&r, s)?), s * koranyi_norm(&r));
    }

    for j in 1..=2 {
        println!("π_{j}(r) = {:?}", vertical_projection(&r, j, n)?.coords);
        let a = translation_action_on_plane(&p, j, n)?;
        println!("  translation by p acts on W_{j} with det {:.3}", a.determinant());
    }
    Ok(())
}
