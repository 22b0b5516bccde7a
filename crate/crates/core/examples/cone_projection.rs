//! Projection of a queue vector onto the cone spanned by tight facet normals,
//! with its optimality certificate.

use htq::geometry::project_cone;

fn main() -> htq::Result<()> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let normals = vec![vec![s, s, 0.0], vec![0.0, s, s]];
    for x in [[3.0, 1.0, 0.0], [1.0, 4.0, 1.0], [-1.0, -1.0, 2.0]] {
        let p = project_cone(&x, &normals)?;
        println!(
            "x = {x:?}\n  parallel = {:.4?}\n  perp = {:.4?}\n  xi = {:.4?}\n  certified: {}",
            p.par,
            p.perp,
            p.xi,
            p.certify(&normals, 1e-9)
        );
    }
    Ok(())
}
