//! Action-minimizing costs between point pairs, with their endpoint
//! derivatives.
//!
//! For the power family the minimizer is the geodesic run at constant
//! speed, so every computed cost can be compared against
//! `t^(1-r) d(x,y)^r` on the spot.

use lot::lagrangian::Lagrangian;
use lot::manifold::ManifoldModel;
use lot::minimizer::{cost, minimize, superdifferential};

fn main() -> Result<(), lot::LotError> {
    let m = ManifoldModel::hyperbolic2();
    let x = m.point(vec![-0.3, 0.1])?;
    let y = m.point(vec![0.25, -0.2])?;
    let d = m.dist(&x, &y);
    println!("hyperbolic pair at distance {d:.6}\n");

    println!("{:>5} {:>5} {:>14} {:>14} {:>10}", "r", "t", "cost", "closed form", "gap");
    for r in [1.5, 2.0, 3.0] {
        let lag = Lagrangian::power_metric(m.clone(), r)?;
        for t in [0.5, 1.0, 2.0] {
            let got = cost(&lag, &x, &y, t)?;
            let want = t.powf(1.0 - r) * d.powf(r);
            println!(
                "{r:>5} {t:>5} {got:>14.8} {want:>14.8} {:>10.1e}",
                (got - want).abs()
            );
        }
    }

    // The minimizing curve carries more than its action: its endpoint
    // momenta are the derivatives of the cost in each slot.
    let lag = Lagrangian::power_metric(m.clone(), 2.0)?;
    let curve = minimize(&lag, &x, &y, 1.0)?;
    let (dx, dy) = superdifferential(&curve);
    println!("\nr=2, t=1:");
    println!("  action        {:.8}", curve.action);
    println!("  d/dx cost     ({:+.6}, {:+.6})", dx[0], dx[1]);
    println!("  d/dy cost     ({:+.6}, {:+.6})", dy[0], dy[1]);

    let h = 1e-6;
    let xp = m.point(vec![x.coords[0] + h, x.coords[1]])?;
    let xm = m.point(vec![x.coords[0] - h, x.coords[1]])?;
    let fd = (cost(&lag, &xp, &y, 1.0)? - cost(&lag, &xm, &y, 1.0)?) / (2.0 * h);
    println!("  first slot by finite differences: {fd:+.6}");

    Ok(())
}
