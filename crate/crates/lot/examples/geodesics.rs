//! Exponential map, logarithm and distance on the four built-in models.
//!
//! Shoots a geodesic from a base point, recovers the initial velocity
//! with the logarithm, and checks that arc length matches the distance.

use lot::manifold::ManifoldModel;

fn main() -> Result<(), lot::LotError> {
    let models = [
        ("euclidean", ManifoldModel::euclidean(2)),
        ("torus", ManifoldModel::torus(2)),
        ("sphere", ManifoldModel::sphere2(1.0)),
        ("hyperbolic", ManifoldModel::hyperbolic2()),
    ];

    for (name, m) in models {
        let x = m.point(vec![0.15, -0.1])?;
        let v = m.tangent(x.clone(), vec![0.4, 0.25])?;
        let y = m.exp(&v, 1.0)?;

        let back = m.log(&x, &y)?;
        let err = back
            .components
            .iter()
            .zip(&v.components)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);

        let speed = m.norm_at(&x, &v.components);
        let d = m.dist(&x, &y);

        println!("{name:>10}: endpoint ({:+.4}, {:+.4})", y.coords[0], y.coords[1]);
        println!("{:>10}  log recovers the velocity to {err:.1e}", "");
        println!("{:>10}  |v| = {speed:.6}, dist = {d:.6}", "");
    }

    // On the torus the chart wraps: a point pushed past 1 comes back
    // around, and distance is measured through the shorter winding.
    let t2 = ManifoldModel::torus(2);
    let a = t2.point(vec![0.95, 0.5])?;
    let b = t2.point(vec![0.05, 0.5])?;
    println!("\ntorus wrap: dist((.95,.5), (.05,.5)) = {:.6}", t2.dist(&a, &b));

    Ok(())
}
