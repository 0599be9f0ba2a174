//! Slides a measure along its optimal transport and checks the path is
//! exactly the one the theory promises.
//!
//! Each source atom rides its minimizing curve. Stopping at time s and
//! re-solving from there costs nothing extra, the stopped measure is
//! optimally paired with where it came from, and atoms never collide.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lot::interpolation::{
    build_path, verify_injectivity_and_inverse, verify_midpoint_optimality,
    verify_restriction_identity,
};
use lot::kantorovich::{cost_matrix, solve_exact, DiscreteMeasure};
use lot::lagrangian::Lagrangian;
use lot::manifold::ManifoldModel;
use lot::monge::map_from_potentials;

fn main() -> Result<(), lot::LotError> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let m = ManifoldModel::euclidean(2);
    let t = 2.0;
    let lag = Lagrangian::power_metric(m.clone(), 2.0)?;

    let mu = DiscreteMeasure::uniform(
        (0..15)
            .map(|_| m.point(vec![rng.gen::<f64>() - 1.5, rng.gen::<f64>()]).unwrap())
            .collect(),
    )?;
    let nu = DiscreteMeasure::uniform(
        (0..15)
            .map(|_| m.point(vec![rng.gen::<f64>() + 0.8, rng.gen::<f64>()]).unwrap())
            .collect(),
    )?;

    let c = cost_matrix(&lag, &mu, &nu, t)?;
    let (_, pot) = solve_exact(&c, &mu, &nu)?;
    let map = map_from_potentials(&lag, t, &pot.psi, &nu, &mu)?;

    let s_grid = [0.0, 0.5, 1.0, 1.5, 2.0];
    let path = build_path(&lag, t, &mu, &map, &s_grid)?;

    println!("15 atoms, horizon t={t}; barycenter of the moving measure:");
    for (k, s) in s_grid.iter().enumerate() {
        let meas = &path.measures[k];
        let (mut bx, mut by) = (0.0, 0.0);
        for (w, p) in meas.weights.iter().zip(&meas.support) {
            bx += w * p.coords[0];
            by += w * p.coords[1];
        }
        println!("  s={s:>4}: ({bx:+.4}, {by:+.4})");
    }

    println!("\ngates at the interior stops:");
    for &s in &s_grid[1..4] {
        let rest = verify_restriction_identity(&path, s)?;
        let mid = verify_midpoint_optimality(&path, s)?;
        let inj = verify_injectivity_and_inverse(&path, s)?;
        println!(
            "  s={s:>4}: restriction {:.1e}, midpoint gap {:.1e}, min image spacing {:.4}",
            rest.max_relative,
            (mid.lp_cost - mid.pairing_cost).abs(),
            inj.min_image_distance
        );
        assert!(rest.pass && mid.pass && inj.pass);
    }

    // The interpolant's total action equals the transport cost.
    let action: f64 = (0..path.curves.len())
        .map(|i| path.mu0.weights[i] * path.curves[i].action)
        .sum();
    let lp: f64 = solve_exact(&c, &mu, &nu)?.0.cost_against(&c);
    println!("\npath action {action:.10} vs transport cost {lp:.10}");

    Ok(())
}
