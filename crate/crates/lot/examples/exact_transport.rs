//! Solves a discrete transport problem exactly and certifies the answer
//! with its dual potentials.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lot::kantorovich::{check_calibration, cost_matrix, solve_exact, DiscreteMeasure};
use lot::lagrangian::Lagrangian;
use lot::manifold::{ManifoldModel, Point};

fn cloud(rng: &mut ChaCha8Rng, m: &ManifoldModel, n: usize, center: [f64; 2]) -> Vec<Point> {
    (0..n)
        .map(|_| {
            let coords = vec![
                center[0] + 0.3 * (rng.gen::<f64>() - 0.5),
                center[1] + 0.3 * (rng.gen::<f64>() - 0.5),
            ];
            m.point(coords).unwrap()
        })
        .collect()
}

fn main() -> Result<(), lot::LotError> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let m = ManifoldModel::sphere2(1.0);
    let lag = Lagrangian::power_metric(m.clone(), 2.0)?;

    let mu = DiscreteMeasure::uniform(cloud(&mut rng, &m, 40, [-0.25, 0.0]))?;
    let nu = DiscreteMeasure::uniform(cloud(&mut rng, &m, 40, [0.25, 0.1]))?;

    let c = cost_matrix(&lag, &mu, &nu, 1.0)?;
    let (plan, pot) = solve_exact(&c, &mu, &nu)?;

    let primal = plan.cost_against(&c);
    let dual = pot.dual_objective(&mu, &nu);
    println!("40 vs 40 atoms on the sphere");
    println!("  transport cost   {primal:.10}");
    println!("  dual objective   {dual:.10}");
    println!("  duality gap      {:.2e}", (primal - dual).abs());

    let cal = check_calibration(&plan, &pot, &c, 1e-9);
    println!("  admissibility    {:.2e} (worst psi - phi - c)", cal.max_subsolution_residual);
    println!("  support equality {:.2e}", cal.max_support_gap);
    println!("  calibrated       {}", cal.pass);

    // Equal uniform weights force a permutation; print the first rows.
    println!("\nfirst five assignments:");
    for &(i, j, mass) in plan.entries.iter().take(5) {
        println!("  atom {i:>2} -> atom {j:>2}  mass {mass:.4}  cost {:.6}", c[i][j]);
    }

    Ok(())
}
