//! Extracts single-valued transport maps three ways and shows they
//! agree: read off the plan, flowed from the dual potential, and the
//! closed displacement form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lot::kantorovich::{cost_matrix, solve_exact, DiscreteMeasure};
use lot::lagrangian::Lagrangian;
use lot::manifold::ManifoldModel;
use lot::monge::{dr_map, map_from_plan, map_from_potentials, pushforward_check};

fn main() -> Result<(), lot::LotError> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let m = ManifoldModel::euclidean(2);
    let r = 3.0;
    let lag = Lagrangian::power_metric(m.clone(), r)?;

    let mu = DiscreteMeasure::uniform(
        (0..12)
            .map(|_| {
                m.point(vec![rng.gen::<f64>() - 1.2, rng.gen::<f64>() - 0.5])
                    .unwrap()
            })
            .collect(),
    )?;
    let nu = DiscreteMeasure::uniform(
        (0..12)
            .map(|_| {
                m.point(vec![rng.gen::<f64>() + 0.4, rng.gen::<f64>() - 0.5])
                    .unwrap()
            })
            .collect(),
    )?;

    let c = cost_matrix(&lag, &mu, &nu, 1.0)?;
    let (plan, pot) = solve_exact(&c, &mu, &nu)?;

    let graph = map_from_plan(&plan, &mu, &nu);
    let flowed = map_from_potentials(&lag, 1.0, &pot.psi, &nu, &mu)?;

    println!("r={r}: three readings of the same map\n");
    println!("{:>4} {:>12} {:>12} {:>12}", "atom", "plan vs flow", "closed form", "landing");
    let mut worst = 0.0f64;
    for i in 0..flowed.len() {
        let via_plan = &graph.images[i];
        let via_flow = &flowed.images[i];
        let via_formula = dr_map(&m, r, &flowed.sources[i], &flowed.grads[i])?;
        let a = m.dist(via_plan, via_flow);
        let b = m.dist(via_flow, &via_formula);
        worst = worst.max(a).max(b);
        println!(
            "{i:>4} {a:>12.2e} {b:>12.2e} {:>12.2e}",
            flowed.residuals[i]
        );
    }
    println!("\nworst disagreement: {worst:.2e}");

    let push = pushforward_check(&flowed, &mu, &nu, &lag, 1.0)?;
    println!(
        "pushforward of the source: total variation {:.2e}, cost excess {:.2e}",
        push.tv_defect, push.cost_excess
    );

    Ok(())
}
