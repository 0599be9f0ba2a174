//! Integrates the two induced flows and watches the conserved quantity.

use lot::lagrangian::{default_steps, Lagrangian};
use lot::manifold::ManifoldModel;

fn main() -> Result<(), lot::LotError> {
    let m = ManifoldModel::sphere2(1.0);
    let lag = Lagrangian::power_metric(m.clone(), 2.0)?;

    let x = m.point(vec![0.2, -0.3])?;
    let v = m.tangent(x.clone(), vec![0.7, 0.4])?;
    let t = 2.0;
    let steps = default_steps(t);

    let traj = lag.euler_lagrange_flow(&v, t, steps)?;
    let end = traj.endpoint(&m)?;
    println!("flow on the sphere, {steps} steps over t={t}");
    println!("  endpoint          ({:+.6}, {:+.6})", end.coords[0], end.coords[1]);
    println!("  energy drift      {:.2e}", traj.energy_drift);

    // Same endpoint from the exponential map, since r=2 trajectories
    // are geodesics at constant speed.
    let geo = m.exp(&v, t)?;
    let gap = m.dist(&end, &geo);
    println!("  vs exponential    {gap:.2e}");

    // Momentum picture: convert the velocity to a covector and run the
    // cotangent lift instead.
    let p0 = lag.fiber_derivative(&x.coords, &v.components);
    let cot = lag.hamiltonian_flow(&x, &p0, t, steps)?;
    let cot_end = cot.endpoint(&m)?;
    println!("  cotangent lift    {:.2e} away", m.dist(&end, &cot_end));

    // Reverse the terminal velocity and flow back home.
    let back = m.tangent(
        end.clone(),
        cot.endpoint_velocity().iter().map(|c| -c).collect(),
    )?;
    let home = lag.euler_lagrange_flow(&back, t, steps)?.endpoint(&m)?;
    println!("  time reversal     {:.2e} from the start", m.dist(&home, &x));

    // Coarser grids trade accuracy for speed; drift scales like h^4.
    // Flat models conserve energy exactly (the momentum never moves),
    // so the study needs curvature to show anything.
    println!("\nstep-size study (sphere, r=3):");
    let lag3 = Lagrangian::power_metric(m.clone(), 3.0)?;
    for steps in [50, 100, 200, 400, 800] {
        let tr = lag3.euler_lagrange_flow(&v, 1.0, steps)?;
        println!("  {steps:>4} steps: drift {:.3e}", tr.energy_drift);
    }

    Ok(())
}
