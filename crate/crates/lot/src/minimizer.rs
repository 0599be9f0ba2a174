//! Action-minimizing curves between endpoint pairs and the two-point
//! costs they induce.
//!
//! `minimize` solves the boundary-value problem "flow from `x` for time
//! `t`, land on `y`" over the initial velocity. For the power-of-metric
//! family the minimizers are constant-speed minimizing geodesics, so
//! `log(x, y) / t` is an exact seed and the only remaining work is
//! candidate enumeration (torus translates, sphere arcs) plus an
//! integration pass that realizes the curve as an actual flow. Custom
//! Lagrangians go through damped shooting Newton from a straight-line
//! seed, with a collocation descent as the re-seeding fallback.
//!
//! Every accepted curve is flow-realized: its trajectory is the output
//! of the same integrator the rest of the crate uses, and its action is
//! a Simpson sum along that trajectory, never a formula.

use crate::error::{LotError, Result};
use crate::lagrangian::{default_steps, Lagrangian, Trajectory};
use crate::linalg;
use crate::manifold::{wrapped_delta, ManifoldKind, Point, Tangent};
use crate::tol;

/// An action minimizer from `start` to `end` in time `t`, realized as a
/// sampled flow of the Lagrangian's Euler-Lagrange dynamics.
#[derive(Debug, Clone)]
pub struct Curve {
    pub t: f64,
    pub start: Point,
    pub end: Point,
    pub trajectory: Trajectory,
    pub action: f64,
}

impl Curve {
    pub fn initial_velocity(&self) -> &[f64] {
        &self.trajectory.velocities[0]
    }

    pub fn final_velocity(&self) -> &[f64] {
        self.trajectory.velocities.last().unwrap()
    }

    pub fn initial_momentum(&self) -> &[f64] {
        &self.trajectory.momenta[0]
    }

    pub fn final_momentum(&self) -> &[f64] {
        self.trajectory.momenta.last().unwrap()
    }
}

/// Composite Simpson over a trajectory's Lagrangian samples. Step
/// counts are even by construction (multiples of 200).
pub fn simpson_action(l: &Lagrangian, traj: &Trajectory) -> f64 {
    let n = traj.times.len() - 1;
    assert!(n >= 2 && n % 2 == 0, "even interval count required");
    let h = (traj.times[n] - traj.times[0]) / n as f64;
    let lag = |i: usize| l.value(&traj.positions[i], &traj.velocities[i]);
    let mut acc = lag(0) + lag(n);
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * lag(i);
    }
    acc * h / 3.0
}

/// One candidate initial velocity together with the analytic action it
/// would earn if the dynamics are the power family (where candidate
/// curves are constant-speed geodesics of known length).
struct Candidate {
    v0: Vec<f64>,
    analytic_action: f64,
}

fn power_candidates(l: &Lagrangian, x: &Point, y: &Point, t: f64, r: f64) -> Result<Vec<Candidate>> {
    let m = &l.manifold;
    let act = |len: f64| t.powf(1.0 - r) * len.powf(r);
    match m.kind {
        ManifoldKind::Euclidean | ManifoldKind::Hyperbolic2 => {
            let delta = m.log(x, y)?;
            let len = m.norm_at(x, &delta.components);
            Ok(vec![Candidate { v0: linalg::scale(&delta.components, 1.0 / t), analytic_action: act(len) }])
        }
        ManifoldKind::Torus => {
            // Displacements decompose per axis; only axes whose wrapped
            // offset sits near half a period can produce a competing
            // translate, so enumerate flips of those axes alone.
            let base = wrapped_delta(&x.coords, &y.coords);
            let near: Vec<usize> =
                (0..base.len()).filter(|&j| base[j].abs() >= 0.45).collect();
            if near.len() > 16 {
                return Err(LotError::Precondition(
                    "too many near-tie axes on the torus".into(),
                ));
            }
            let mut out = Vec::new();
            for mask in 0..(1usize << near.len()) {
                let mut w = base.clone();
                for (bit, &j) in near.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        w[j] -= w[j].signum();
                    }
                }
                let len = linalg::norm(&w);
                out.push(Candidate { v0: linalg::scale(&w, 1.0 / t), analytic_action: act(len) });
            }
            Ok(out)
        }
        ManifoldKind::Sphere2 => {
            let delta = match m.log(x, y) {
                Ok(d) => d,
                Err(LotError::AmbiguousLog(_)) => {
                    return Err(LotError::AmbiguousMinimizer(
                        "antipodal endpoints: a full circle of minimizing geodesics".into(),
                    ))
                }
                Err(e) => return Err(e),
            };
            let d = m.norm_at(x, &delta.components);
            if d == 0.0 {
                return Ok(vec![Candidate { v0: vec![0.0; m.dim], analytic_action: 0.0 }]);
            }
            let circ = 2.0 * std::f64::consts::PI * m.radius();
            let minor = Candidate {
                v0: linalg::scale(&delta.components, 1.0 / t),
                analytic_action: act(d),
            };
            let major = Candidate {
                v0: linalg::scale(&delta.components, -(circ - d) / (d * t)),
                analytic_action: act(circ - d),
            };
            Ok(vec![minor, major])
        }
    }
}

/// Flow endpoint residual against the target, wrapped per axis on the
/// torus so translates of the target count as hits.
fn endpoint_residual(l: &Lagrangian, traj: &Trajectory, y: &Point) -> Vec<f64> {
    let end = traj.positions.last().unwrap();
    match l.manifold.kind {
        ManifoldKind::Torus => wrapped_delta(&y.coords, end),
        _ => linalg::sub(end, &y.coords),
    }
}

fn shoot(l: &Lagrangian, x: &Point, v0: &[f64], t: f64, steps: usize) -> Result<Trajectory> {
    let tangent = Tangent { base: x.clone(), components: v0.to_vec() };
    l.euler_lagrange_flow(&tangent, t, steps)
}

/// Damped Newton on the shooting residual, finite-difference Jacobian.
/// Returns the converged trajectory or the best residual norm reached.
fn newton_shoot(
    l: &Lagrangian,
    x: &Point,
    y: &Point,
    t: f64,
    steps: usize,
    seed: &[f64],
) -> std::result::Result<Trajectory, f64> {
    let n = seed.len();
    let mut v = seed.to_vec();
    let mut traj = match shoot(l, x, &v, t, steps) {
        Ok(tr) => tr,
        Err(_) => return Err(f64::INFINITY),
    };
    let mut res = endpoint_residual(l, &traj, y);
    let mut best = linalg::norm(&res);
    for _ in 0..25 {
        if best <= tol::SHOOTING_RESIDUAL {
            return Ok(traj);
        }
        let mut jac = nalgebra::DMatrix::<f64>::zeros(n, n);
        let mut failed = false;
        for j in 0..n {
            let h = 1e-6 * (1.0 + v[j].abs());
            let mut vp = v.clone();
            vp[j] += h;
            let mut vm = v.clone();
            vm[j] -= h;
            let (tp, tm) = match (shoot(l, x, &vp, t, steps), shoot(l, x, &vm, t, steps)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => {
                    failed = true;
                    break;
                }
            };
            let rp = endpoint_residual(l, &tp, y);
            let rm = endpoint_residual(l, &tm, y);
            for i in 0..n {
                jac[(i, j)] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        if failed {
            return Err(best);
        }
        let rhs = nalgebra::DVector::from_iterator(n, res.iter().map(|r| -r));
        let Some(dv) = jac.lu().solve(&rhs) else { return Err(best) };
        let mut s = 1.0;
        let mut advanced = false;
        while s >= 1.0 / 1024.0 {
            let trial: Vec<f64> = (0..n).map(|i| v[i] + s * dv[i]).collect();
            if let Ok(tr) = shoot(l, x, &trial, t, steps) {
                let r = endpoint_residual(l, &tr, y);
                let rn = linalg::norm(&r);
                if rn < best {
                    v = trial;
                    traj = tr;
                    res = r;
                    best = rn;
                    advanced = true;
                    break;
                }
            }
            s /= 2.0;
        }
        if !advanced {
            return Err(best);
        }
    }
    if best <= tol::SHOOTING_RESIDUAL {
        Ok(traj)
    } else {
        Err(best)
    }
}

/// Piecewise-linear action descent used purely to seed shooting when
/// the straight-line seed stalls: nonlinear conjugate gradient on the
/// midpoint-rule action over 32 segments.
fn collocation_seed(l: &Lagrangian, x: &Point, y: &Point, t: f64) -> Vec<f64> {
    let segs = 32usize;
    let n = x.coords.len();
    let h = t / segs as f64;
    let mut z: Vec<Vec<f64>> = (0..=segs)
        .map(|i| {
            let a = i as f64 / segs as f64;
            (0..n).map(|k| x.coords[k] * (1.0 - a) + y.coords[k] * a).collect()
        })
        .collect();
    let grad = |z: &[Vec<f64>]| -> Vec<Vec<f64>> {
        let mut g = vec![vec![0.0; n]; segs + 1];
        for i in 0..segs {
            let mid: Vec<f64> = (0..n).map(|k| 0.5 * (z[i][k] + z[i + 1][k])).collect();
            let w: Vec<f64> = (0..n).map(|k| (z[i + 1][k] - z[i][k]) / h).collect();
            let dx = l.position_derivative(&mid, &w);
            let dv = l.fiber_derivative(&mid, &w);
            for k in 0..n {
                g[i][k] += 0.5 * h * dx[k] - dv[k];
                g[i + 1][k] += 0.5 * h * dx[k] + dv[k];
            }
        }
        g[0] = vec![0.0; n];
        g[segs] = vec![0.0; n];
        g
    };
    let action = |z: &[Vec<f64>]| -> f64 {
        (0..segs)
            .map(|i| {
                let mid: Vec<f64> = (0..n).map(|k| 0.5 * (z[i][k] + z[i + 1][k])).collect();
                let w: Vec<f64> = (0..n).map(|k| (z[i + 1][k] - z[i][k]) / h).collect();
                h * l.value(&mid, &w)
            })
            .sum()
    };
    let mut f = action(&z);
    let mut g = grad(&z);
    let mut dir: Vec<Vec<f64>> = g.iter().map(|r| linalg::scale(r, -1.0)).collect();
    let flat = |m: &[Vec<f64>]| -> f64 { m.iter().map(|r| linalg::norm2(r)).sum::<f64>() };
    for _ in 0..300 {
        let gn = flat(&g);
        if gn <= 1e-16 {
            break;
        }
        let mut s = 1.0;
        let slope: f64 = g
            .iter()
            .zip(&dir)
            .map(|(gr, dr)| linalg::dot(gr, dr))
            .sum();
        let mut moved = false;
        while s >= 1e-8 {
            let zt: Vec<Vec<f64>> = z
                .iter()
                .zip(&dir)
                .map(|(zi, di)| linalg::axpy(zi, s, di))
                .collect();
            let ft = action(&zt);
            if ft <= f + 1e-4 * s * slope {
                z = zt;
                f = ft;
                moved = true;
                break;
            }
            s /= 2.0;
        }
        if !moved {
            break;
        }
        let g_new = grad(&z);
        let num: f64 = g_new
            .iter()
            .zip(&g)
            .map(|(a, b)| linalg::dot(a, &linalg::sub(a, b)))
            .sum();
        let beta = (num / gn).max(0.0);
        dir = g_new
            .iter()
            .zip(&dir)
            .map(|(gr, dr)| linalg::axpy(&linalg::scale(gr, -1.0), beta, dr))
            .collect();
        g = g_new;
    }
    (0..n).map(|k| (z[1][k] - z[0][k]) / h).collect()
}

/// All flow-realized minimizer candidates for the pair, sorted by
/// action. Shared by `minimize` (which enforces uniqueness) and `cost`
/// (which does not).
fn realized_candidates(l: &Lagrangian, x: &Point, y: &Point, t: f64) -> Result<Vec<Curve>> {
    l.manifold.check(x)?;
    l.manifold.check(y)?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(LotError::Input(format!("time horizon must be positive, got {t}")));
    }
    let steps = default_steps(t);

    let mut curves: Vec<Curve> = Vec::new();
    let make = |traj: Trajectory| -> Result<Curve> {
        let end = traj.endpoint(&l.manifold)?;
        let action = simpson_action(l, &traj);
        Ok(Curve { t, start: x.clone(), end, trajectory: traj, action })
    };

    if let Some(r) = l.power_exponent() {
        let mut cands = power_candidates(l, x, y, t, r)?;
        // Realize only the analytic front runners: anything further than
        // the tie window from the best action cannot become a minimizer.
        cands.sort_by(|a, b| a.analytic_action.total_cmp(&b.analytic_action));
        let best = cands[0].analytic_action;
        let window = tol::ACTION_TIE * (1.0 + best.abs()) + 1e-12;
        for c in cands.iter().take_while(|c| c.analytic_action <= best + window) {
            match newton_shoot(l, x, y, t, steps, &c.v0) {
                Ok(traj) => curves.push(make(traj)?),
                Err(res) => {
                    return Err(LotError::Convergence {
                        context: "geodesic seed failed to land on the target".into(),
                        residual: res,
                    })
                }
            }
        }
    } else {
        let mut seeds: Vec<Vec<f64>> = Vec::new();
        match l.manifold.kind {
            ManifoldKind::Torus => {
                let base = wrapped_delta(&x.coords, &y.coords);
                let n = base.len();
                if n <= 6 {
                    for mask in 0..3usize.pow(n as u32) {
                        let mut w = base.clone();
                        let mut m = mask;
                        for item in w.iter_mut() {
                            *item += (m % 3) as f64 - 1.0;
                            m /= 3;
                        }
                        seeds.push(linalg::scale(&w, 1.0 / t));
                    }
                } else {
                    seeds.push(linalg::scale(&base, 1.0 / t));
                }
            }
            _ => seeds.push(linalg::scale(
                &linalg::sub(&y.coords, &x.coords),
                1.0 / t,
            )),
        }
        let mut best_residual = f64::INFINITY;
        for seed in &seeds {
            match newton_shoot(l, x, y, t, steps, seed) {
                Ok(traj) => curves.push(make(traj)?),
                Err(r) => best_residual = best_residual.min(r),
            }
        }
        if curves.is_empty() {
            let seed = collocation_seed(l, x, y, t);
            match newton_shoot(l, x, y, t, steps, &seed) {
                Ok(traj) => curves.push(make(traj)?),
                Err(r) => {
                    return Err(LotError::Convergence {
                        context: "shooting failed from line, translate and collocation seeds"
                            .into(),
                        residual: best_residual.min(r),
                    })
                }
            }
        }
    }

    // Dedupe curves that are the same flow reached from different seeds.
    curves.sort_by(|a, b| a.action.total_cmp(&b.action));
    let mut unique: Vec<Curve> = Vec::new();
    for c in curves {
        if !unique.iter().any(|u| {
            linalg::dist_euclid(u.initial_velocity(), c.initial_velocity()) <= 1e-7
        }) {
            unique.push(c);
        }
    }
    Ok(unique)
}

/// The action minimizer from `x` to `y` in time `t`. Errors with
/// `AmbiguousMinimizer` when two distinct minimizers tie in action.
pub fn minimize(l: &Lagrangian, x: &Point, y: &Point, t: f64) -> Result<Curve> {
    let mut curves = realized_candidates(l, x, y, t)?;
    if curves.len() >= 2 {
        let a0 = curves[0].action;
        let a1 = curves[1].action;
        if (a1 - a0).abs() <= tol::ACTION_TIE * (1.0 + a0.abs()) {
            return Err(LotError::AmbiguousMinimizer(format!(
                "two minimizers with equal action {a0:.12e} but different initial velocities"
            )));
        }
    }
    Ok(curves.remove(0))
}

/// Induced two-point cost: the minimal action over curves joining `x`
/// to `y` in time `t`, evaluated along an integrated flow. Well defined
/// even when the minimizer itself is not unique.
pub fn cost(l: &Lagrangian, x: &Point, y: &Point, t: f64) -> Result<f64> {
    Ok(realized_candidates(l, x, y, t)?[0].action)
}

/// Fast route to the same value: the closed form `t^{1-r} d(x,y)^r` for
/// the power family, falling back to the flow-based `cost` otherwise.
/// Bulk consumers (cost matrices, transforms) call this; agreement with
/// the flow route is pinned by tests.
pub fn cost_fast(l: &Lagrangian, x: &Point, y: &Point, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(LotError::Input(format!("time horizon must be positive, got {t}")));
    }
    match l.power_exponent() {
        Some(r) => {
            let d = l.manifold.dist(x, y);
            Ok(t.powf(1.0 - r) * d.powf(r))
        }
        None => cost(l, x, y, t),
    }
}

/// Dense cost matrix `c[i][j] = cost(xs[i], ys[j])`.
pub fn cost_matrix(l: &Lagrangian, xs: &[Point], ys: &[Point], t: f64) -> Result<Vec<Vec<f64>>> {
    xs.iter()
        .map(|x| ys.iter().map(|y| cost_fast(l, x, y, t)).collect())
        .collect()
}

/// Derivative pair of the two-point cost along a minimizer: the cost is
/// differentiable in each endpoint wherever the minimizer is unique,
/// with `dc/dx = -dL/dv` at the start and `dc/dy = +dL/dv` at the end.
pub fn superdifferential(curve: &Curve) -> (Vec<f64>, Vec<f64>) {
    (
        linalg::scale(curve.initial_momentum(), -1.0),
        curve.final_momentum().to_vec(),
    )
}
