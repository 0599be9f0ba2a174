//! Transport-map extraction: reading maps off plan graphs, reconstructing
//! them from dual potentials through the Hamiltonian flow, and the
//! closed-form map for distance-power costs.
//!
//! A map exists exactly where the plan concentrates on a graph and the
//! potential has a unique contact target; both failure modes surface as
//! explicit reports (split rows, tie errors), never as silent choices.

use crate::error::{LotError, Result};
use crate::kantorovich::{self, DiscreteMeasure, TransportPlan};
use crate::lagrangian::{default_steps, Lagrangian};
use crate::linalg;
use crate::manifold::{ManifoldModel, Point, Tangent};
use crate::minimizer;
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapMethod {
    /// Images read off a plan whose rows carry a single target each.
    PlanGraph,
    /// Images reconstructed by flowing each source along the potential's
    /// differential.
    PotentialFlow,
    /// The scaled-exponential closed form for distance-power costs.
    ClosedForm,
}

/// A plan row feeding more than one target, with its mass distribution.
/// Splits diagnose a failed twist condition or a deliberately tied
/// instance; they are reports, not errors.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitRow {
    pub source: usize,
    pub shares: Vec<(usize, f64)>,
}

/// A pointwise transport map on (part of) a measure's support.
#[derive(Debug, Clone)]
pub struct MongeMap {
    pub method: MapMethod,
    /// Indices into the source measure's support, strictly ascending.
    pub source_indices: Vec<usize>,
    pub sources: Vec<Point>,
    pub images: Vec<Point>,
    /// Per-point residuals: zero for graph reading, the flow-landing
    /// distance to the contact target for potential reconstruction.
    pub residuals: Vec<f64>,
    /// Per-point potential differentials, parallel to `sources`, filled
    /// only by potential-based extraction; empty for the other methods.
    pub grads: Vec<Vec<f64>>,
    /// Rows that could not be mapped because their mass splits.
    pub splits: Vec<SplitRow>,
}

impl MongeMap {
    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    /// True when every atom of `mu` has exactly one image.
    pub fn is_total(&self, mu: &DiscreteMeasure) -> bool {
        self.splits.is_empty() && self.source_indices.len() == mu.len()
    }
}

/// Reads a map off a plan: every row with a single entry maps to that
/// target, rows with several entries are reported as splits. Rows
/// carrying no mass at all are simply absent from both lists.
pub fn map_from_plan(plan: &TransportPlan, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> MongeMap {
    let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); mu.len()];
    for &(i, j, mass) in &plan.entries {
        per_row[i].push((j, mass));
    }
    let mut map = MongeMap {
        method: MapMethod::PlanGraph,
        source_indices: Vec::new(),
        sources: Vec::new(),
        images: Vec::new(),
        residuals: Vec::new(),
        grads: Vec::new(),
        splits: Vec::new(),
    };
    for (i, shares) in per_row.into_iter().enumerate() {
        match shares.len() {
            0 => {}
            1 => {
                map.source_indices.push(i);
                map.sources.push(mu.support[i].clone());
                map.images.push(nu.support[shares[0].0].clone());
                map.residuals.push(0.0);
            }
            _ => map.splits.push(SplitRow { source: i, shares }),
        }
    }
    map
}

/// One source point pushed through the potential: the image, the
/// differential of the potential at the source, the contact target, and
/// the distance by which the flow missed it.
#[derive(Debug, Clone)]
pub struct MappedPoint {
    pub image: Point,
    /// `d_x phi` as a covector in chart components.
    pub grad: Vec<f64>,
    pub target: usize,
    pub landing: f64,
}

/// Potential-driven map at one point: locate the unique contact target
/// of the c-transform, take the potential's differential there (minus
/// the cost's derivative in the source slot), and flow the covector for
/// time `t`. The flow must land back on the contact target within
/// `MAP_FLOW_LANDING`; anything else is reported as a failure rather
/// than returned as a map value.
pub fn map_from_potential(
    lag: &Lagrangian,
    t: f64,
    psi: &[f64],
    nu: &DiscreteMeasure,
    x: &Point,
) -> Result<MappedPoint> {
    let ct = kantorovich::c_transform(psi, nu, lag, t, x)?;
    if ct.tie {
        return Err(LotError::AmbiguousArgmax(format!(
            "contact target of the potential is not unique at {:?}",
            x.coords
        )));
    }
    let target = &nu.support[ct.argmax];
    let curve = minimizer::minimize(lag, x, target, t)?;
    // d_x phi = -dc/dx along the minimizer, which is the curve's initial
    // momentum.
    let grad = curve.initial_momentum().to_vec();
    let flow = lag.hamiltonian_flow(x, &grad, t, default_steps(t))?;
    let image = flow.endpoint(&lag.manifold)?;
    let landing = lag.manifold.dist(&image, target);
    if landing > tol::MAP_FLOW_LANDING {
        return Err(LotError::Numerical(format!(
            "flow reconstruction missed its contact target by {landing:.3e}"
        )));
    }
    Ok(MappedPoint { image, grad, target: ct.argmax, landing })
}

/// Applies [`map_from_potential`] to every atom of `mu`. Any tie or
/// reconstruction failure aborts the whole map: a partially extracted
/// potential map is not meaningful.
pub fn map_from_potentials(
    lag: &Lagrangian,
    t: f64,
    psi: &[f64],
    nu: &DiscreteMeasure,
    mu: &DiscreteMeasure,
) -> Result<MongeMap> {
    let mut map = MongeMap {
        method: MapMethod::PotentialFlow,
        source_indices: Vec::new(),
        sources: Vec::new(),
        images: Vec::new(),
        residuals: Vec::new(),
        grads: Vec::new(),
        splits: Vec::new(),
    };
    for (i, x) in mu.support.iter().enumerate() {
        let mapped = map_from_potential(lag, t, psi, nu, x)?;
        map.source_indices.push(i);
        map.sources.push(x.clone());
        map.images.push(mapped.image);
        map.residuals.push(mapped.landing);
        map.grads.push(mapped.grad);
    }
    Ok(map)
}

/// Closed-form map for the cost `d(x,y)^r`: raise the covector to the
/// metric gradient, scale to the displacement speed
/// `(|grad|_g / r)^(1/(r-1))`, and shoot the exponential map for unit
/// time. The displacement form stays finite as the gradient vanishes
/// (where the naive scale `|grad|^((r-2)/(r-1))` in the denominator
/// would blow up for r < 2), so a zero gradient cleanly returns `x`.
pub fn dr_map(m: &ManifoldModel, r: f64, x: &Point, grad: &[f64]) -> Result<Point> {
    if !(r > 1.0) || !r.is_finite() {
        return Err(LotError::Input(format!("power exponent must exceed 1, got {r}")));
    }
    m.check(x)?;
    if grad.len() != x.coords.len() || !linalg::all_finite(grad) {
        return Err(LotError::Input("gradient has the wrong shape or is not finite".into()));
    }
    let gnorm = linalg::norm(grad);
    if gnorm == 0.0 {
        return Ok(x.clone());
    }
    let cf = m.conformal_factor(&x.coords);
    let dual = gnorm / cf.sqrt();
    let speed_metric = (dual / r).powf(1.0 / (r - 1.0));
    let chart_speed = speed_metric / cf.sqrt();
    let components = linalg::scale(grad, chart_speed / gnorm);
    m.exp(&Tangent { base: x.clone(), components }, 1.0)
}

/// Outcome of checking a map against the measures it claims to couple.
#[derive(Debug, Clone, PartialEq)]
pub struct PushforwardReport {
    pub pass: bool,
    /// Source mass with no usable image: uncovered atoms plus images
    /// landing farther than the snap radius from every target atom.
    pub unmatched_mass: f64,
    pub max_snap_distance: f64,
    /// Total variation between the pushed-forward weights and the target
    /// weights, over atoms.
    pub tv_defect: f64,
    pub map_cost: f64,
    pub lp_cost: f64,
    /// `map_cost - lp_cost`; an optimal map makes this vanish.
    pub cost_excess: f64,
}

/// Verifies that a map actually transports `mu` to `nu`: images snap to
/// target atoms within `IMAGE_SNAP` (distances reported, never silently
/// absorbed), the snapped weights reproduce `nu` in total variation, and
/// the map's transport cost matches the exact LP optimum.
pub fn pushforward_check(
    map: &MongeMap,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    lag: &Lagrangian,
    t: f64,
) -> Result<PushforwardReport> {
    let c = kantorovich::cost_matrix(lag, mu, nu, t)?;
    let (plan, _) = kantorovich::solve_exact(&c, mu, nu)?;
    let lp_cost = plan.cost_against(&c);

    let mut covered = vec![false; mu.len()];
    let mut pushed = vec![0.0f64; nu.len()];
    let mut unmatched = 0.0f64;
    let mut max_snap = 0.0f64;
    let mut map_cost = 0.0f64;
    for (k, &i) in map.source_indices.iter().enumerate() {
        covered[i] = true;
        let image = &map.images[k];
        let mut best = f64::INFINITY;
        let mut nearest = 0usize;
        for (j, y) in nu.support.iter().enumerate() {
            let d = lag.manifold.dist(image, y);
            if d < best {
                best = d;
                nearest = j;
            }
        }
        max_snap = max_snap.max(best);
        if best > tol::IMAGE_SNAP {
            unmatched += mu.weights[i];
        } else {
            pushed[nearest] += mu.weights[i];
            map_cost += mu.weights[i] * c[i][nearest];
        }
    }
    for (i, was) in covered.iter().enumerate() {
        if !was {
            unmatched += mu.weights[i];
        }
    }
    let tv_defect: f64 =
        0.5 * pushed.iter().zip(&nu.weights).map(|(p, w)| (p - w).abs()).sum::<f64>();
    let cost_excess = map_cost - lp_cost;
    let pass = unmatched == 0.0
        && max_snap <= tol::IMAGE_SNAP
        && tv_defect <= tol::PUSHFORWARD_TV
        && cost_excess.abs() <= tol::MAP_COST_REL * (1.0 + lp_cost.abs());
    Ok(PushforwardReport {
        pass,
        unmatched_mass: unmatched,
        max_snap_distance: max_snap,
        tv_defect,
        map_cost,
        lp_cost,
        cost_excess,
    })
}
