//! Exact discrete optimal transport: plans, dual potentials, c-transforms,
//! and calibration checks.
//!
//! Potentials follow the maximizing convention throughout: a pair
//! `(phi, psi)` is admissible when `psi[j] - phi[i] <= c[i][j]`, and the
//! dual objective is `sum psi_j nu_j - sum phi_i mu_i`. The underlying LP
//! solvers hand back standard duals `u[i] + v[j] <= c[i][j]`; the single
//! conversion point is [`DualPotentials::from_standard`] (`phi = -u`,
//! `psi = v`).

use crate::assignment;
use crate::error::{LotError, Result};
use crate::lagrangian::Lagrangian;
use crate::manifold::Point;
use crate::minimizer;
use crate::netflow;
use crate::sinkhorn;
use crate::tol;

/// A finitely supported probability measure.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    pub support: Vec<Point>,
    pub weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Validates positivity, unit total mass, and pairwise distinct
    /// support. Deliberately rejects rather than renormalizes: a weight
    /// vector off by more than `WEIGHT_SUM` is a caller bug.
    pub fn new(support: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        if support.is_empty() {
            return Err(LotError::Input("a measure needs at least one atom".into()));
        }
        if support.len() != weights.len() {
            return Err(LotError::Input(format!(
                "{} support points but {} weights",
                support.len(),
                weights.len()
            )));
        }
        if let Some(k) = weights.iter().position(|w| !(w > &0.0) || !w.is_finite()) {
            return Err(LotError::Input(format!(
                "weight {k} is {}, expected positive and finite",
                weights[k]
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tol::WEIGHT_SUM {
            return Err(LotError::Input(format!("weights sum to {total}, not 1")));
        }
        for i in 0..support.len() {
            for j in i + 1..support.len() {
                if support[i] == support[j] {
                    return Err(LotError::Input(format!(
                        "atoms {i} and {j} coincide after canonicalization"
                    )));
                }
            }
        }
        Ok(Self { support, weights })
    }

    /// Equal mass `1/n` on each atom.
    pub fn uniform(support: Vec<Point>) -> Result<Self> {
        let n = support.len();
        if n == 0 {
            return Err(LotError::Input("a measure needs at least one atom".into()));
        }
        Self::new(support, vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    fn is_uniform(&self) -> bool {
        let share = 1.0 / self.len() as f64;
        self.weights.iter().all(|w| (w - share).abs() <= tol::UNIFORM_WEIGHTS)
    }
}

/// A sparse coupling: `(i, j, mass)` triples, row-major, all masses
/// positive, marginals matching the two measures.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    pub entries: Vec<(usize, usize, f64)>,
}

impl TransportPlan {
    /// Validates index ranges, positivity, and both marginals (within
    /// `MARGINAL_DEFECT`). Entries come out sorted row-major.
    pub fn new(
        entries: Vec<(usize, usize, f64)>,
        mu: &DiscreteMeasure,
        nu: &DiscreteMeasure,
    ) -> Result<Self> {
        let (n, m) = (mu.len(), nu.len());
        for &(i, j, mass) in &entries {
            if i >= n || j >= m {
                return Err(LotError::Input(format!(
                    "plan entry ({i},{j}) is outside the {n}x{m} product"
                )));
            }
            if !(mass > 0.0) || !mass.is_finite() {
                return Err(LotError::Input(format!(
                    "plan entry ({i},{j}) carries mass {mass}"
                )));
            }
        }
        let mut entries = entries;
        entries.sort_by_key(|&(i, j, _)| (i, j));
        let plan = Self { entries };
        let rows = plan.row_marginals(n);
        let cols = plan.column_marginals(m);
        for i in 0..n {
            if (rows[i] - mu.weights[i]).abs() > tol::MARGINAL_DEFECT {
                return Err(LotError::Input(format!(
                    "row {i} carries mass {} against weight {}",
                    rows[i], mu.weights[i]
                )));
            }
        }
        for j in 0..m {
            if (cols[j] - nu.weights[j]).abs() > tol::MARGINAL_DEFECT {
                return Err(LotError::Input(format!(
                    "column {j} carries mass {} against weight {}",
                    cols[j], nu.weights[j]
                )));
            }
        }
        Ok(plan)
    }

    pub fn row_marginals(&self, rows: usize) -> Vec<f64> {
        let mut sums = vec![0.0; rows];
        for &(i, _, mass) in &self.entries {
            sums[i] += mass;
        }
        sums
    }

    pub fn column_marginals(&self, cols: usize) -> Vec<f64> {
        let mut sums = vec![0.0; cols];
        for &(_, j, mass) in &self.entries {
            sums[j] += mass;
        }
        sums
    }

    /// Transport cost `sum mass * c[i][j]` of this plan.
    pub fn cost_against(&self, c: &[Vec<f64>]) -> f64 {
        self.entries.iter().map(|&(i, j, mass)| mass * c[i][j]).sum()
    }

    /// A plan is a graph when every row feeds exactly one column: the
    /// coupling is induced by a map on the source atoms.
    pub fn is_graph(&self, rows: usize) -> bool {
        let mut per_row = vec![0usize; rows];
        for &(i, _, _) in &self.entries {
            per_row[i] += 1;
        }
        per_row.iter().all(|&k| k == 1)
    }

    /// Mass-weighted midpoint of two plans on the same product. Used to
    /// probe uniqueness: averaging two distinct optimal vertex plans
    /// produces an optimal plan that is no longer a graph.
    pub fn average(a: &TransportPlan, b: &TransportPlan) -> TransportPlan {
        let mut merged: std::collections::BTreeMap<(usize, usize), f64> = Default::default();
        for &(i, j, mass) in a.entries.iter().chain(&b.entries) {
            *merged.entry((i, j)).or_insert(0.0) += 0.5 * mass;
        }
        TransportPlan {
            entries: merged.into_iter().map(|((i, j), mass)| (i, j, mass)).collect(),
        }
    }
}

/// Dual potentials in the maximizing convention: admissibility reads
/// `psi[j] - phi[i] <= c[i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPotentials {
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
}

impl DualPotentials {
    /// Conversion from standard LP duals `u[i] + v[j] <= c[i][j]`:
    /// `phi = -u`, `psi = v`. This is the only place the two sign
    /// conventions meet.
    pub fn from_standard(u: &[f64], v: &[f64]) -> Self {
        Self {
            phi: u.iter().map(|x| -x).collect(),
            psi: v.to_vec(),
        }
    }

    /// `sum psi_j nu_j - sum phi_i mu_i`, the objective the potentials
    /// maximize.
    pub fn dual_objective(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
        let gain: f64 = self.psi.iter().zip(&nu.weights).map(|(p, w)| p * w).sum();
        let pay: f64 = self.phi.iter().zip(&mu.weights).map(|(p, w)| p * w).sum();
        gain - pay
    }
}

/// Which exact solver carries the linear program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    /// Equal-size uniform measures route to the assignment solver,
    /// everything else to the network simplex.
    Auto,
    NetworkSimplex,
    /// Requires square shape; errors otherwise.
    Assignment,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub solver: SolverChoice,
    /// Entropic warm start: run a log-domain scaling at this
    /// regularization and let its reduced costs reorder the simplex's
    /// greedy initialization. Never changes the answer, only the pivot
    /// path, and therefore always routes through the simplex.
    pub warm_start_epsilon: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { solver: SolverChoice::Auto, warm_start_epsilon: None }
    }
}

/// Exact primal-dual solve with automatic routing. See
/// [`solve_exact_with`] for the knobs.
pub fn solve_exact(
    c: &[Vec<f64>],
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
) -> Result<(TransportPlan, DualPotentials)> {
    solve_exact_with(c, mu, nu, &SolveOptions::default())
}

/// Exact primal-dual solve. The returned plan is an optimal vertex of
/// the transportation polytope and the potentials are admissible with
/// `psi[j] - phi[i] = c[i][j]` on every plan entry; strong duality is
/// re-verified here before anything is returned.
///
/// Potentials are defined only up to a common additive constant; the
/// returned pair is gauged so `phi[0] = 0`, making the two solver
/// backends directly comparable.
pub fn solve_exact_with(
    c: &[Vec<f64>],
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    opts: &SolveOptions,
) -> Result<(TransportPlan, DualPotentials)> {
    let (n, m) = (mu.len(), nu.len());
    if c.len() != n || c.iter().any(|row| row.len() != m) {
        return Err(LotError::Input(format!(
            "cost matrix is not {n}x{m} as the measures require"
        )));
    }
    let use_assignment = match opts.solver {
        SolverChoice::NetworkSimplex => false,
        SolverChoice::Assignment => {
            if n != m {
                return Err(LotError::Input(format!(
                    "assignment solver needs a square problem, got {n}x{m}"
                )));
            }
            true
        }
        SolverChoice::Auto => {
            n == m && mu.is_uniform() && nu.is_uniform() && opts.warm_start_epsilon.is_none()
        }
    };

    let (entries, u, v) = if use_assignment {
        let sol = assignment::solve_assignment(c)?;
        let entries: Vec<(usize, usize, f64)> = sol
            .row_to_col
            .iter()
            .enumerate()
            .map(|(i, &j)| (i, j, mu.weights[i]))
            .collect();
        (entries, sol.u, sol.v)
    } else {
        let ranking = match opts.warm_start_epsilon {
            Some(eps) => {
                let scaling =
                    sinkhorn::log_domain_scaling(c, &mu.weights, &nu.weights, eps, 500, 1e-8)?;
                Some(sinkhorn::ranking_matrix(c, &scaling))
            }
            None => None,
        };
        let sol = netflow::transportation_simplex(c, &mu.weights, &nu.weights, ranking.as_deref())?;
        (sol.flows, sol.u, sol.v)
    };

    let plan = TransportPlan::new(entries, mu, nu)?;
    let mut pot = interior_duals(c, &plan, n, m)
        .unwrap_or_else(|| DualPotentials::from_standard(&u, &v));
    let shift = pot.phi[0];
    for p in pot.phi.iter_mut().chain(pot.psi.iter_mut()) {
        *p -= shift;
    }

    let primal = plan.cost_against(c);
    let dual = pot.dual_objective(mu, nu);
    if (primal - dual).abs() > tol::DUALITY_GAP * (1.0 + primal.abs()) {
        return Err(LotError::Numerical(format!(
            "duality gap {:.3e} after exact solve",
            (primal - dual).abs()
        )));
    }
    let report = check_calibration(&plan, &pot, c, tol::SUBSOLUTION_SLACK);
    if !report.pass {
        return Err(LotError::Numerical(format!(
            "solver output fails calibration: subsolution residual {:.3e}, support gap {:.3e}",
            report.max_subsolution_residual, report.max_support_gap
        )));
    }
    Ok((plan, pot))
}

/// Dual selection for graph plans. LP solvers return a vertex of the
/// optimal dual face, which on structured instances (grids, lattices)
/// sits on extra tight constraints: off-graph pairs with zero slack that
/// read as c-transform ties even though the map is unique. This
/// re-derives potentials in the relative interior of that face: support
/// equalities `psi[j] - phi[i] = c[i][j]` hold exactly by construction,
/// and every off-graph constraint keeps a uniform positive margin.
///
/// Writing `psi[j'] - psi[j] <= c[i][j'] - c[i][j]` for each row `i`
/// mapped to `j`, the largest uniform margin is the minimum cycle mean
/// of the induced column digraph (Karp); potentials then come from
/// shortest paths with half that margin folded into every edge. Returns
/// None when the plan is not a graph or the margin is below the tie
/// window - genuinely tied instances keep the solver's duals so their
/// ties stay visible.
fn interior_duals(
    c: &[Vec<f64>],
    plan: &TransportPlan,
    n: usize,
    m: usize,
) -> Option<DualPotentials> {
    let mut target = vec![usize::MAX; n];
    for &(i, j, _) in &plan.entries {
        if target[i] != usize::MAX {
            return None;
        }
        target[i] = j;
    }
    if target.iter().any(|&j| j == usize::MAX) {
        return None;
    }

    let mut w = vec![vec![f64::INFINITY; m]; m];
    for (i, &j) in target.iter().enumerate() {
        for jp in 0..m {
            if jp != j {
                w[j][jp] = w[j][jp].min(c[i][jp] - c[i][j]);
            }
        }
    }

    // Karp: d[k][v] = cheapest k-edge walk into v, starting anywhere.
    let mut d = vec![vec![0.0f64; m]; m + 1];
    for k in 1..=m {
        for v in 0..m {
            let mut best = f64::INFINITY;
            for s in 0..m {
                if w[s][v].is_finite() && d[k - 1][s].is_finite() {
                    best = best.min(d[k - 1][s] + w[s][v]);
                }
            }
            d[k][v] = best;
        }
    }
    let mut cycle_mean = f64::INFINITY;
    for v in 0..m {
        if !d[m][v].is_finite() {
            continue;
        }
        let mut worst = f64::NEG_INFINITY;
        for k in 0..m {
            if d[k][v].is_finite() {
                worst = worst.max((d[m][v] - d[k][v]) / (m - k) as f64);
            }
        }
        cycle_mean = cycle_mean.min(worst);
    }
    let margin = if cycle_mean.is_finite() { 0.5 * cycle_mean } else { 0.0 };
    if m > 1 && margin <= tol::CTRANSFORM_TIE {
        return None;
    }

    // Bellman-Ford from a virtual source; margined cycles stay positive,
    // so this settles within m passes.
    let mut psi = vec![0.0f64; m];
    for _ in 0..m {
        let mut changed = false;
        for j in 0..m {
            for jp in 0..m {
                if w[j][jp].is_finite() {
                    let cand = psi[j] + w[j][jp] - margin;
                    if cand < psi[jp] {
                        psi[jp] = cand;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let phi: Vec<f64> = target.iter().enumerate().map(|(i, &j)| psi[j] - c[i][j]).collect();
    Some(DualPotentials { phi, psi })
}

/// Dense two-point cost matrix between the supports of two measures.
/// Cost failures (non-convergence, cut-locus ambiguity) are tagged with
/// the offending `(i, j)` entry.
pub fn cost_matrix(
    lag: &Lagrangian,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    t: f64,
) -> Result<Vec<Vec<f64>>> {
    mu.support
        .iter()
        .enumerate()
        .map(|(i, x)| {
            nu.support
                .iter()
                .enumerate()
                .map(|(j, y)| {
                    minimizer::cost_fast(lag, x, y, t).map_err(|e| tag_entry(e, i, j))
                })
                .collect()
        })
        .collect()
}

fn tag_entry(e: LotError, i: usize, j: usize) -> LotError {
    match e {
        LotError::Convergence { context, residual } => LotError::Convergence {
            context: format!("entry ({i},{j}): {context}"),
            residual,
        },
        LotError::AmbiguousMinimizer(msg) => {
            LotError::AmbiguousMinimizer(format!("entry ({i},{j}): {msg}"))
        }
        LotError::AmbiguousLog(msg) => {
            LotError::AmbiguousLog(format!("entry ({i},{j}): {msg}"))
        }
        other => other,
    }
}

/// Result of a c-transform sweep: the supremum, the lowest index
/// attaining it (within `CTRANSFORM_TIE`), and whether that index was
/// contested.
#[derive(Debug, Clone, PartialEq)]
pub struct CTransform {
    pub value: f64,
    pub argmax: usize,
    pub tie: bool,
}

/// `sup_j psi[j] - c(x, y_j, t)` over the support of `nu`. A tie means
/// the supremum is attained (within tolerance) at more than one atom;
/// the reported argmax is then the lowest contesting index.
pub fn c_transform(
    psi: &[f64],
    nu: &DiscreteMeasure,
    lag: &Lagrangian,
    t: f64,
    x: &Point,
) -> Result<CTransform> {
    if psi.len() != nu.len() {
        return Err(LotError::Input(format!(
            "{} transform values against {} atoms",
            psi.len(),
            nu.len()
        )));
    }
    if let Some(k) = psi.iter().position(|p| !p.is_finite()) {
        return Err(LotError::Input(format!("transform value {k} is not finite")));
    }
    let mut scores = Vec::with_capacity(nu.len());
    for (j, y) in nu.support.iter().enumerate() {
        let cost = minimizer::cost_fast(lag, x, y, t).map_err(|e| tag_entry(e, usize::MAX, j))?;
        scores.push(psi[j] - cost);
    }
    let best = scores.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let contesting: Vec<usize> = scores
        .iter()
        .enumerate()
        .filter(|&(_, &s)| best - s <= tol::CTRANSFORM_TIE)
        .map(|(j, _)| j)
        .collect();
    Ok(CTransform {
        value: best,
        argmax: contesting[0],
        tie: contesting.len() > 1,
    })
}

/// Outcome of checking a (plan, potentials) pair against a cost matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReport {
    pub pass: bool,
    /// Worst `psi[j] - phi[i] - c[i][j]` over the whole product;
    /// nonpositive when the potentials are admissible.
    pub max_subsolution_residual: f64,
    /// Worst `|psi[j] - phi[i] - c[i][j]|` over plan entries; zero means
    /// the inequality is saturated wherever mass moves.
    pub max_support_gap: f64,
}

/// Checks admissibility everywhere and saturation on the plan's support,
/// the two halves of optimality certification. Shapes must be
/// consistent: `phi` per row of `c`, `psi` per column, plan entries
/// inside the product.
pub fn check_calibration(
    plan: &TransportPlan,
    pot: &DualPotentials,
    c: &[Vec<f64>],
    tolerance: f64,
) -> CalibrationReport {
    let mut worst_residual = f64::NEG_INFINITY;
    for (i, row) in c.iter().enumerate() {
        for (j, &cij) in row.iter().enumerate() {
            worst_residual = worst_residual.max(pot.psi[j] - pot.phi[i] - cij);
        }
    }
    let mut worst_gap = 0.0f64;
    for &(i, j, _) in &plan.entries {
        worst_gap = worst_gap.max((pot.psi[j] - pot.phi[i] - c[i][j]).abs());
    }
    CalibrationReport {
        pass: worst_residual <= tolerance && worst_gap <= tolerance,
        max_subsolution_residual: worst_residual,
        max_support_gap: worst_gap,
    }
}
