//! Primal network simplex for the dense transportation problem.
//!
//! Minimizes `sum c[i][j] x[i][j]` over nonnegative `x` with prescribed
//! row sums `a` and column sums `b`. The pivot path runs on marginals
//! perturbed by a tiny seeded jitter, which keeps every basic solution
//! nondegenerate and the pivot sequence finite and deterministic; the
//! final basis is then re-solved exactly on the unperturbed marginals
//! by peeling tree leaves, so the returned flows carry no trace of the
//! jitter. Optimality of the output is certified internally: dual
//! feasibility of the reduced costs, marginal conservation and a closed
//! duality gap are all checked before returning.

use crate::error::{LotError, Result};
use crate::linalg;
use crate::tol;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed for the anti-degeneracy jitter. Fixed: solver output must be
/// reproducible run to run.
pub const PERTURB_SEED: u64 = 0xBA5E;

#[derive(Debug, Clone)]
pub struct FlowSolution {
    /// Positive flows only, row-major order.
    pub flows: Vec<(usize, usize, f64)>,
    /// Standard-convention duals: `u[i] + v[j] <= c[i][j]`, equality on
    /// basic arcs, `u[0] = 0`.
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect() }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }
    fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        self.parent[rx] = ry;
        true
    }
}

/// Flows forced by a spanning tree: peel leaves, each leaf's unique arc
/// carries exactly the leaf's residual marginal. Exact in the sense
/// that only subtractions of the input data occur.
fn tree_flows(
    basis: &[(usize, usize)],
    n: usize,
    m: usize,
    a: &[f64],
    b: &[f64],
) -> Vec<f64> {
    let nodes = n + m;
    let mut deg = vec![0usize; nodes];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for (k, &(i, j)) in basis.iter().enumerate() {
        deg[i] += 1;
        deg[n + j] += 1;
        incident[i].push(k);
        incident[n + j].push(k);
    }
    let mut residual: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    let mut used = vec![false; basis.len()];
    let mut flows = vec![0.0; basis.len()];
    let mut stack: Vec<usize> = (0..nodes).filter(|&v| deg[v] == 1).collect();
    stack.sort_unstable();
    while let Some(node) = stack.pop() {
        if deg[node] != 1 {
            continue;
        }
        let Some(&k) = incident[node].iter().find(|&&k| !used[k]) else { continue };
        let (i, j) = basis[k];
        let other = if node == i { n + j } else { i };
        flows[k] = residual[node];
        residual[node] = 0.0;
        residual[other] -= flows[k];
        used[k] = true;
        deg[node] -= 1;
        deg[other] -= 1;
        if deg[other] == 1 {
            stack.push(other);
        }
    }
    flows
}

/// Dual variables from the tree: `u[0] = 0`, then `u[i] + v[j] =
/// c[i][j]` propagated over basic arcs.
fn tree_duals(
    basis: &[(usize, usize)],
    n: usize,
    m: usize,
    c: &[Vec<f64>],
) -> (Vec<f64>, Vec<f64>) {
    let nodes = n + m;
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for (k, &(i, j)) in basis.iter().enumerate() {
        incident[i].push(k);
        incident[n + j].push(k);
    }
    let mut u = vec![f64::NAN; n];
    let mut v = vec![f64::NAN; m];
    u[0] = 0.0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(node) = queue.pop_front() {
        for &k in &incident[node] {
            let (i, j) = basis[k];
            if node == i && v[j].is_nan() {
                v[j] = c[i][j] - u[i];
                queue.push_back(n + j);
            } else if node == n + j && u[i].is_nan() {
                u[i] = c[i][j] - v[j];
                queue.push_back(i);
            }
        }
    }
    (u, v)
}

/// Path between two tree nodes as a list of basic-arc indices, via BFS.
fn tree_path(
    basis: &[(usize, usize)],
    n: usize,
    m: usize,
    from: usize,
    to: usize,
) -> Vec<usize> {
    let nodes = n + m;
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for (k, &(i, j)) in basis.iter().enumerate() {
        incident[i].push(k);
        incident[n + j].push(k);
    }
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; nodes]; // (node, arc)
    let mut seen = vec![false; nodes];
    seen[from] = true;
    let mut queue = std::collections::VecDeque::from([from]);
    'bfs: while let Some(node) = queue.pop_front() {
        for &k in &incident[node] {
            let (i, j) = basis[k];
            let other = if node == i { n + j } else { i };
            if !seen[other] {
                seen[other] = true;
                prev[other] = Some((node, k));
                if other == to {
                    break 'bfs;
                }
                queue.push_back(other);
            }
        }
    }
    let mut path = Vec::new();
    let mut node = to;
    while node != from {
        let (p, k) = prev[node].expect("tree is connected");
        path.push(k);
        node = p;
    }
    path.reverse();
    path
}

/// Greedy matrix-minimum initial basic solution on (possibly ranked)
/// cell order, completed to a spanning tree with zero-flow arcs.
fn initial_basis(
    order_key: &[Vec<f64>],
    n: usize,
    m: usize,
    a: &[f64],
    b: &[f64],
) -> Vec<(usize, usize)> {
    let mut cells: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .collect();
    cells.sort_by(|&(i1, j1), &(i2, j2)| {
        order_key[i1][j1]
            .total_cmp(&order_key[i2][j2])
            .then(i1.cmp(&i2))
            .then(j1.cmp(&j2))
    });
    let mut rem_a = a.to_vec();
    let mut rem_b = b.to_vec();
    let mut sets = DisjointSets::new(n + m);
    let mut basis: Vec<(usize, usize)> = Vec::with_capacity(n + m - 1);
    for &(i, j) in &cells {
        if rem_a[i] > 0.0 && rem_b[j] > 0.0 {
            let x = rem_a[i].min(rem_b[j]);
            rem_a[i] -= x;
            rem_b[j] -= x;
            if sets.union(i, n + j) {
                basis.push((i, j));
            }
        }
    }
    if basis.len() < n + m - 1 {
        for &(i, j) in &cells {
            if sets.union(i, n + j) {
                basis.push((i, j));
                if basis.len() == n + m - 1 {
                    break;
                }
            }
        }
    }
    basis
}

/// Exact transportation solve. `ranking`, when given, only reorders the
/// greedy initialization (a warm start); it cannot change the optimum.
pub fn transportation_simplex(
    c: &[Vec<f64>],
    a: &[f64],
    b: &[f64],
    ranking: Option<&[Vec<f64>]>,
) -> Result<FlowSolution> {
    let n = a.len();
    let m = b.len();
    if n == 0 || m == 0 || c.len() != n || c.iter().any(|row| row.len() != m) {
        return Err(LotError::Input("cost matrix shape does not match marginals".into()));
    }
    if a.iter().chain(b.iter()).any(|w| !(w > &0.0) || !w.is_finite()) {
        return Err(LotError::Input("marginal weights must be positive and finite".into()));
    }
    let (sa, sb) = (a.iter().sum::<f64>(), b.iter().sum::<f64>());
    if (sa - sb).abs() > 1e-9 {
        return Err(LotError::Input(format!(
            "marginal totals differ: {sa} vs {sb}"
        )));
    }
    if c.iter().flatten().any(|x| !x.is_finite()) {
        return Err(LotError::Input("cost matrix has non-finite entries".into()));
    }
    let scale = c.iter().flatten().fold(0.0f64, |acc, x| acc.max(x.abs())) + 1.0;

    // Nondegeneracy jitter, rebalanced so totals still match.
    let mut rng = ChaCha8Rng::seed_from_u64(PERTURB_SEED);
    let jitter = 1e-12;
    let mut ap = a.to_vec();
    let mut bp = b.to_vec();
    for w in ap.iter_mut() {
        *w += jitter * rng.gen_range(1.0..2.0);
    }
    let mut extra = vec![0.0; m];
    for e in extra.iter_mut() {
        *e = jitter * rng.gen_range(1.0..2.0);
    }
    let ea: f64 = ap.iter().sum::<f64>() - sa;
    let eb: f64 = extra.iter().sum();
    for (w, e) in bp.iter_mut().zip(&extra) {
        *w += e * (ea / eb);
    }

    let mut basis = initial_basis(ranking.unwrap_or(c), n, m, &ap, &bp);
    let mut flows = tree_flows(&basis, n, m, &ap, &bp);

    let cap = 40 * (n + m) * (n + m) + 2000;
    let mut pivots = 0usize;
    loop {
        let (u, v) = tree_duals(&basis, n, m, c);
        let mut best = (-1e-11 * scale, usize::MAX, usize::MAX);
        for i in 0..n {
            for j in 0..m {
                let rc = c[i][j] - u[i] - v[j];
                if rc < best.0 {
                    best = (rc, i, j);
                }
            }
        }
        if best.1 == usize::MAX {
            // Optimal: extract exact flows for the original marginals.
            let exact = tree_flows(&basis, n, m, a, b);
            let mut out: Vec<(usize, usize, f64)> = Vec::new();
            for (k, &(i, j)) in basis.iter().enumerate() {
                let x = exact[k];
                if x < -1e-9 {
                    return Err(LotError::Numerical(format!(
                        "basis became infeasible on the original marginals (flow {x:.3e})"
                    )));
                }
                if x > 1e-14 {
                    out.push((i, j, x));
                }
            }
            out.sort_unstable_by(|p, q| (p.0, p.1).cmp(&(q.0, q.1)));
            let objective: f64 = out.iter().map(|&(i, j, x)| c[i][j] * x).sum();

            let row_sums = {
                let mut r = vec![0.0; n];
                for &(i, _, x) in &out {
                    r[i] += x;
                }
                r
            };
            let col_sums = {
                let mut s = vec![0.0; m];
                for &(_, j, x) in &out {
                    s[j] += x;
                }
                s
            };
            let marg_err = row_sums
                .iter()
                .zip(a)
                .chain(col_sums.iter().zip(b))
                .fold(0.0f64, |acc, (got, want)| acc.max((got - want).abs()));
            if marg_err > tol::MARGINAL_DEFECT {
                return Err(LotError::Numerical(format!(
                    "marginal defect {marg_err:.3e} exceeds tolerance"
                )));
            }
            let dual_obj = linalg::dot(&u, a) + linalg::dot(&v, b);
            if (objective - dual_obj).abs() > tol::DUALITY_GAP * scale {
                return Err(LotError::Numerical(format!(
                    "duality gap {:.3e} not closed",
                    (objective - dual_obj).abs()
                )));
            }
            return Ok(FlowSolution { flows: out, u, v, objective, pivots });
        }

        let (_, ei, ej) = best;
        pivots += 1;
        if pivots > cap {
            return Err(LotError::Numerical(format!(
                "network simplex exceeded {cap} pivots"
            )));
        }

        // Cycle: entering arc plus the tree path from its sink back to
        // its source. Arcs traversed sink-to-source lose flow.
        let path = tree_path(&basis, n, m, n + ej, ei);
        let mut node = n + ej;
        let mut theta = f64::INFINITY;
        let mut leaving = usize::MAX;
        let mut signs = Vec::with_capacity(path.len());
        for &k in &path {
            let (i, j) = basis[k];
            let backward = node == n + j; // traversed sink -> source
            signs.push(backward);
            if backward && flows[k] < theta {
                theta = flows[k];
                leaving = k;
            }
            node = if node == i { n + j } else { i };
        }
        debug_assert!(leaving != usize::MAX, "cycle must contain a backward arc");
        for (&k, &backward) in path.iter().zip(&signs) {
            if backward {
                flows[k] -= theta;
            } else {
                flows[k] += theta;
            }
        }
        basis[leaving] = (ei, ej);
        flows[leaving] = theta;
    }
}

/// Independent oracle for small instances with rational weights: expand
/// every atom into unit masses and brute-force the assignment over all
/// permutations. Exponential; test use only.
pub fn brute_force_cost(c: &[Vec<f64>], a: &[f64], b: &[f64], denominator: usize) -> f64 {
    let mut src = Vec::new();
    for (i, &w) in a.iter().enumerate() {
        let k = (w * denominator as f64).round() as usize;
        for _ in 0..k {
            src.push(i);
        }
    }
    let mut dst = Vec::new();
    for (j, &w) in b.iter().enumerate() {
        let k = (w * denominator as f64).round() as usize;
        for _ in 0..k {
            dst.push(j);
        }
    }
    assert_eq!(src.len(), dst.len());
    assert!(src.len() <= 9, "factorial oracle limited to 9 units");
    let mut perm: Vec<usize> = (0..dst.len()).collect();
    let mut best = f64::INFINITY;
    permute(&mut perm, 0, &mut |p| {
        let cost: f64 = p
            .iter()
            .enumerate()
            .map(|(q, &r)| c[src[q]][dst[r]] / denominator as f64)
            .sum();
        if cost < best {
            best = cost;
        }
    });
    best
}

fn permute(arr: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == arr.len() {
        visit(arr);
        return;
    }
    for i in k..arr.len() {
        arr.swap(k, i);
        permute(arr, k + 1, visit);
        arr.swap(k, i);
    }
}
