//! Displacement interpolation: intermediate maps `T_s` obtained by
//! stopping each source atom's minimizer at time `s`, the interpolated
//! measures they push forward, and the verifications that make the
//! construction trustworthy: the cost restriction identity, optimality
//! of every intermediate map, and injectivity with a controlled inverse.

use crate::error::{LotError, Result};
use crate::kantorovich::{self, DiscreteMeasure};
use crate::lagrangian::{default_steps, Lagrangian};
use crate::manifold::{Point, Tangent};
use crate::minimizer::{simpson_action, Curve};
use crate::monge::{MapMethod, MongeMap};
use crate::tol;

/// A family of intermediate maps and measures along the minimizers from
/// the atoms of a source measure to their terminal images.
pub struct InterpolationPath<'a> {
    pub lag: &'a Lagrangian,
    pub t: f64,
    pub mu0: DiscreteMeasure,
    pub terminal: MongeMap,
    pub s_grid: Vec<f64>,
    /// One map per grid time; `maps[k]` stops every minimizer at
    /// `s_grid[k]`.
    pub maps: Vec<MongeMap>,
    /// Pushforward of the source weights through each map.
    pub measures: Vec<DiscreteMeasure>,
    /// The full `[0, t]` minimizer per source atom.
    pub curves: Vec<Curve>,
}

fn identity_map(mu0: &DiscreteMeasure) -> MongeMap {
    MongeMap {
        method: MapMethod::PotentialFlow,
        source_indices: (0..mu0.len()).collect(),
        sources: mu0.support.clone(),
        images: mu0.support.clone(),
        residuals: vec![0.0; mu0.len()],
        grads: Vec::new(),
        splits: Vec::new(),
    }
}

/// Builds the path: each source atom launches along the velocity raised
/// from its potential differential, the flow is stopped at every grid
/// time, and the stopped images carry the source weights. The final
/// stop must agree with the terminal map within `INTERP_ENDPOINT`.
///
/// `terminal` must come from potential-based extraction (its `grads`
/// drive the flows) and be total on `mu0`; `s_grid` must be sorted
/// inside `[0, t]`.
pub fn build_path<'a>(
    lag: &'a Lagrangian,
    t: f64,
    mu0: &DiscreteMeasure,
    terminal: &MongeMap,
    s_grid: &[f64],
) -> Result<InterpolationPath<'a>> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(LotError::Input(format!("time horizon must be positive, got {t}")));
    }
    if !terminal.is_total(mu0) || terminal.grads.len() != mu0.len() {
        return Err(LotError::Precondition(
            "terminal map must be potential-derived and total on the source measure".into(),
        ));
    }
    if s_grid.is_empty()
        || s_grid.iter().any(|s| !s.is_finite() || *s < 0.0 || *s > t)
        || s_grid.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(LotError::Input(
            "interpolation grid must be strictly increasing inside [0, t]".into(),
        ));
    }

    let n = mu0.len();
    let mut curves = Vec::with_capacity(n);
    for (i, x) in mu0.support.iter().enumerate() {
        let v0 = lag
            .legendre_inverse(&x.coords, &terminal.grads[i])
            .map_err(|e| tag_atom(e, i))?;
        let seed = Tangent { base: x.clone(), components: v0 };
        let traj = lag
            .euler_lagrange_flow(&seed, t, default_steps(t))
            .map_err(|e| tag_atom(e, i))?;
        let end = traj.endpoint(&lag.manifold).map_err(|e| tag_atom(e, i))?;
        let gap = lag.manifold.dist(&end, &terminal.images[i]);
        if gap > tol::INTERP_ENDPOINT {
            return Err(LotError::Numerical(format!(
                "atom {i}: flow endpoint misses the terminal image by {gap:.3e}"
            )));
        }
        let action = simpson_action(lag, &traj);
        curves.push(Curve { t, start: x.clone(), end, trajectory: traj, action });
    }

    let mut maps = Vec::with_capacity(s_grid.len());
    let mut measures = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let map = if s == 0.0 {
            identity_map(mu0)
        } else {
            let mut map = identity_map(mu0);
            map.images.clear();
            for (i, x) in mu0.support.iter().enumerate() {
                let v0 = Tangent {
                    base: x.clone(),
                    components: curves[i].initial_velocity().to_vec(),
                };
                let traj = lag
                    .euler_lagrange_flow(&v0, s, default_steps(s))
                    .map_err(|e| tag_atom(e, i))?;
                map.images.push(traj.endpoint(&lag.manifold).map_err(|e| tag_atom(e, i))?);
            }
            if s == *s_grid.last().unwrap() && s == t {
                for (i, img) in map.images.iter().enumerate() {
                    map.residuals[i] = lag.manifold.dist(img, &terminal.images[i]);
                }
            }
            map
        };
        let measure = DiscreteMeasure::new(map.images.clone(), mu0.weights.clone())?;
        maps.push(map);
        measures.push(measure);
    }

    Ok(InterpolationPath {
        lag,
        t,
        mu0: mu0.clone(),
        terminal: terminal.clone(),
        s_grid: s_grid.to_vec(),
        maps,
        measures,
        curves,
    })
}

fn tag_atom(e: LotError, i: usize) -> LotError {
    match e {
        LotError::Convergence { context, residual } => {
            LotError::Convergence { context: format!("atom {i}: {context}"), residual }
        }
        LotError::Integration(msg) => LotError::Integration(format!("atom {i}: {msg}")),
        LotError::Domain(msg) => LotError::Domain(format!("atom {i}: {msg}")),
        other => other,
    }
}

impl<'a> InterpolationPath<'a> {
    fn grid_index(&self, s: f64) -> Result<usize> {
        self.s_grid
            .iter()
            .position(|&g| (g - s).abs() <= 1e-12)
            .ok_or_else(|| LotError::Input(format!("{s} is not on the interpolation grid")))
    }
}

/// Per-atom residual of the cost decomposition along the path: the full
/// cost must split exactly into the cost up to `s` plus the cost of the
/// remaining leg.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictionReport {
    pub pass: bool,
    pub max_residual: f64,
    /// `max |residual| / (1 + full cost)` over atoms.
    pub max_relative: f64,
    pub worst_atom: usize,
}

/// Checks `c_t(x, T_t x) = c_s(x, T_s x) + c_(t-s)(T_s x, T_t x)` at
/// every atom, with the degenerate terms dropped at `s = 0` and `s = t`.
pub fn verify_restriction_identity(path: &InterpolationPath, s: f64) -> Result<RestrictionReport> {
    let k = path.grid_index(s)?;
    let lag = path.lag;
    let t = path.t;
    let mut report = RestrictionReport {
        pass: true,
        max_residual: 0.0,
        max_relative: 0.0,
        worst_atom: 0,
    };
    for (i, x) in path.mu0.support.iter().enumerate() {
        let stop = &path.maps[k].images[i];
        let end = &path.terminal.images[i];
        let full = minimizer_cost(lag, x, end, t)?;
        let head = if s > 0.0 { minimizer_cost(lag, x, stop, s)? } else { 0.0 };
        let tail = if t - s > 0.0 { minimizer_cost(lag, stop, end, t - s)? } else { 0.0 };
        let residual = full - head - tail;
        let relative = residual.abs() / (1.0 + full.abs());
        if relative > report.max_relative {
            report.max_relative = relative;
            report.max_residual = residual;
            report.worst_atom = i;
        }
    }
    report.pass = report.max_relative <= tol::RESTRICTION_RESIDUAL_REL;
    Ok(report)
}

fn minimizer_cost(lag: &Lagrangian, x: &Point, y: &Point, t: f64) -> Result<f64> {
    crate::minimizer::cost_fast(lag, x, y, t)
}

/// Outcome of re-solving the transport problem at an intermediate time.
#[derive(Debug, Clone, PartialEq)]
pub struct MidpointReport {
    pub pass: bool,
    pub lp_cost: f64,
    pub pairing_cost: f64,
    /// Plan rows that do not pair atom `i` with its own stopped image.
    pub mismatched_rows: usize,
}

/// Solves the discrete problem between the source measure and the
/// stopped measure at `s` with the time-`s` cost. The stopped pairing
/// must be the LP optimum: equal value and the identity pairing as the
/// plan graph.
pub fn verify_midpoint_optimality(path: &InterpolationPath, s: f64) -> Result<MidpointReport> {
    let k = path.grid_index(s)?;
    if !(s > 0.0) {
        return Err(LotError::Input("midpoint verification needs an interior time".into()));
    }
    let mu_s = &path.measures[k];
    let c = kantorovich::cost_matrix(path.lag, &path.mu0, mu_s, s)?;
    let (plan, _) = kantorovich::solve_exact(&c, &path.mu0, mu_s)?;
    let lp_cost = plan.cost_against(&c);
    let pairing_cost: f64 =
        path.mu0.weights.iter().enumerate().map(|(i, w)| w * c[i][i]).sum();
    let mismatched = plan.entries.iter().filter(|&&(i, j, _)| i != j).count();
    let pass = mismatched == 0
        && (lp_cost - pairing_cost).abs() <= tol::MIDPOINT_LP_REL * (1.0 + lp_cost.abs());
    Ok(MidpointReport { pass, lp_cost, pairing_cost, mismatched_rows: mismatched })
}

/// Injectivity and inverse-regularity diagnostics at an intermediate
/// time.
#[derive(Debug, Clone, PartialEq)]
pub struct InjectivityReport {
    pub pass: bool,
    pub min_image_distance: f64,
    /// First colliding atom pair, if any.
    pub colliding: Option<(usize, usize)>,
    /// Empirical Lipschitz constant of the inverse map over all image
    /// pairs, and the same estimate on the even-indexed subsample.
    pub inverse_lipschitz: f64,
    pub inverse_lipschitz_half: f64,
    /// Same pair of estimates for the composed map sending stopped
    /// images to terminal images.
    pub composed_lipschitz: f64,
    pub composed_lipschitz_half: f64,
    /// Nearest-neighbor spacing of the stopped images relative to the
    /// sources; reported only, never gated (no finite sample certifies
    /// absolute continuity).
    pub spacing_ratio: f64,
}

/// Checks that the stopped images are pairwise distinct and that the
/// inverse and composed maps have finite, refinement-stable empirical
/// Lipschitz constants: the full-sample estimate may not exceed twice
/// the half-sample estimate.
pub fn verify_injectivity_and_inverse(
    path: &InterpolationPath,
    s: f64,
) -> Result<InjectivityReport> {
    let k = path.grid_index(s)?;
    let m = &path.lag.manifold;
    let stopped = &path.maps[k].images;
    let sources = &path.mu0.support;
    let terminal = &path.terminal.images;
    let n = stopped.len();

    let mut min_dist = f64::INFINITY;
    let mut colliding = None;
    for a in 0..n {
        for b in a + 1..n {
            let d = m.dist(&stopped[a], &stopped[b]);
            if d < min_dist {
                min_dist = d;
                if d == 0.0 && colliding.is_none() {
                    colliding = Some((a, b));
                }
            }
        }
    }

    let ratio_over = |num: &dyn Fn(usize, usize) -> f64, stride: usize| -> f64 {
        let mut worst = 0.0f64;
        let mut a = 0;
        while a < n {
            let mut b = a + stride;
            while b < n {
                let den = m.dist(&stopped[a], &stopped[b]);
                if den > 0.0 {
                    worst = worst.max(num(a, b) / den);
                }
                b += stride;
            }
            a += stride;
        }
        worst
    };
    let src = |a: usize, b: usize| m.dist(&sources[a], &sources[b]);
    let term = |a: usize, b: usize| m.dist(&terminal[a], &terminal[b]);
    let inverse_lipschitz = ratio_over(&src, 1);
    let inverse_lipschitz_half = ratio_over(&src, 2);
    let composed_lipschitz = ratio_over(&term, 1);
    let composed_lipschitz_half = ratio_over(&term, 2);

    let nn = |pts: &[Point]| -> f64 {
        let mut worst = f64::INFINITY;
        for a in 0..pts.len() {
            let mut best = f64::INFINITY;
            for b in 0..pts.len() {
                if a != b {
                    best = best.min(m.dist(&pts[a], &pts[b]));
                }
            }
            worst = worst.min(best);
        }
        worst
    };
    let spacing_ratio = nn(stopped) / nn(sources);

    let stable = |full: f64, half: f64| -> bool {
        full.is_finite() && (n < 4 || full <= 2.0 * half + 1e-6)
    };
    let pass = colliding.is_none()
        && min_dist > 0.0
        && stable(inverse_lipschitz, inverse_lipschitz_half)
        && stable(composed_lipschitz, composed_lipschitz_half);
    Ok(InjectivityReport {
        pass,
        min_image_distance: min_dist,
        colliding,
        inverse_lipschitz,
        inverse_lipschitz_half,
        composed_lipschitz,
        composed_lipschitz_half,
        spacing_ratio,
    })
}
