//! Log-domain entropic scaling, used strictly as a warm start.
//!
//! The exact solvers own the final answer; this module only produces
//! approximate dual potentials whose reduced costs can reorder the
//! network simplex's greedy initialization. Log-domain updates keep the
//! iteration stable for small regularization.

use crate::error::{LotError, Result};

#[derive(Debug, Clone)]
pub struct SinkhornScaling {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub epsilon: f64,
    pub iterations: usize,
    /// Worst row/column marginal defect of the implied entropic plan.
    pub marginal_error: f64,
}

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = terms.collect();
    let m = xs.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Runs alternating log-domain updates until the marginal error falls
/// below `target` or `max_iters` is reached. Never errors on slow
/// convergence: a half-converged warm start is still a valid ranking.
pub fn log_domain_scaling(
    c: &[Vec<f64>],
    a: &[f64],
    b: &[f64],
    epsilon: f64,
    max_iters: usize,
    target: f64,
) -> Result<SinkhornScaling> {
    let n = a.len();
    let m = b.len();
    if c.len() != n || c.iter().any(|row| row.len() != m) {
        return Err(LotError::Input("cost matrix shape does not match marginals".into()));
    }
    if !(epsilon > 0.0) {
        return Err(LotError::Input("entropic regularization must be positive".into()));
    }
    let la: Vec<f64> = a.iter().map(|w| w.ln()).collect();
    let lb: Vec<f64> = b.iter().map(|w| w.ln()).collect();
    let mut f = vec![0.0f64; n];
    let mut g = vec![0.0f64; m];
    let mut err = f64::INFINITY;
    let mut iters = 0usize;
    while iters < max_iters && err > target {
        for i in 0..n {
            f[i] = -epsilon
                * log_sum_exp((0..m).map(|j| (g[j] - c[i][j]) / epsilon + lb[j]));
        }
        for j in 0..m {
            g[j] = -epsilon
                * log_sum_exp((0..n).map(|i| (f[i] - c[i][j]) / epsilon + la[i]));
        }
        iters += 1;
        if iters % 10 == 0 || iters == max_iters {
            err = marginal_error(c, a, b, &f, &g, epsilon);
        }
    }
    let err = marginal_error(c, a, b, &f, &g, epsilon);
    Ok(SinkhornScaling { f, g, epsilon, iterations: iters, marginal_error: err })
}

fn marginal_error(
    c: &[Vec<f64>],
    a: &[f64],
    b: &[f64],
    f: &[f64],
    g: &[f64],
    epsilon: f64,
) -> f64 {
    let n = a.len();
    let m = b.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        let row: f64 = (0..m)
            .map(|j| a[i] * b[j] * ((f[i] + g[j] - c[i][j]) / epsilon).exp())
            .sum();
        worst = worst.max((row - a[i]).abs());
    }
    for j in 0..m {
        let col: f64 = (0..n)
            .map(|i| a[i] * b[j] * ((f[i] + g[j] - c[i][j]) / epsilon).exp())
            .sum();
        worst = worst.max((col - b[j]).abs());
    }
    worst
}

/// Reduced-cost matrix for seeding the simplex's greedy order: small
/// entries are the cells the entropic plan concentrates on.
pub fn ranking_matrix(c: &[Vec<f64>], scaling: &SinkhornScaling) -> Vec<Vec<f64>> {
    c.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &cij)| cij - scaling.f[i] - scaling.g[j])
                .collect()
        })
        .collect()
}
