//! Shortest-augmenting-path solver for the square assignment problem.
//!
//! The equal-weights specialization of the transportation problem: one
//! unit atom per row and column. Dijkstra-style augmentation over
//! reduced costs handles degenerate ties without perturbation and runs
//! in O(n^3), which keeps the equal-weight path fast at the sizes the
//! acceptance suite uses. Duals come out in the standard convention
//! `u[i] + v[j] <= c[i][j]` with equality on matched pairs.

use crate::error::{LotError, Result};

#[derive(Debug, Clone)]
pub struct AssignmentSolution {
    /// `row_to_col[i]` is the column matched to row `i`.
    pub row_to_col: Vec<usize>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub objective: f64,
}

pub fn solve_assignment(c: &[Vec<f64>]) -> Result<AssignmentSolution> {
    let n = c.len();
    if n == 0 || c.iter().any(|row| row.len() != n) {
        return Err(LotError::Input("assignment needs a square nonempty matrix".into()));
    }
    if c.iter().flatten().any(|x| !x.is_finite()) {
        return Err(LotError::Input("cost matrix has non-finite entries".into()));
    }

    // Column-indexed matching with a sentinel column `n` that carries
    // the row currently looking for an augmenting path.
    let sentinel = n;
    let mut u = vec![0.0f64; n];
    let mut v = vec![0.0f64; n + 1];
    let mut matched_row: Vec<usize> = vec![usize::MAX; n + 1];

    for row in 0..n {
        matched_row[sentinel] = row;
        let mut j0 = sentinel;
        let mut min_slack = vec![f64::INFINITY; n + 1];
        let mut came_from = vec![sentinel; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = sentinel;
            for j in 0..n {
                if used[j] {
                    continue;
                }
                let slack = c[i0][j] - u[i0] - v[j];
                if slack < min_slack[j] {
                    min_slack[j] = slack;
                    came_from[j] = j0;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    if matched_row[j] != usize::MAX {
                        u[matched_row[j]] += delta;
                    }
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == usize::MAX {
                break;
            }
        }
        // Augment along the alternating path.
        while j0 != sentinel {
            let j1 = came_from[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
        }
    }

    let mut row_to_col = vec![usize::MAX; n];
    for j in 0..n {
        row_to_col[matched_row[j]] = j;
    }
    let objective: f64 = (0..n).map(|i| c[i][row_to_col[i]]).sum();
    let v = v[..n].to_vec();
    Ok(AssignmentSolution { row_to_col, u, v, objective })
}

/// Dual-feasibility and tightness check; errors describe the first
/// violated certificate.
pub fn verify_certificates(c: &[Vec<f64>], sol: &AssignmentSolution, tol: f64) -> Result<()> {
    let n = c.len();
    for i in 0..n {
        for j in 0..n {
            if sol.u[i] + sol.v[j] > c[i][j] + tol {
                return Err(LotError::Numerical(format!(
                    "dual infeasibility {:.3e} at ({i},{j})",
                    sol.u[i] + sol.v[j] - c[i][j]
                )));
            }
        }
    }
    for (i, &j) in sol.row_to_col.iter().enumerate() {
        if (c[i][j] - sol.u[i] - sol.v[j]).abs() > tol {
            return Err(LotError::Numerical(format!(
                "matched pair ({i},{j}) is not tight"
            )));
        }
    }
    let dual: f64 = sol.u.iter().sum::<f64>() + sol.v.iter().sum::<f64>();
    if (dual - sol.objective).abs() > tol * (1.0 + sol.objective.abs()) {
        return Err(LotError::Numerical(format!(
            "assignment duality gap {:.3e}",
            (dual - sol.objective).abs()
        )));
    }
    Ok(())
}
