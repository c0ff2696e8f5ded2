//! Dense tableau simplex for `max Σ y  s.t.  A y <= 1, y >= 0` with `A > 0`.
//!
//! This is the only LP shape the game solver needs: the all-ones right hand
//! side makes the slack basis feasible, and strictly positive `A` keeps the
//! program bounded. Pivoting uses Bland's rule (smallest entering index,
//! smallest leaving basis index on ratio ties), which cannot cycle.

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

const PIVOT_EPS: f64 = 1e-11;

pub(crate) struct PackingSolution {
    pub y: Vec<f64>,
    #[cfg_attr(not(test), allow(dead_code))]
    pub pivots: usize,
}

/// Solves the packing LP for a square positive matrix.
pub(crate) fn solve_packing(a: &SquareMatrix<f64>) -> Result<PackingSolution> {
    let rows = a.size();
    let vars = a.size();
    let cols = vars + rows;
    let width = cols + 1;
    // rows 0..rows are constraints, row `rows` is the objective (reduced costs)
    let mut t = vec![0.0; (rows + 1) * width];
    for i in 0..rows {
        for j in 0..vars {
            t[i * width + j] = a[(i, j)];
        }
        t[i * width + vars + i] = 1.0;
        t[i * width + cols] = 1.0;
    }
    for j in 0..vars {
        t[rows * width + j] = -1.0;
    }
    let mut basis: Vec<usize> = (vars..cols).collect();

    let limit = 50 * (rows + cols) + 1000;
    let mut pivots = 0;
    loop {
        let entering = (0..cols).find(|&j| t[rows * width + j] < -PIVOT_EPS);
        let Some(entering) = entering else { break };

        let mut leaving: Option<(usize, f64)> = None;
        for i in 0..rows {
            let coef = t[i * width + entering];
            if coef <= PIVOT_EPS {
                continue;
            }
            let ratio = t[i * width + cols] / coef;
            leaving = match leaving {
                None => Some((i, ratio)),
                Some((best, best_ratio)) => {
                    let tie = (ratio - best_ratio).abs() <= PIVOT_EPS * best_ratio.abs().max(1.0);
                    if ratio < best_ratio && !tie || tie && basis[i] < basis[best] {
                        Some((i, ratio))
                    } else {
                        Some((best, best_ratio))
                    }
                }
            };
        }
        let (pivot_row, _) = leaving.expect("positive constraint matrix keeps the LP bounded");

        pivot(&mut t, width, rows + 1, pivot_row, entering);
        basis[pivot_row] = entering;
        pivots += 1;
        if pivots > limit {
            return Err(Error::SimplexIterationLimit(limit));
        }
    }

    let mut y = vec![0.0; vars];
    for (i, &b) in basis.iter().enumerate() {
        if b < vars {
            y[b] = t[i * width + cols];
        }
    }
    Ok(PackingSolution { y, pivots })
}

fn pivot(t: &mut [f64], width: usize, height: usize, row: usize, col: usize) {
    let p = t[row * width + col];
    for v in &mut t[row * width..(row + 1) * width] {
        *v /= p;
    }
    let pivot_row: Vec<f64> = t[row * width..(row + 1) * width].to_vec();
    for i in 0..height {
        if i == row {
            continue;
        }
        let factor = t[i * width + col];
        if factor == 0.0 {
            continue;
        }
        for (v, pr) in t[i * width..(i + 1) * width].iter_mut().zip(&pivot_row) {
            *v -= factor * pr;
        }
        t[i * width + col] = 0.0;
    }
}
