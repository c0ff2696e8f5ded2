//! Maximal lotteries as maximin strategies of the margin game.
//!
//! A lottery `π` is maximal when `πᵀ M π' >= 0` for every lottery `π'`. By
//! linearity it suffices to check pure responses, so `π` is maximal exactly
//! when every entry of `πᵀ M` is nonnegative. Since `M` is antisymmetric the
//! game value is zero, and a maximal lottery is any optimal strategy of the
//! symmetric zero-sum game with payoff `M`.
//!
//! The selection-probability game with payoff `P̃ = (M / n + J) / 2` is an
//! affine image of the normalized margin game, so it has the same optimal
//! strategies and value 1/2. [`maximal_lottery_from_selection`] solves that
//! game directly.

pub(crate) mod iterative;
mod simplex;

pub use iterative::{maximal_lottery_iterative, StepSchedule};

use crate::error::{Error, Result};
use crate::lottery::Lottery;
use crate::matrix::SquareMatrix;
use crate::prefs::{AlternativeSet, MarginMatrix, SelectionMatrix};

/// Certificate tolerance for the exact (LP) path.
pub const LP_EPSILON: f64 = 1e-9;
/// Certificate tolerance for the iterative path.
pub const ITERATIVE_EPSILON: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaximalityReport {
    /// `min_j (πᵀ M)_j`.
    pub worst_column_payoff: f64,
    pub is_maximal: bool,
    pub epsilon: f64,
    /// `πᵀ M π`.
    pub game_value: f64,
}

/// Optimal row strategy and value of the zero-sum game with row payoff `payoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximinSolution {
    pub strategy: Vec<f64>,
    pub value: f64,
}

/// Maximizes `min_j (πᵀ A)_j` over the simplex.
///
/// The row player of `A` is the minimizing column player of `-Aᵀ`. Shifting
/// that matrix by `s = 1 + max A` makes it strictly positive, after which
/// `max Σ y  s.t. (s - Aᵀ) y <= 1` gives `π = y / Σ y` and value `s - 1 / Σ y`.
pub fn maximin(payoff: &SquareMatrix<f64>) -> Result<MaximinSolution> {
    if !payoff.is_finite() {
        return Err(Error::NonFinite("payoff matrix"));
    }
    let max = payoff
        .off_diagonal()
        .chain((0..payoff.size()).map(|i| (i, i)))
        .map(|p| payoff[p])
        .fold(f64::NEG_INFINITY, f64::max);
    let shift = 1.0 + max;
    let positive = SquareMatrix::from_fn(payoff.size(), |j, i| shift - payoff[(i, j)]);
    let solution = simplex::solve_packing(&positive)?;
    let total: f64 = solution.y.iter().sum();
    let strategy = solution.y.iter().map(|y| (y / total).max(0.0)).collect::<Vec<_>>();
    let norm: f64 = strategy.iter().sum();
    Ok(MaximinSolution {
        strategy: strategy.iter().map(|p| p / norm).collect(),
        value: shift - 1.0 / total,
    })
}

/// Exact maximal lottery by linear programming on `M / n`.
pub fn maximal_lottery_lp(margin: &MarginMatrix) -> Result<Lottery> {
    let solution = maximin(&margin.normalized())?;
    Lottery::new(margin.alternatives().clone(), solution.strategy)
}

/// Maximal lottery of a floating point margin matrix; checks antisymmetry
/// to within `1e-12` relative to the largest entry.
pub fn maximal_lottery_lp_f64(alternatives: &AlternativeSet, margin: &SquareMatrix<f64>) -> Result<Lottery> {
    check_dimension(alternatives.len(), margin.size())?;
    if !margin.is_finite() {
        return Err(Error::NonFinite("margin matrix"));
    }
    let scale = margin
        .off_diagonal()
        .map(|p| margin[p].abs())
        .fold(0.0, f64::max)
        .max(1.0);
    for i in 0..margin.size() {
        for j in 0..margin.size() {
            if (margin[(i, j)] + margin[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::NotAntisymmetric { row: i, col: j });
            }
        }
    }
    let solution = maximin(margin)?;
    Lottery::new(alternatives.clone(), solution.strategy)
}

/// Maximal lottery from the selection game `max_π min_π' πᵀ P̃ π'`.
pub fn maximal_lottery_from_selection(selection: &SelectionMatrix) -> Result<Lottery> {
    let solution = maximin(selection.matrix())?;
    Lottery::new(selection.alternatives().clone(), solution.strategy)
}

/// Checks `min_j (πᵀ M)_j >= -epsilon` on the raw margins.
pub fn verify_maximality(margin: &MarginMatrix, lottery: &Lottery, epsilon: f64) -> Result<MaximalityReport> {
    verify_on_payoff(&margin.to_f64(), lottery, epsilon)
}

/// Same certificate against an arbitrary antisymmetric payoff.
pub fn verify_on_payoff(payoff: &SquareMatrix<f64>, lottery: &Lottery, epsilon: f64) -> Result<MaximalityReport> {
    check_dimension(payoff.size(), lottery.probabilities().len())?;
    let pi = lottery.probabilities();
    let columns = payoff.left_mul(pi);
    let worst = columns.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(MaximalityReport {
        worst_column_payoff: worst,
        is_maximal: worst >= -epsilon,
        epsilon,
        game_value: columns.iter().zip(pi).map(|(c, p)| c * p).sum(),
    })
}

/// How much a best response gains against `strategy` in the symmetric game
/// with payoff `payoff` and value `value`: `value - min_j (πᵀ A)_j`.
pub fn exploitability(payoff: &SquareMatrix<f64>, strategy: &[f64], value: f64) -> f64 {
    let worst = payoff
        .left_mul(strategy)
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    value - worst
}

fn check_dimension(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}
