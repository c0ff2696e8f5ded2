use num_traits::{Signed, Zero};

use super::{half, one, weight_to_f64, AlternativeSet, PreferenceProfile, Weight};
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// Strict-preference counts `N`, indifference counts `E` and per-pair totals.
///
/// Counts built from a profile have the same total `n` for every pair.
/// Counts built from a sampled dataset carry one total per pair, so that
/// normalization happens pair by pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseCounts {
    alternatives: AlternativeSet,
    strict: SquareMatrix<Weight>,
    indifferent: SquareMatrix<Weight>,
    totals: SquareMatrix<Weight>,
}

impl PairwiseCounts {
    /// Validates `N` (nonnegative, zero diagonal) and `E` (nonnegative,
    /// symmetric, zero diagonal), and derives the per-pair totals.
    pub fn from_matrices(
        alternatives: AlternativeSet,
        strict: SquareMatrix<Weight>,
        indifferent: SquareMatrix<Weight>,
    ) -> Result<Self> {
        let m = alternatives.len();
        for size in [strict.size(), indifferent.size()] {
            if size != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: size,
                });
            }
        }
        for i in 0..m {
            if !strict[(i, i)].is_zero() || !indifferent[(i, i)].is_zero() {
                return Err(Error::InvalidCounts(format!("nonzero diagonal at {i}")));
            }
            for j in 0..m {
                if strict[(i, j)].is_negative() || indifferent[(i, j)].is_negative() {
                    return Err(Error::InvalidCounts(format!("negative entry at ({i}, {j})")));
                }
                if indifferent[(i, j)] != indifferent[(j, i)] {
                    return Err(Error::InvalidCounts(format!(
                        "indifference not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let totals = SquareMatrix::from_fn(m, |i, j| {
            if i == j {
                Weight::zero()
            } else {
                strict[(i, j)] + strict[(j, i)] + indifferent[(i, j)]
            }
        });
        Ok(PairwiseCounts {
            alternatives,
            strict,
            indifferent,
            totals,
        })
    }

    /// Like [`PairwiseCounts::from_matrices`] but additionally requires every
    /// pair to sum to `total`.
    pub fn with_total(
        alternatives: AlternativeSet,
        strict: SquareMatrix<Weight>,
        indifferent: SquareMatrix<Weight>,
        total: Weight,
    ) -> Result<Self> {
        let counts = Self::from_matrices(alternatives, strict, indifferent)?;
        if let Some((i, j)) = counts.totals.off_diagonal().find(|&p| counts.totals[p] != total) {
            return Err(Error::InvalidCounts(format!(
                "pair ({i}, {j}) sums to {}, expected {total}",
                counts.totals[(i, j)]
            )));
        }
        Ok(counts)
    }

    pub fn alternatives(&self) -> &AlternativeSet {
        &self.alternatives
    }

    pub fn len(&self) -> usize {
        self.alternatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alternatives.is_empty()
    }

    /// `N(a, b)`: weight strictly preferring `a` to `b`.
    pub fn strict(&self, a: usize, b: usize) -> Weight {
        self.strict[(a, b)]
    }

    /// `E(a, b)`: weight indifferent between `a` and `b`.
    pub fn indifferent(&self, a: usize, b: usize) -> Weight {
        self.indifferent[(a, b)]
    }

    pub fn pair_total(&self, a: usize, b: usize) -> Weight {
        self.totals[(a, b)]
    }

    pub fn strict_matrix(&self) -> &SquareMatrix<Weight> {
        &self.strict
    }

    pub fn indifference_matrix(&self) -> &SquareMatrix<Weight> {
        &self.indifferent
    }

    /// The common pair total `n`, if every pair has the same one.
    pub fn uniform_total(&self) -> Option<Weight> {
        let first = self.totals[(0, 1)];
        self.totals
            .off_diagonal()
            .all(|p| self.totals[p] == first)
            .then_some(first)
    }

    /// Largest pair total; bounds every margin in absolute value.
    pub fn max_total(&self) -> Weight {
        self.totals
            .off_diagonal()
            .map(|p| self.totals[p])
            .max()
            .unwrap_or_else(Weight::zero)
    }

    /// Whether `a` takes part in at least one comparison.
    pub fn is_present(&self, a: usize) -> bool {
        (0..self.len()).any(|b| b != a && self.totals[(a, b)].is_positive())
    }

    /// Borda-style row sums `Σ_b N(a, b)`.
    pub fn wins(&self, a: usize) -> Weight {
        self.strict.row(a).iter().copied().sum()
    }
}

/// `N(a, b)` = total weight of groups ranking `a` above `b`; `E = 0`.
pub fn pairwise_counts(profile: &PreferenceProfile) -> PairwiseCounts {
    let m = profile.alternatives().len();
    let mut strict = SquareMatrix::filled(m, Weight::zero());
    for group in profile.groups() {
        let pos = group.positions();
        for (a, b) in strict.off_diagonal().collect::<Vec<_>>() {
            if pos[a] < pos[b] {
                strict[(a, b)] += group.weight;
            }
        }
    }
    let total = profile.total_weight();
    PairwiseCounts::with_total(
        profile.alternatives().clone(),
        strict,
        SquareMatrix::filled(m, Weight::zero()),
        total,
    )
    .expect("a valid profile yields consistent counts")
}

/// Exact antisymmetric margin matrix `M = N - Nᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginMatrix {
    alternatives: AlternativeSet,
    margins: SquareMatrix<Weight>,
    scale: Weight,
}

impl MarginMatrix {
    /// Validates exact antisymmetry. `scale` is the population weight `n`
    /// used by [`MarginMatrix::normalized`]; entries must lie in `[-n, n]`.
    pub fn new(alternatives: AlternativeSet, margins: SquareMatrix<Weight>, scale: Weight) -> Result<Self> {
        let m = alternatives.len();
        if margins.size() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: margins.size(),
            });
        }
        if !scale.is_positive() {
            return Err(Error::InvalidArgument("margin scale must be positive".into()));
        }
        for i in 0..m {
            for j in 0..m {
                if margins[(i, j)] != -margins[(j, i)] {
                    return Err(Error::NotAntisymmetric { row: i, col: j });
                }
                if margins[(i, j)].abs() > scale {
                    return Err(Error::InvalidArgument(format!(
                        "margin at ({i}, {j}) exceeds scale {scale}"
                    )));
                }
            }
        }
        Ok(MarginMatrix {
            alternatives,
            margins,
            scale,
        })
    }

    /// Integer margins with the scale taken as the largest absolute entry
    /// (or 1 for the zero matrix).
    pub fn from_integers(alternatives: AlternativeSet, rows: Vec<Vec<i64>>) -> Result<Self> {
        let found = rows.len();
        let margins = SquareMatrix::from_rows(rows)
            .ok_or(Error::DimensionMismatch {
                expected: alternatives.len(),
                found,
            })?
            .map(|&v| Weight::from_integer(v));
        let scale = margins
            .off_diagonal()
            .map(|p| margins[p].abs())
            .max()
            .filter(|s| s.is_positive())
            .unwrap_or_else(one);
        Self::new(alternatives, margins, scale)
    }

    /// The margin game equivalent to a selection game: `2P̃ - J` off the
    /// diagonal. Needs the exact form of the selection matrix.
    pub fn from_selection(selection: &SelectionMatrix) -> Result<Self> {
        let exact = selection.exact().ok_or_else(|| {
            Error::InvalidSelection("selection matrix has no exact form".into())
        })?;
        let m = exact.size();
        let margins = SquareMatrix::from_fn(m, |i, j| {
            if i == j {
                Weight::zero()
            } else {
                exact[(i, j)] * Weight::from_integer(2) - one()
            }
        });
        Self::new(selection.alternatives().clone(), margins, one())
    }

    pub fn alternatives(&self) -> &AlternativeSet {
        &self.alternatives
    }

    pub fn len(&self) -> usize {
        self.alternatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alternatives.is_empty()
    }

    pub fn get(&self, a: usize, b: usize) -> Weight {
        self.margins[(a, b)]
    }

    pub fn exact(&self) -> &SquareMatrix<Weight> {
        &self.margins
    }

    pub fn scale(&self) -> Weight {
        self.scale
    }

    pub fn to_f64(&self) -> SquareMatrix<f64> {
        self.margins.map(|&w| weight_to_f64(w))
    }

    /// `M̃ = M / n`.
    pub fn normalized(&self) -> SquareMatrix<f64> {
        self.margins.map(|&w| weight_to_f64(w / self.scale))
    }

    /// Exact `M / c` for a positive constant `c`.
    pub fn scaled_down(&self, c: Weight) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::InvalidArgument("scale divisor must be positive".into()));
        }
        Ok(MarginMatrix {
            alternatives: self.alternatives.clone(),
            margins: self.margins.map(|&w| w / c),
            scale: self.scale / c,
        })
    }

    pub fn negated(&self) -> Self {
        MarginMatrix {
            alternatives: self.alternatives.clone(),
            margins: self.margins.map(|&w| -w),
            scale: self.scale,
        }
    }
}

pub fn margin_matrix(counts: &PairwiseCounts) -> MarginMatrix {
    let m = counts.len();
    let margins = SquareMatrix::from_fn(m, |a, b| counts.strict(a, b) - counts.strict(b, a));
    let scale = Some(counts.max_total())
        .filter(|s| s.is_positive())
        .unwrap_or_else(one);
    MarginMatrix::new(counts.alternatives().clone(), margins, scale)
        .expect("N - Nᵀ is antisymmetric and bounded by the pair totals")
}

/// Selection probabilities `P̃(a ≻ b)` with `P̃(a, b) + P̃(b, a) = 1` and a
/// diagonal of 1/2.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionMatrix {
    alternatives: AlternativeSet,
    probs: SquareMatrix<f64>,
    exact: Option<SquareMatrix<Weight>>,
}

impl SelectionMatrix {
    const TOLERANCE: f64 = 1e-12;

    pub fn new(alternatives: AlternativeSet, probs: SquareMatrix<f64>) -> Result<Self> {
        let m = alternatives.len();
        if probs.size() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: probs.size(),
            });
        }
        for i in 0..m {
            if (probs[(i, i)] - 0.5).abs() > Self::TOLERANCE {
                return Err(Error::InvalidSelection(format!("diagonal at {i} is not 1/2")));
            }
            for j in 0..m {
                let p = probs[(i, j)];
                if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidSelection(format!(
                        "entry ({i}, {j}) = {p} outside [0, 1]"
                    )));
                }
                if (p + probs[(j, i)] - 1.0).abs() > Self::TOLERANCE {
                    return Err(Error::InvalidSelection(format!(
                        "P({i},{j}) + P({j},{i}) != 1"
                    )));
                }
            }
        }
        Ok(SelectionMatrix {
            alternatives,
            probs,
            exact: None,
        })
    }

    /// All entries 1/2: everyone indifferent (or evenly split) everywhere.
    pub fn uniform(alternatives: AlternativeSet) -> Self {
        let m = alternatives.len();
        SelectionMatrix {
            alternatives,
            probs: SquareMatrix::filled(m, 0.5),
            exact: Some(SquareMatrix::filled(m, half())),
        }
    }

    fn from_exact(alternatives: AlternativeSet, exact: SquareMatrix<Weight>) -> Self {
        SelectionMatrix {
            alternatives,
            probs: exact.map(|&w| weight_to_f64(w)),
            exact: Some(exact),
        }
    }

    pub fn alternatives(&self) -> &AlternativeSet {
        &self.alternatives
    }

    pub fn len(&self) -> usize {
        self.alternatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alternatives.is_empty()
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.probs[(a, b)]
    }

    pub fn matrix(&self) -> &SquareMatrix<f64> {
        &self.probs
    }

    /// Exact rational entries, present when built from counts.
    pub fn exact(&self) -> Option<&SquareMatrix<Weight>> {
        self.exact.as_ref()
    }
}

/// `P̃(a, b) = (N(a, b) + E(a, b) / 2) / n_ab`, normalized per pair.
///
/// Pairs that were never compared follow the dataset edge rules: an
/// alternative that appears elsewhere beats one that never appears, and
/// otherwise the pair is scored 1/2.
pub fn selection_matrix(counts: &PairwiseCounts) -> SelectionMatrix {
    let m = counts.len();
    let present: Vec<bool> = (0..m).map(|a| counts.is_present(a)).collect();
    let exact = SquareMatrix::from_fn(m, |a, b| {
        let total = counts.pair_total(a, b);
        if a == b {
            half()
        } else if total.is_positive() {
            (counts.strict(a, b) + counts.indifferent(a, b) * half()) / total
        } else {
            match (present[a], present[b]) {
                (true, false) => one(),
                (false, true) => Weight::zero(),
                _ => half(),
            }
        }
    });
    SelectionMatrix::from_exact(counts.alternatives().clone(), exact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prefs::PreferenceProfile;

    fn w(v: i64) -> Weight {
        Weight::from_integer(v)
    }

    fn majority_split() -> PreferenceProfile {
        PreferenceProfile::from_rankings(
            &["R", "G", "B"],
            &[(&["R", "G", "B"], 2), (&["B", "R", "G"], 3)],
        )
        .unwrap()
    }

    fn cycle() -> PreferenceProfile {
        PreferenceProfile::from_rankings(
            &["R", "G", "B"],
            &[(&["R", "B", "G"], 1), (&["G", "R", "B"], 1), (&["B", "G", "R"], 1)],
        )
        .unwrap()
    }

    #[test]
    fn majority_split_counts() {
        let c = pairwise_counts(&majority_split());
        let (r, g, b) = (0, 1, 2);
        assert_eq!(c.strict(r, g), w(5));
        assert_eq!(c.strict(r, b), w(2));
        assert_eq!(c.strict(b, r), w(3));
        assert_eq!(c.strict(b, g), w(3));
        assert_eq!(c.strict(g, b), w(2));
        assert_eq!(c.strict(g, r), w(0));
        assert_eq!(c.uniform_total(), Some(w(5)));
    }

    #[test]
    fn single_voter_counts() {
        let p = PreferenceProfile::from_rankings(&["a", "b"], &[(&["a", "b"], 1)]).unwrap();
        let c = pairwise_counts(&p);
        assert_eq!(c.strict(0, 1), w(1));
        assert_eq!(c.strict(1, 0), w(0));
    }

    #[test]
    fn cycle_counts() {
        let c = pairwise_counts(&cycle());
        let (r, g, b) = (0, 1, 2);
        assert_eq!(c.strict(r, b), w(2));
        assert_eq!(c.strict(b, g), w(2));
        assert_eq!(c.strict(g, r), w(2));
        assert_eq!(c.strict(b, r), w(1));
        assert_eq!(c.strict(g, b), w(1));
        assert_eq!(c.strict(r, g), w(1));
    }

    #[test]
    fn majority_split_and_cycle_margins() {
        let m = margin_matrix(&pairwise_counts(&majority_split()));
        let expected = [[0, 5, -1], [-5, 0, -1], [1, 1, 0]];
        for (i, row) in expected.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(m.get(i, j), w(v));
            }
        }
        assert_eq!(m.scale(), w(5));

        let m = margin_matrix(&pairwise_counts(&cycle()));
        let expected = [[0, -1, 1], [1, 0, -1], [-1, 1, 0]];
        for (i, row) in expected.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(m.get(i, j), w(v));
            }
        }
    }

    #[test]
    fn all_indifferent_counts_have_zero_margin() {
        let alts = AlternativeSet::new(["a", "b", "c"]).unwrap();
        let e = SquareMatrix::from_fn(3, |i, j| if i == j { w(0) } else { w(4) });
        let c = PairwiseCounts::with_total(alts, SquareMatrix::filled(3, w(0)), e, w(4)).unwrap();
        let m = margin_matrix(&c);
        assert!(m.exact().off_diagonal().all(|p| m.exact()[p].is_zero()));
        let s = selection_matrix(&c);
        assert_eq!(s.get(0, 1), 0.5);
    }

    #[test]
    fn selection_from_counts() {
        let s = selection_matrix(&pairwise_counts(&majority_split()));
        assert_eq!(s.exact().unwrap()[(2, 0)], Weight::new(3, 5));
        assert_eq!(s.get(0, 1), 1.0);
        let s = selection_matrix(&pairwise_counts(&cycle()));
        assert_eq!(s.exact().unwrap()[(0, 2)], Weight::new(2, 3));
    }

    #[test]
    fn inconsistent_totals_rejected() {
        let alts = AlternativeSet::new(["a", "b"]).unwrap();
        let n = SquareMatrix::from_rows(vec![vec![w(0), w(2)], vec![w(1), w(0)]]).unwrap();
        let e = SquareMatrix::filled(2, w(0));
        assert!(PairwiseCounts::with_total(alts.clone(), n.clone(), e.clone(), w(4)).is_err());
        assert!(PairwiseCounts::with_total(alts.clone(), n, e, w(3)).is_ok());
        let asym = SquareMatrix::from_rows(vec![vec![w(0), w(1)], vec![w(0), w(0)]]).unwrap();
        assert!(PairwiseCounts::from_matrices(alts, SquareMatrix::filled(2, w(0)), asym).is_err());
    }

    #[test]
    fn non_antisymmetric_margin_rejected() {
        let alts = AlternativeSet::new(["a", "b"]).unwrap();
        let err = MarginMatrix::from_integers(alts, vec![vec![0, 1], vec![1, 0]]).unwrap_err();
        assert!(matches!(err, Error::NotAntisymmetric { .. }));
    }

    #[test]
    fn selection_validation() {
        let alts = AlternativeSet::new(["a", "b"]).unwrap();
        let bad = SquareMatrix::from_rows(vec![vec![0.5, 0.7], vec![0.7, 0.5]]).unwrap();
        assert!(SelectionMatrix::new(alts.clone(), bad).is_err());
        let good = SquareMatrix::from_rows(vec![vec![0.5, 0.7], vec![0.3, 0.5]]).unwrap();
        assert!(SelectionMatrix::new(alts, good).is_ok());
    }

    #[test]
    fn margin_from_selection_is_affine() {
        let s = selection_matrix(&pairwise_counts(&majority_split()));
        let m = MarginMatrix::from_selection(&s).unwrap();
        // 2 * 3/5 - 1
        assert_eq!(m.get(2, 0), Weight::new(1, 5));
        assert_eq!(m.get(0, 1), w(1));
    }
}
