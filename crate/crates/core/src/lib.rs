//! Preference aggregation over finite alternative sets.
//!
//! The crate computes **maximal lotteries**, the optimal mixed strategies of
//! the symmetric zero-sum game whose payoff is the pairwise margin matrix
//! `M = N - Nᵀ`, and contrasts them with the Borda ordering that a
//! Bradley–Terry reward model followed by a greedy policy produces.
//!
//! * [`prefs`]: alternatives, weighted strict-ranking profiles, the count,
//!   margin and selection matrices, and synthetic comparison datasets.
//! * [`voting`]: Borda, majority and Condorcet winners, Smith sets and
//!   random dictatorship.
//! * [`solver`]: exact maximal lotteries by linear programming, a
//!   multiplicative-weights oracle, and the maximality certificate.
//! * [`btl`]: tabular Bradley–Terry maximum likelihood and softmax policies.
//! * [`selfplay`]: tabular self-play preference optimization.
//!
//! ```
//! use maxlottery::prefs::{margin_matrix, pairwise_counts, PreferenceProfile};
//! use maxlottery::solver::maximal_lottery_lp;
//!
//! let profile = PreferenceProfile::from_rankings(
//!     &["R", "G", "B"],
//!     &[(&["R", "G", "B"], 2), (&["B", "R", "G"], 3)],
//! )?;
//! let lottery = maximal_lottery_lp(&margin_matrix(&pairwise_counts(&profile)))?;
//! assert!(lottery.prob_of("B")? > 0.999_999);
//! # Ok::<(), maxlottery::Error>(())
//! ```

pub mod btl;
mod error;
pub mod lottery;
pub mod matrix;
pub mod prefs;
pub mod rng;
pub mod selfplay;
pub mod solver;
pub mod voting;

pub use error::{Error, Result};
pub use lottery::Lottery;
pub use prefs::{AlternativeSet, PreferenceProfile};
