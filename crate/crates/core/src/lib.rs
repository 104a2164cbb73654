//! Ordinal pattern probabilities for random walks with symmetric steps.
//!
//! * [`perm`]: permutations, pattern extraction, sign matrices, level counts.
//! * [`exact`]: exact Laplace and universal (almost-consecutive) probabilities.
//! * [`affine`]: exact uniform-step probabilities by alcove counting.
//! * [`gaussian`]: the level-matrix order comparing normal-step probabilities.
//! * [`montecarlo`]: seeded, reproducible random-walk simulation.
//! * [`analysis`]: pattern frequencies, permutation entropy and KL fingerprints.

pub mod affine;
pub mod analysis;
pub mod error;
pub mod exact;
pub mod gaussian;
pub mod guard;
pub mod montecarlo;
pub mod perm;

pub use error::{Error, Result};
pub use exact::{PatternDistribution, Rational};
pub use perm::{
    is_almost_consecutive, level_vector, ordinal_pattern, parse_permutation, pattern_from_steps,
    sign_matrix, LevelVector, Permutation, SignMatrix, TiePolicy,
};
