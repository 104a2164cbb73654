//! Size guards for factorial-sized enumerations.
//!
//! Every guard can be raised (or lowered) through the `ORDPAT_MAX_N`
//! environment variable. Raising it is unsafe in the practical sense: run
//! time and memory grow factorially with the pattern length.

use crate::error::{Error, Result};

/// Environment variable that overrides every size guard.
pub const MAX_N_ENV: &str = "ORDPAT_MAX_N";

/// Largest pattern length for full enumerations over S_m.
pub const DISTRIBUTION_MAX: usize = 9;
/// Largest pattern length for alcove enumeration.
pub const ALCOVE_MAX: usize = 8;
/// Largest pattern length for the Gaussian order closure.
pub const CLOSURE_MAX: usize = 7;

/// Effective limit: `ORDPAT_MAX_N` when set to a positive integer, else `default`.
pub fn limit(default: usize) -> usize {
    std::env::var(MAX_N_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(default)
}

pub(crate) fn check(size: usize, default: usize) -> Result<()> {
    let limit = limit(default);
    if size > limit {
        Err(Error::SizeTooLarge { size, limit })
    } else {
        Ok(())
    }
}
