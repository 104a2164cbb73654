//! Seeded random-walk simulation.
//!
//! Trials are split into fixed batches of [`BATCH_SIZE`]. Batch `b` of a run
//! with seed `s` draws from `ChaCha8Rng::seed_from_u64(s)` switched to stream
//! `b` (see [`batch_rng`]). Counts are merged by addition, so results depend
//! only on `(distribution, pattern size, trials, seed)` and never on the
//! number of worker threads.

use std::f64::consts::TAU;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::PatternDistribution;
use crate::guard;
use crate::perm::{factorial, pattern_rank_of_positions, Permutation};

/// Trials per RNG stream.
pub const BATCH_SIZE: u64 = 1 << 16;

/// Symmetric step distributions, scale fixed to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepDistribution {
    /// Uniform on [-1, 1].
    UniformPm1,
    /// Density ½·e^{-|x|}.
    LaplaceUnit,
    /// Standard normal.
    NormalUnit,
}

impl StepDistribution {
    pub const ALL: [StepDistribution; 3] = [Self::UniformPm1, Self::LaplaceUnit, Self::NormalUnit];

    pub fn name(self) -> &'static str {
        match self {
            Self::UniformPm1 => "uniform",
            Self::LaplaceUnit => "laplace",
            Self::NormalUnit => "normal",
        }
    }
}

impl FromStr for StepDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" | "uniform_pm1" => Ok(Self::UniformPm1),
            "laplace" | "laplace_unit" => Ok(Self::LaplaceUnit),
            "normal" | "normal_unit" => Ok(Self::NormalUnit),
            other => Err(Error::InvalidArgument(format!("unknown distribution {other:?}"))),
        }
    }
}

/// A Bernoulli frequency with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub standard_error: f64,
    pub trials: u64,
}

impl Estimate {
    pub fn from_counts(hits: u64, trials: u64) -> Self {
        let value = if trials == 0 { 0.0 } else { hits as f64 / trials as f64 };
        let standard_error =
            if trials == 0 { 0.0 } else { (value * (1.0 - value) / trials as f64).sqrt() };
        Self { value, standard_error, trials }
    }

    /// Distance from `expected` in standard errors (infinite if the error is zero and they differ).
    pub fn z_score(&self, expected: f64) -> f64 {
        let diff = (self.value - expected).abs();
        if diff == 0.0 {
            0.0
        } else if self.standard_error == 0.0 {
            f64::INFINITY
        } else {
            diff / self.standard_error
        }
    }
}

/// The RNG for batch `batch` of a run seeded with `seed`.
pub fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

/// Fills `out` with i.i.d. draws from `dist`.
pub fn fill_steps<R: Rng + ?Sized>(dist: StepDistribution, out: &mut [f64], rng: &mut R) {
    match dist {
        StepDistribution::UniformPm1 => {
            for x in out.iter_mut() {
                *x = 2.0 * rng.random::<f64>() - 1.0;
            }
        }
        StepDistribution::LaplaceUnit => {
            for x in out.iter_mut() {
                // 1 - u lies in (0, 1]
                let e = -(1.0 - rng.random::<f64>()).ln();
                *x = if rng.random::<bool>() { e } else { -e };
            }
        }
        StepDistribution::NormalUnit => {
            // Box–Muller: exactly two uniforms per pair of normals
            for pair in out.chunks_mut(2) {
                let u1 = 1.0 - rng.random::<f64>();
                let u2 = rng.random::<f64>();
                let r = (-2.0 * u1.ln()).sqrt();
                let (s, c) = (TAU * u2).sin_cos();
                pair[0] = r * c;
                if let Some(second) = pair.get_mut(1) {
                    *second = r * s;
                }
            }
        }
    }
}

pub fn sample_steps<R: Rng + ?Sized>(dist: StepDistribution, n: usize, rng: &mut R) -> Vec<f64> {
    let mut out = vec![0.0; n];
    fill_steps(dist, &mut out, rng);
    out
}

/// Positions of a single walk of `steps` steps starting at 0.
pub fn simulate_walk(dist: StepDistribution, steps: usize, seed: u64) -> Vec<f64> {
    let mut rng = batch_rng(seed, 0);
    let mut out = Vec::with_capacity(steps + 1);
    let mut z = 0.0;
    out.push(z);
    let mut buf = vec![0.0; 1024];
    let mut remaining = steps;
    while remaining > 0 {
        let k = remaining.min(buf.len());
        fill_steps(dist, &mut buf[..k], &mut rng);
        for &x in &buf[..k] {
            z += x;
            out.push(z);
        }
        remaining -= k;
    }
    out
}

/// Reusable buffers for drawing one untied walk at a time.
struct WalkSampler {
    dist: StepDistribution,
    steps: Vec<f64>,
    positions: Vec<f64>,
}

impl WalkSampler {
    fn new(dist: StepDistribution, m: usize) -> Self {
        Self { dist, steps: vec![0.0; m - 1], positions: vec![0.0; m] }
    }

    /// Lexicographic rank of the pattern of a fresh walk; tied walks are redrawn.
    fn next_rank<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        loop {
            fill_steps(self.dist, &mut self.steps, rng);
            let mut z = 0.0;
            self.positions[0] = 0.0;
            for (k, &x) in self.steps.iter().enumerate() {
                z += x;
                self.positions[k + 1] = z;
            }
            if let Some(rank) = pattern_rank_of_positions(&self.positions) {
                return rank;
            }
        }
    }
}

fn batches(trials: u64) -> impl ParallelIterator<Item = (u64, u64)> {
    let n = trials.div_ceil(BATCH_SIZE);
    (0..n).into_par_iter().map(move |b| (b, BATCH_SIZE.min(trials - b * BATCH_SIZE)))
}

/// Fraction of simulated walks whose pattern is `pi`.
pub fn estimate_probability(
    dist: StepDistribution,
    pi: &Permutation,
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let m = pi.len();
    if m < 2 {
        return Err(Error::TooShort { len: m, min: 2 });
    }
    let target = pi.lex_rank();
    let hits: u64 = batches(trials)
        .map(|(b, len)| {
            let mut rng = batch_rng(seed, b);
            let mut sampler = WalkSampler::new(dist, m);
            (0..len).filter(|_| sampler.next_rank(&mut rng) == target).count() as u64
        })
        .sum();
    Ok(Estimate::from_counts(hits, trials))
}

/// Empirical pattern distribution over S_m from `trials` simulated walks.
pub fn estimate_distribution(
    dist: StepDistribution,
    m: usize,
    trials: u64,
    seed: u64,
) -> Result<PatternDistribution> {
    if m < 2 {
        return Err(Error::TooShort { len: m, min: 2 });
    }
    guard::check(m, guard::DISTRIBUTION_MAX)?;
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let size = factorial(m);
    let counts = batches(trials)
        .fold(
            || vec![0u64; size],
            |mut acc, (b, len)| {
                let mut rng = batch_rng(seed, b);
                let mut sampler = WalkSampler::new(dist, m);
                for _ in 0..len {
                    acc[sampler.next_rank(&mut rng)] += 1;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; size],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    PatternDistribution::empirical(m, counts)
}
