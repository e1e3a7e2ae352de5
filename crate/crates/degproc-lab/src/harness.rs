//! Seeded parallel trial loops and summary statistics.

use degproc::rng::{trial_rng, TrialRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LabError, Result};

/// Runs `f(trial, rng)` for `trial in 0..trials`, each trial on its own
/// stream of the seed. Results come back in trial order for any worker count.
pub fn run_trials<T, F>(trials: u64, workers: usize, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut TrialRng) -> T + Sync,
{
    if trials == 0 {
        return Err(LabError::InvalidArgument("trials must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| LabError::InvalidArgument(e.to_string()))?;
    Ok(pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(seed, t);
                f(t, &mut rng)
            })
            .collect()
    }))
}

/// Default worker count: available parallelism.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Summary {
        let n = xs.len();
        let mean = if n == 0 { f64::NAN } else { xs.iter().sum::<f64>() / n as f64 };
        let variance = if n < 2 { 0.0 } else { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64 };
        let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Summary { count: n, mean, variance, min, max }
    }

    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        (self.variance / self.count as f64).sqrt()
    }
}

/// Fraction of `xs` with `|x − center| < radius`.
pub fn fraction_within(xs: &[f64], center: f64, radius: f64) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().filter(|&&x| (x - center).abs() < radius).count() as f64 / xs.len() as f64
}
