//! Disorder-ensemble averaging, percolation sweeps, and transition points.
//!
//! Trials are embarrassingly parallel. Every trial derives its seeds from
//! `(master_seed, grid index, trial index)` through the counter-based stream,
//! and results are reduced in trial order, so a sweep is bit-identical for
//! any worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coin::CoinParams;
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::observables::{zeta_single_padded, SeedPair, ZetaSample};
use crate::rng::child_seed;
use crate::walk::{EvolvePolicy, InitialState};

/// Default lower edge of the transition-region grid.
pub const DEFAULT_GRID_START: f64 = 0.80;
/// Default grid step (also the reporting resolution of `find_pa`).
pub const DEFAULT_RESOLUTION: f64 = 0.005;
/// Percolation-probability threshold defining the transition point.
pub const DEFAULT_THRESHOLD: f64 = 0.01;
/// Default number of disorder realizations per grid point.
pub const DEFAULT_TRIALS: u32 = 200;

/// Ensemble sweep over a probability grid, with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub spec: LatticeSpec,
    pub coins: CoinParams,
    pub p_grid: Vec<f64>,
    pub mean_zeta: Vec<f64>,
    pub stderr_zeta: Vec<f64>,
    pub trials: u32,
    pub master_seed: u64,
    pub threshold: f64,
    /// Interpolated threshold crossing, when the grid reaches it.
    pub p_a: Option<f64>,
    pub policy: EvolvePolicy,
    pub pad: usize,
    /// Trials re-run once with a 4x step budget.
    pub retried: u32,
    /// Trials still unconverged after the re-run (counted as-is).
    pub unconverged: u32,
}

impl SweepResult {
    pub fn csv_header() -> &'static str {
        "p,mean_zeta,stderr,trials"
    }

    /// Data rows (no provenance header).
    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        out.push_str(Self::csv_header());
        out.push('\n');
        for i in 0..self.p_grid.len() {
            out.push_str(&format!(
                "{},{:.16e},{:.16e},{}\n",
                self.p_grid[i], self.mean_zeta[i], self.stderr_zeta[i], self.trials
            ));
        }
        out
    }
}

fn validate_grid(p_grid: &[f64]) -> Result<()> {
    if p_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for (i, &p) in p_grid.iter().enumerate() {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidGrid);
        }
        if i > 0 && p <= p_grid[i - 1] {
            return Err(Error::InvalidGrid);
        }
    }
    Ok(())
}

fn run_trial(
    spec: &LatticeSpec,
    p: f64,
    coins: &CoinParams,
    init: &InitialState,
    policy: &EvolvePolicy,
    pad: usize,
    trial_seed: u64,
) -> Result<(ZetaSample, bool)> {
    let seeds = SeedPair { edges: child_seed(trial_seed, 0), coins: child_seed(trial_seed, 1) };
    let sample = zeta_single_padded(spec, p, coins, init, seeds, policy, pad)?;
    if sample.converged {
        return Ok((sample, false));
    }
    // One retry with a 4x step budget; the result is counted either way.
    let bigger = policy.with_step_budget(policy.max_steps * 4);
    let sample = zeta_single_padded(spec, p, coins, init, seeds, &bigger, pad)?;
    Ok((sample, true))
}

/// Mean and standard error of the percolation probability over `trials`
/// realizations with seeds derived from `(master_seed, trial index)`.
pub fn average_zeta(
    spec: &LatticeSpec,
    p: f64,
    coins: &CoinParams,
    init: &InitialState,
    trials: u32,
    master_seed: u64,
    policy: &EvolvePolicy,
) -> Result<(f64, f64)> {
    let point = average_zeta_padded(spec, p, coins, init, trials, master_seed, policy, 0)?;
    Ok((point.mean, point.stderr))
}

/// The individual realizations behind [`average_zeta`], in trial order.
/// Non-converged trials are re-run once with a 4x step budget.
#[allow(clippy::too_many_arguments)]
pub fn zeta_samples(
    spec: &LatticeSpec,
    p: f64,
    coins: &CoinParams,
    init: &InitialState,
    trials: u32,
    master_seed: u64,
    policy: &EvolvePolicy,
    pad: usize,
) -> Result<Vec<ZetaSample>> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let samples: Result<Vec<(ZetaSample, bool)>> = (0..trials)
        .into_par_iter()
        .map(|j| run_trial(spec, p, coins, init, policy, pad, child_seed(master_seed, j as u64)))
        .collect();
    Ok(samples?.into_iter().map(|(s, _)| s).collect())
}

#[derive(Debug, Clone, Copy)]
pub struct PointEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub retried: u32,
    pub unconverged: u32,
}

#[allow(clippy::too_many_arguments)]
pub fn average_zeta_padded(
    spec: &LatticeSpec,
    p: f64,
    coins: &CoinParams,
    init: &InitialState,
    trials: u32,
    master_seed: u64,
    policy: &EvolvePolicy,
    pad: usize,
) -> Result<PointEstimate> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let samples: Result<Vec<(ZetaSample, bool)>> = (0..trials)
        .into_par_iter()
        .map(|j| run_trial(spec, p, coins, init, policy, pad, child_seed(master_seed, j as u64)))
        .collect();
    let samples = samples?;
    let n = trials as f64;
    let mean = samples.iter().map(|(s, _)| s.zeta).sum::<f64>() / n;
    let stderr = if trials > 1 {
        let var =
            samples.iter().map(|(s, _)| (s.zeta - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    let retried = samples.iter().filter(|(_, r)| *r).count() as u32;
    let unconverged = samples.iter().filter(|(s, _)| !s.converged).count() as u32;
    Ok(PointEstimate { mean, stderr, retried, unconverged })
}

/// First grid crossing of `threshold`, linearly interpolated between the
/// bracketing grid points.
pub fn threshold_crossing(p_grid: &[f64], means: &[f64], threshold: f64) -> Option<f64> {
    let k = means.iter().position(|&m| m >= threshold)?;
    if k == 0 {
        return Some(p_grid[0]);
    }
    let (p0, p1) = (p_grid[k - 1], p_grid[k]);
    let (m0, m1) = (means[k - 1], means[k]);
    Some(p0 + (threshold - m0) * (p1 - p0) / (m1 - m0))
}

/// Runs [`average_zeta`] at every grid point and locates the transition
/// point.
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    spec: &LatticeSpec,
    coins: &CoinParams,
    init: &InitialState,
    p_grid: &[f64],
    trials: u32,
    master_seed: u64,
    policy: &EvolvePolicy,
    threshold: f64,
) -> Result<SweepResult> {
    sweep_padded(spec, coins, init, p_grid, trials, master_seed, policy, threshold, 0)
}

#[allow(clippy::too_many_arguments)]
pub fn sweep_padded(
    spec: &LatticeSpec,
    coins: &CoinParams,
    init: &InitialState,
    p_grid: &[f64],
    trials: u32,
    master_seed: u64,
    policy: &EvolvePolicy,
    threshold: f64,
    pad: usize,
) -> Result<SweepResult> {
    validate_grid(p_grid)?;
    if !(0.0 < threshold && threshold < 1.0) {
        return Err(Error::ThresholdOutOfRange(threshold));
    }
    let points: Result<Vec<PointEstimate>> = p_grid
        .par_iter()
        .enumerate()
        .map(|(k, &p)| {
            average_zeta_padded(
                spec,
                p,
                coins,
                init,
                trials,
                child_seed(master_seed, k as u64),
                policy,
                pad,
            )
        })
        .collect();
    let points = points?;
    let mean_zeta: Vec<f64> = points.iter().map(|e| e.mean).collect();
    let stderr_zeta: Vec<f64> = points.iter().map(|e| e.stderr).collect();
    let p_a = threshold_crossing(p_grid, &mean_zeta, threshold);
    Ok(SweepResult {
        spec: *spec,
        coins: *coins,
        p_grid: p_grid.to_vec(),
        mean_zeta,
        stderr_zeta,
        trials,
        master_seed,
        threshold,
        p_a,
        policy: *policy,
        pad,
        retried: points.iter().map(|e| e.retried).sum(),
        unconverged: points.iter().map(|e| e.unconverged).sum(),
    })
}

/// Ascending grid `start..=stop` with the given step.
pub fn probability_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let n = ((stop - start) / step).round() as usize;
    for k in 0..=n {
        let p = start + k as f64 * step;
        grid.push(p.min(1.0));
    }
    grid.dedup();
    grid
}

/// Transition point on the default `[0.80, 1.00]` grid: the smallest grid `p`
/// whose ensemble mean reaches `threshold`, refined by linear interpolation.
#[allow(clippy::too_many_arguments)]
pub fn find_pa(
    spec: &LatticeSpec,
    coins: &CoinParams,
    init: &InitialState,
    threshold: f64,
    trials: u32,
    master_seed: u64,
    policy: &EvolvePolicy,
    resolution: f64,
) -> Result<f64> {
    let grid = probability_grid(DEFAULT_GRID_START, 1.0, resolution);
    let result = sweep(spec, coins, init, &grid, trials, master_seed, policy, threshold)?;
    result.p_a.ok_or(Error::ThresholdNotReached)
}
