//! Exit probability, per-realization percolation samples, and trapped mass.

use serde::{Deserialize, Serialize};

use crate::coin::CoinParams;
use crate::error::Result;
use crate::lattice::{sample_edges_padded, EdgeConfig, LatticeSpec};
use crate::walk::{evolve, init_state_for, EvolvePolicy, InitialState, Termination, WalkState};

/// Probability of finding the walker outside the simulated region: the
/// cumulative absorbed mass.
pub fn exit_probability(state: &WalkState) -> f64 {
    state.exited
}

/// Probability of finding the walker outside the disordered window: the
/// absorbed mass plus anything currently in the padding columns. Equals
/// [`exit_probability`] for unpadded runs; padded runs use it to emulate a
/// window on a laterally open lattice.
pub fn window_exit_probability(state: &WalkState, config: &EdgeConfig) -> f64 {
    let pad = config.pad();
    if pad == 0 {
        return state.exited;
    }
    let mut outside = state.exited;
    for y in 0..state.n_y {
        for x in 0..state.n_x {
            if x < pad || x >= pad + config.spec().n_x {
                outside += state.probability(x, y);
            }
        }
    }
    outside
}

/// Seeds for one realization: the edge sample and the coin-angle field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedPair {
    pub edges: u64,
    pub coins: u64,
}

/// Outcome of a single disorder realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaSample {
    pub p: f64,
    /// Edge-realization seed.
    pub seed: u64,
    /// Exited probability at termination.
    pub zeta: f64,
    /// Interior probability at termination.
    pub trapped: f64,
    pub steps_run: usize,
    pub converged: bool,
}

impl ZetaSample {
    pub fn csv_header() -> &'static str {
        "p,seed,zeta,trapped,steps_run,converged"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.16e},{:.16e},{},{}",
            self.p, self.seed, self.zeta, self.trapped, self.steps_run, self.converged
        )
    }
}

/// Samples one edge realization, evolves to termination, and reads off the
/// percolation probability. Random-angle policies draw their field from
/// `seeds.coins`.
pub fn zeta_single(
    spec: &LatticeSpec,
    p: f64,
    coins: &CoinParams,
    init: &InitialState,
    seeds: SeedPair,
    policy: &EvolvePolicy,
) -> Result<ZetaSample> {
    zeta_single_padded(spec, p, coins, init, seeds, policy, 0)
}

/// [`zeta_single`] over a region widened by `pad` fully connected columns on
/// each side. The initial origin shifts with the padding.
pub fn zeta_single_padded(
    spec: &LatticeSpec,
    p: f64,
    coins: &CoinParams,
    init: &InitialState,
    seeds: SeedPair,
    policy: &EvolvePolicy,
    pad: usize,
) -> Result<ZetaSample> {
    let config = sample_edges_padded(spec, p, seeds.edges, pad)?;
    let coins = coins.with_field_seed(seeds.coins);
    let mut origin = init.origin;
    origin.x += pad;
    let init = InitialState::new(init.delta, init.eta, origin);
    let mut state = init_state_for(&config, &init)?;
    let reason = evolve(&mut state, &config, &coins, policy)?;
    Ok(ZetaSample {
        p,
        seed: seeds.edges,
        zeta: state.exited,
        trapped: state.norm_inside(),
        steps_run: state.t,
        converged: reason == Termination::Converged,
    })
}

/// Per-vertex trapped probability: the mass parked on self-looping edges,
/// plus mobile amplitude that is certain to park at the next substep. At
/// convergence this accounts for the interior distribution up to the
/// stationarity tolerance.
pub fn trapped_mass_map(state: &WalkState, config: &EdgeConfig) -> Vec<f64> {
    debug_assert_eq!(state.psi_down.len(), config.n_vertices());
    let blocked = crate::walk::blocked_mobile_map(state, config);
    state.trapped.iter().zip(blocked).map(|(t, b)| t + b).collect()
}
