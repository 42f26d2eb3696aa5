//! Directed discrete-time quantum walk (D-DQW) simulator for bond-percolated
//! two-dimensional lattices.
//!
//! A two-state walker moves on a square, honeycomb (brick-wall), or nanotube
//! lattice whose edges are independently present with probability `p`. The
//! walk is coined along `x` and strictly directed along `+y`; amplitude that
//! leaves the simulated region is absorbed and counted as exited. The crate
//! provides:
//!
//! - [`lattice`]: lattice geometry and seeded edge-percolation realizations,
//! - [`coin`]: the 2x2 coin operators and per-vertex angle fields,
//! - [`walk`]: the conditional shift operators and full walk steps,
//! - [`observables`]: exit probability and per-realization percolation data,
//! - [`montecarlo`]: disorder-ensemble sweeps and transition-point estimation,
//! - [`continuum`]: the analytic continuum (dispersion-relation) model.
//!
//! All randomness is counter-based: a draw is a pure function of a 64-bit
//! seed and a stream index, so results are bit-reproducible regardless of
//! worker count.

pub mod coin;
pub mod continuum;
pub mod error;
pub mod lattice;
pub mod montecarlo;
pub mod observables;
pub mod reference;
pub mod rng;
pub mod walk;

pub use error::{Error, Result};
pub use lattice::{build_spec, sample_edges, EdgeConfig, Geometry, LatticeSpec, Vertex};
pub use walk::{init_state, EvolvePolicy, InitialState, Termination, WalkState};
