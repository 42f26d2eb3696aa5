//! Helpers shared by the integration suites: dense-matrix construction for
//! small closed systems and random state vectors.

use num_complex::Complex64;
use qperc_core::lattice::EdgeConfig;
use qperc_core::rng;
use qperc_core::walk::{StepContext, WalkState};

pub fn empty_state(n_x: usize, n_y: usize) -> WalkState {
    WalkState {
        n_x,
        n_y,
        psi_down: vec![Complex64::new(0.0, 0.0); n_x * n_y],
        psi_up: vec![Complex64::new(0.0, 0.0); n_x * n_y],
        trapped: vec![0.0; n_x * n_y],
        exited: 0.0,
        t: 0,
    }
}

pub fn to_vec(state: &WalkState) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(2 * state.psi_down.len());
    v.extend_from_slice(&state.psi_down);
    v.extend_from_slice(&state.psi_up);
    v
}

pub fn from_vec(n_x: usize, n_y: usize, v: &[Complex64]) -> WalkState {
    let mut s = empty_state(n_x, n_y);
    let n = n_x * n_y;
    s.psi_down.copy_from_slice(&v[..n]);
    s.psi_up.copy_from_slice(&v[n..]);
    s
}

/// Columns of the step operator, built by stepping every basis vector.
pub fn step_matrix(config: &EdgeConfig, ctx: &StepContext) -> Vec<Vec<Complex64>> {
    let (nx, ny) = (config.sim_nx(), config.sim_ny());
    let dim = 2 * nx * ny;
    (0..dim)
        .map(|j| {
            let mut basis = vec![Complex64::new(0.0, 0.0); dim];
            basis[j] = Complex64::new(1.0, 0.0);
            let mut state = from_vec(nx, ny, &basis);
            ctx.step(&mut state, config).unwrap();
            to_vec(&state)
        })
        .collect()
}

pub fn matrix_apply(cols: &[Vec<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
    let dim = v.len();
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (j, col) in cols.iter().enumerate() {
        if v[j].re == 0.0 && v[j].im == 0.0 {
            continue;
        }
        for k in 0..dim {
            out[k] += col[k] * v[j];
        }
    }
    out
}

/// Max-norm of `M^dagger M - I` from the column set.
pub fn unitarity_defect(cols: &[Vec<Complex64>]) -> f64 {
    let dim = cols.len();
    let mut worst = 0.0f64;
    for j in 0..dim {
        for k in 0..dim {
            let mut dot = Complex64::new(0.0, 0.0);
            for (a, b) in cols[j].iter().zip(&cols[k]) {
                dot += a.conj() * b;
            }
            let expect = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((dot - expect).norm());
        }
    }
    worst
}

pub fn random_state(dim: usize, seed: u64) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim)
        .map(|i| {
            Complex64::new(
                rng::stream_unit(seed, 2 * i as u64) - 0.5,
                rng::stream_unit(seed, 2 * i as u64 + 1) - 0.5,
            )
        })
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}
