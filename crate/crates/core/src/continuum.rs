//! Analytic continuum model: effective PDE coefficients, dispersion
//! relations, and closed-form percolation probabilities for the square
//! lattice.
//!
//! The discrete update rules, averaged over the eight local edge
//! configurations weighted by their occurrence probabilities, reduce to a
//! single second-order PDE for the amplitude field. Fourier modes of that
//! equation give a dispersion relation per axis; the squared group velocity
//! raised to the 2n-th power is the probability for a mode to cross an n-row
//! region, which yields the percolation probabilities `zeta_x` and
//! `zeta_y = p^(2n)` and the analytic transition point.

use crate::error::{Error, Result};

/// Maximum wavenumber supported by the differential form of the walk.
pub const K_MAX: f64 = std::f64::consts::SQRT_2;

/// Coefficients of `c_yy d2/dy2 + c_xx d2/dx2 + c_x d/dx + c_y d/dy + c_0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeCoefficients {
    pub c_yy: f64,
    pub c_xx: f64,
    pub c_x: f64,
    pub c_y: f64,
    pub c_0: f64,
}

/// Closed-form PDE coefficients as functions of `(p, theta)`. At `p = 1`
/// they reduce to the Klein-Gordon form `(1, -cos t, 0, 0, 2(1 - cos t))`.
pub fn pde_coefficients(p: f64, theta: f64) -> Result<PdeCoefficients> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    let cos = theta.cos();
    let p2 = p * p;
    Ok(PdeCoefficients {
        c_yy: p,
        c_xx: -p2 * (2.0 * p - 1.0) * cos,
        c_x: 2.0 * p2 * (1.0 - p) * (1.0 - cos),
        c_y: -2.0 * p2 * (1.0 - p),
        c_0: 2.0 * (1.0 - cos) * (1.0 + p - p2),
    })
}

/// Occurrence probabilities of the eight local edge configurations, indexed
/// `a..h`. The first four share a present up edge and sum to `p`; the last
/// four share a missing up edge and sum to `1 - p`.
pub fn config_weights(p: f64) -> Result<[f64; 8]> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    let q = 1.0 - p;
    let p2 = p * p;
    Ok([
        p2 * p,      // a: all transport edges present
        p2 * q,      // b: one lateral feeder missing
        p2 * q,      // c: the other lateral feeder missing
        p * q * q,   // d: both lateral feeders missing, up present
        p * q * q,   // e: trapped from the left
        p * q * q,   // f: trapped from the right
        p2 * q,      // g: only the up edge missing (no trapping)
        q * q * q,   // h: no transport at all
    ])
}

/// Dispersion branch sign for [`omega_x_branch`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DispersionBranch {
    #[default]
    Positive,
    Negative,
}

fn radicand_x(k_x: f64, p: f64, theta: f64) -> Result<f64> {
    if p == 0.0 {
        return Err(Error::ZeroProbability);
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    if !(0.0..=K_MAX).contains(&k_x) {
        return Err(Error::WavenumberOutOfRange(k_x));
    }
    let cos = theta.cos();
    let r = p * (2.0 * p - 1.0) * cos * k_x * k_x
        + 2.0 * (1.0 / p - p + 1.0) * (1.0 - cos);
    if r < 0.0 {
        return Err(Error::NegativeRadicand(r));
    }
    Ok(r)
}

/// Frequency of the x-direction Fourier mode (positive branch).
pub fn omega_x(k_x: f64, p: f64, theta: f64) -> Result<f64> {
    omega_x_branch(k_x, p, theta, DispersionBranch::Positive)
}

pub fn omega_x_branch(k_x: f64, p: f64, theta: f64, branch: DispersionBranch) -> Result<f64> {
    let w = radicand_x(k_x, p, theta)?.sqrt();
    Ok(match branch {
        DispersionBranch::Positive => w,
        DispersionBranch::Negative => -w,
    })
}

/// `d omega_x / d k_x`: the fraction of amplitude transported along x per
/// shift in y.
pub fn group_velocity_x(k_x: f64, p: f64, theta: f64) -> Result<f64> {
    let w = omega_x(k_x, p, theta)?;
    if w == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    Ok(p * (2.0 * p - 1.0) * theta.cos() * k_x / w)
}

/// Percolation probability along x for an n-column region at the mode of
/// maximal transport, `k_x = sqrt(2)`.
pub fn zeta_x(p: f64, n: usize, theta: f64) -> Result<f64> {
    zeta_x_at(p, n, theta, K_MAX)
}

/// Percolation probability along x at an explicit wavenumber:
/// `|group_velocity_x|^(2n)`, evaluated in log space.
pub fn zeta_x_at(p: f64, n: usize, theta: f64, k_x: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::SizeOutOfRange);
    }
    let v = group_velocity_x(k_x, p, theta)?.abs();
    if v == 0.0 {
        return Ok(0.0);
    }
    Ok((2.0 * n as f64 * v.ln()).exp())
}

/// Percolation probability along y for an n-row region: `p^(2n)`, evaluated
/// in log space. Independent of the coin angle.
pub fn zeta_y(p: f64, n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::SizeOutOfRange);
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    Ok((2.0 * n as f64 * p.ln()).exp())
}

/// Analytic transition point: the `p` at which `p^(2n)` reaches `threshold`,
/// i.e. `threshold^(1/(2n))`.
pub fn analytic_pa(n: usize, threshold: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::SizeOutOfRange);
    }
    if !(0.0 < threshold && threshold <= 1.0) {
        return Err(Error::ThresholdOutOfRange(threshold));
    }
    Ok((threshold.ln() / (2.0 * n as f64)).exp())
}
